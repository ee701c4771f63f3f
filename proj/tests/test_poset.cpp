#include <doctest.h>

#include <random>
#include <set>

#include "tame/error.hpp"
#include "tame/poset.hpp"
#include "tame/random.hpp"

using namespace tame;

namespace {

Subset subset_of(const FinitePoset& p, std::initializer_list<const char*> ids) {
    Subset s = p.empty_subset();
    for (auto id : ids) s.set(p.index_of(id));
    return s;
}

std::set<std::set<std::string>> named(const FinitePoset& p, const std::vector<std::vector<std::size_t>>& parts) {
    std::set<std::set<std::string>> out;
    for (const auto& part : parts) {
        std::set<std::string> s;
        for (auto x : part) s.insert(p.id(x));
        out.insert(s);
    }
    return out;
}

FinitePoset diamond() {
    return FinitePoset::from_relations({"a", "b", "c", "d"},
                                       std::vector<std::pair<std::string, std::string>>{{"a", "b"}, {"a", "c"}, {"b", "d"}, {"c", "d"}});
}

// Naive transitive closure by repeated relaxation.
std::vector<std::vector<bool>> closure_oracle(std::size_t n, const std::vector<Relation>& gens) {
    std::vector<std::vector<bool>> leq(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) leq[i][i] = true;
    for (auto [a, b] : gens) leq[a][b] = true;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (leq[i][k] && leq[k][j]) leq[i][j] = true;
    return leq;
}

}  // namespace

TEST_CASE("poset_from_relations") {
    auto one = FinitePoset::antichain({"a"});
    CHECK(one.size() == 1);
    CHECK(one.covers().empty());

    auto chain = FinitePoset::from_relations({"a", "b", "c"}, std::vector<std::pair<std::string, std::string>>{{"a", "b"}, {"b", "c"}});
    CHECK(chain.leq(0, 2));
    CHECK_FALSE(chain.leq(2, 0));
    CHECK(chain.covers() == std::vector<Relation>{{0, 1}, {1, 2}});

    CHECK_THROWS_AS(FinitePoset::from_relations({"a", "b"}, std::vector<std::pair<std::string, std::string>>{{"a", "b"}, {"b", "a"}}),
                    CycleDetected);
    CHECK_THROWS_AS(FinitePoset::from_relations({"a", "a"}, std::vector<Relation>{}), InvalidArgument);
    CHECK_THROWS_AS(FinitePoset::from_relations({"a"}, std::vector<std::pair<std::string, std::string>>{{"a", "z"}}),
                    UnknownElement);
}

TEST_CASE("order matrix is a partial order and covers are its transitive reduction") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        const auto p = random_poset(rng, 1 + rng() % 12, 0.3);
        const auto n = p.size();
        std::vector<Relation> all;
        for (std::size_t a = 0; a < n; ++a) {
            CHECK(p.leq(a, a));
            for (std::size_t b = 0; b < n; ++b) {
                if (a != b && p.leq(a, b)) {
                    CHECK_FALSE(p.leq(b, a));
                    all.emplace_back(a, b);
                }
                for (std::size_t c = 0; c < n; ++c)
                    if (p.leq(a, b) && p.leq(b, c)) CHECK(p.leq(a, c));
            }
        }
        // Covers generate the order and none of them is implied by the others.
        const auto from_covers = closure_oracle(n, p.covers());
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b) CHECK(from_covers[a][b] == p.leq(a, b));
        for (std::size_t e = 0; e < p.covers().size(); ++e) {
            auto rest = p.covers();
            const auto [a, b] = rest[e];
            rest.erase(rest.begin() + static_cast<long>(e));
            CHECK_FALSE(closure_oracle(n, rest)[a][b]);
        }
        // Idempotence: feeding back the full relation reproduces the poset.
        CHECK(FinitePoset::from_relations(p.ids(), all) == p);
        auto again = FinitePoset::from_relations(p.ids(), all);
        CHECK(again.covers() == p.covers());
    }
}

TEST_CASE("upsets, downsets and intervals") {
    auto chain = FinitePoset::chain({"a", "b", "c"});
    CHECK(upset_of(chain, subset_of(chain, {"b"})) == subset_of(chain, {"b", "c"}));
    auto anti = FinitePoset::antichain({"a", "b"});
    CHECK(upset_of(anti, subset_of(anti, {"a"})) == subset_of(anti, {"a"}));
    auto d = diamond();
    CHECK(upset_of(d, subset_of(d, {"b"})) == subset_of(d, {"b", "d"}));
    CHECK(downset_of(d, subset_of(d, {"b"})) == subset_of(d, {"a", "b"}));

    CHECK_FALSE(is_interval(chain, subset_of(chain, {"a", "c"})));
    CHECK(is_interval(chain, chain.empty_subset()));
    CHECK(is_interval(d, subset_of(d, {"b", "c"})));
}

TEST_CASE("leq_components") {
    auto anti = FinitePoset::antichain({"a", "b"});
    CHECK(leq_components(anti, anti.full_subset()).size() == 2);
    auto chain = FinitePoset::chain({"a", "b"});
    CHECK(leq_components(chain, chain.full_subset()).size() == 1);
    auto vee = FinitePoset::from_relations({"a", "b", "c"}, std::vector<std::pair<std::string, std::string>>{{"a", "c"}, {"b", "c"}});
    CHECK(named(vee, leq_components(vee, subset_of(vee, {"a", "b"}))) ==
          std::set<std::set<std::string>>{{"a"}, {"b"}});
    CHECK(leq_components(vee, vee.full_subset()).size() == 1);
}

TEST_CASE("components of intervals are intervals") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        const auto p = random_poset(rng, 1 + rng() % 10, 0.25);
        Subset u = p.empty_subset(), d = p.empty_subset();
        for (std::size_t x = 0; x < p.size(); ++x) {
            if (rng() % 4 == 0) u.set(x);
            if (rng() % 3 == 0) d.set(x);
        }
        const Subset interval = upset_of(p, u) & downset_of(p, d);
        REQUIRE(is_interval(p, interval));
        for (const auto& comp : leq_components(p, interval)) {
            Subset c = p.empty_subset();
            for (auto x : comp) c.set(x);
            CHECK(is_interval(p, c));
        }
    }
}

TEST_CASE("product") {
    auto point = share(FinitePoset::antichain({"*"}));
    auto c2 = share(FinitePoset::chain({"0", "1"}));
    auto pc = product(point, c2);
    CHECK(pc.poset->size() == 2);
    CHECK(pc.poset->leq(0, 1));

    auto sq = product(c2, c2);
    CHECK(sq.poset->size() == 4);
    CHECK(sq.poset->covers().size() == 4);
    CHECK(sq.poset->leq(sq.poset->index_of("(0,0)"), sq.poset->index_of("(1,1)")));
    CHECK_FALSE(sq.poset->comparable(sq.poset->index_of("(0,1)"), sq.poset->index_of("(1,0)")));

    auto a2 = share(FinitePoset::antichain({"x", "y"}));
    auto aa = product(a2, a2);
    CHECK(aa.poset->covers().empty());
    CHECK(aa.poset->size() == 4);
}

TEST_CASE("product is a categorical product") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        auto s = share(random_poset(rng, 1 + rng() % 7, 0.3));
        auto l = share(random_poset(rng, 1 + rng() % 5, 0.4));
        auto r = share(random_poset(rng, 1 + rng() % 5, 0.4));
        const auto f = random_monotone_map(rng, s, l);
        const auto g = random_monotone_map(rng, s, r);
        const auto prod = product(l, r);
        const auto fg = pairing(f, g, prod);
        CHECK_NOTHROW(MonotoneMap::make(fg.source, fg.target, fg.assignment));
        CHECK(compose(prod.left_projection, fg).assignment == f.assignment);
        CHECK(compose(prod.right_projection, fg).assignment == g.assignment);
    }
}

TEST_CASE("component_refinement examples") {
    auto point = share(FinitePoset::antichain({"*"}));
    {
        auto anti = share(FinitePoset::antichain({"x", "y"}));
        auto e = MonotoneMap::make(anti, point, {0, 0});
        auto r = component_refinement(e);
        CHECK(r.refined->size() == 2);
        CHECK(r.refined->covers().empty());
        CHECK_FALSE(check_ff_conditions(e));
        CHECK(check_ff_conditions(r.to_refined));
    }
    {
        auto c = share(FinitePoset::chain({"a", "b"}));
        auto r = component_refinement(MonotoneMap::make(c, point, {0, 0}));
        CHECK(r.refined->size() == 1);
        CHECK(r.refined->id(0) == "*");
    }
    {
        // a<c, b<c, d isolated; {a,b,d} -> u, {c} -> v with u < v.
        auto src = share(FinitePoset::from_relations({"a", "b", "c", "d"},
                                                     std::vector<std::pair<std::string, std::string>>{{"a", "c"}, {"b", "c"}}));
        auto tgt = share(FinitePoset::chain({"u", "v"}));
        auto e = MonotoneMap::make(src, tgt, {0, 0, 1, 0});
        auto r = component_refinement(e);
        const auto& ph = *r.refined;
        REQUIRE(ph.size() == 4);
        const auto ca = r.to_refined(0), cb = r.to_refined(1), cc = r.to_refined(2), cd = r.to_refined(3);
        CHECK(std::set<std::size_t>{ca, cb, cc, cd}.size() == 4);
        CHECK(ph.leq(ca, cc));
        CHECK(ph.leq(cb, cc));
        CHECK_FALSE(ph.comparable(cd, cc));
        CHECK_FALSE(ph.comparable(cd, ca));
        CHECK(ph.covers().size() == 2);
        CHECK(ph.id(cc) == "v");
        CHECK(ph.id(ca) == "u#0");
        CHECK(compose(r.projection, r.to_refined).assignment == e.assignment);
    }
}

TEST_CASE("check_ff_conditions examples") {
    auto point = share(FinitePoset::antichain({"*"}));
    auto c2 = share(FinitePoset::chain({"0", "1"}));
    CHECK_FALSE(check_ff_conditions(MonotoneMap::make(point, c2, {0})));
    CHECK(check_ff_conditions(MonotoneMap::identity(c2)));
    // Surjective, connected fibers, but the target relation is not generated.
    auto anti = share(FinitePoset::antichain({"x", "y"}));
    auto d = diagnose_ff_conditions(MonotoneMap::make(anti, c2, {0, 1}));
    CHECK(d.fibers_connected);
    CHECK_FALSE(d.order_generated);
}

TEST_CASE("component_refinement output passes check_ff_conditions") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 300; ++trial) {
        auto s = share(random_poset(rng, 1 + rng() % 10, 0.3));
        auto t = share(random_poset(rng, 1 + rng() % 8, 0.35));
        const auto e = random_monotone_map(rng, s, t);
        const auto r = component_refinement(e);
        CHECK(check_ff_conditions(r.to_refined));
        CHECK(compose(r.projection, r.to_refined).assignment == e.assignment);
        CHECK_NOTHROW(MonotoneMap::make(r.projection.source, r.projection.target, r.projection.assignment));
        // Idempotent up to isomorphism.
        const auto again = component_refinement(r.to_refined);
        CHECK(again.refined->size() == r.refined->size());
        CHECK(again.refined->covers().size() == r.refined->covers().size());
    }
}

TEST_CASE("json and dot") {
    auto d = diamond();
    auto back = poset_from_json(to_json(d));
    CHECK(back == d);
    CHECK_THROWS_AS(poset_from_json(nlohmann::json::parse(R"({"relations": []})")), ParseError);
    const auto dot = to_dot(d, {{0, "bottom"}});
    CHECK(dot.find("n0 -> n1") != std::string::npos);
    CHECK(dot.find("bottom") != std::string::npos);
}
