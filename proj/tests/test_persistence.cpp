#include <doctest.h>

#include "tame/error.hpp"
#include "tame/persistence.hpp"
#include "tame/random.hpp"

using namespace tame;

namespace {

PosetPtr diamond() {
    return share(FinitePoset::from_relations(
        {"a", "b", "c", "d"}, std::vector<std::pair<std::string, std::string>>{{"a", "b"}, {"a", "c"}, {"b", "d"}, {"c", "d"}}));
}

Subset subset_of(const FinitePoset& p, std::initializer_list<const char*> ids) {
    Subset s(p.size());
    for (auto id : ids) s.set(p.index_of(id));
    return s;
}

std::size_t ipow(std::size_t b, std::size_t e) {
    std::size_t r = 1;
    while (e--) r *= b;
    return r;
}

// Decodes a counter into matrices of the given shapes over F_p.
std::vector<Matrix> decode(std::size_t code, const std::vector<std::pair<std::size_t, std::size_t>>& shapes, Prime p) {
    std::vector<Matrix> out;
    for (auto [r, c] : shapes) {
        Matrix m(r, c, p);
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < c; ++j) {
                m(i, j) = static_cast<std::uint32_t>(code % p);
                code /= p;
            }
        out.push_back(std::move(m));
    }
    return out;
}

// Oracle: count natural transformations by enumerating every family of
// component matrices.
std::size_t count_homs(const PfdModule& m, const PfdModule& n) {
    const auto& P = *m.base();
    std::vector<std::pair<std::size_t, std::size_t>> shapes;
    std::size_t entries = 0;
    for (std::size_t x = 0; x < P.size(); ++x) {
        shapes.emplace_back(n.dim(x), m.dim(x));
        entries += n.dim(x) * m.dim(x);
    }
    std::size_t count = 0;
    for (std::size_t code = 0; code < ipow(m.prime(), entries); ++code) {
        Morphism phi{m, n, decode(code, shapes, m.prime())};
        try {
            check_naturality(phi);
            ++count;
        } catch (const NoSolution&) {
        }
    }
    return count;
}

// Oracle: a colimit over D is dual to the space of compatible families of
// functionals f_x on M(e(x)) with f_x = f_y . M(e(x) <= e(y)) whenever x <= y
// in D. Counts the families by enumeration.
std::size_t count_cocones(const MonotoneMap& e, const PfdModule& m, const Subset& d) {
    const auto& S = *e.source;
    std::vector<std::size_t> members;
    std::vector<std::pair<std::size_t, std::size_t>> shapes;
    std::size_t entries = 0;
    for (auto x = d.find_first(); x != Subset::npos; x = d.find_next(x)) {
        members.push_back(x);
        shapes.emplace_back(1, m.dim(e(x)));
        entries += m.dim(e(x));
    }
    std::size_t count = 0;
    for (std::size_t code = 0; code < ipow(m.prime(), entries); ++code) {
        const auto f = decode(code, shapes, m.prime());
        bool ok = true;
        for (std::size_t i = 0; ok && i < members.size(); ++i)
            for (std::size_t j = 0; ok && j < members.size(); ++j)
                if (i != j && S.leq(members[i], members[j]))
                    ok = f[i] == f[j] * m.structure_map(e(members[i]), e(members[j]));
        if (ok) ++count;
    }
    return count;
}

void check_exactness(const Morphism& phi) {
    const auto& P = *phi.source.base();
    auto k = kernel(phi);
    auto im = image(phi);
    auto ck = cokernel(phi);
    REQUIRE_NOTHROW(validate_module(k.module));
    REQUIRE_NOTHROW(validate_module(im.module));
    REQUIRE_NOTHROW(validate_module(ck.module));
    REQUIRE_NOTHROW(check_naturality(k.map));
    REQUIRE_NOTHROW(check_naturality(im.map));
    REQUIRE_NOTHROW(check_naturality(ck.map));
    for (std::size_t x = 0; x < P.size(); ++x) {
        CHECK((phi.components[x] * k.map.components[x]).is_zero());
        CHECK((ck.map.components[x] * im.map.components[x]).is_zero());
        CHECK(k.module.dim(x) + im.module.dim(x) == phi.source.dim(x));
        CHECK(im.module.dim(x) + ck.module.dim(x) == phi.target.dim(x));
        CHECK(rank(k.map.components[x]) == k.module.dim(x));
        CHECK(rank(im.map.components[x]) == im.module.dim(x));
        CHECK(rank(ck.map.components[x]) == ck.module.dim(x));
    }
    // Pivot-canonical bases make the threaded and serial versions agree
    // exactly, not just up to isomorphism.
    CHECK(serial::kernel(phi).module == k.module);
    CHECK(serial::image(phi).module == im.module);
    CHECK(serial::cokernel(phi).module == ck.module);
}

}  // namespace

TEST_CASE("validate_module examples") {
    auto d = diamond();
    auto all = d->full_subset();
    CHECK_NOTHROW(validate_module(interval_module(d, all)));

    auto m = interval_module(d, all);
    auto maps = m.cover_maps();
    maps[*d->cover_index(d->index_of("c"), d->index_of("d"))] = Matrix::from_rows({{-1}});
    PfdModule bad(d, m.dims(), maps);
    try {
        validate_module(bad);
        FAIL("expected NotCommutative");
    } catch (const NotCommutative& err) {
        CHECK(err.certificate()["from"] == "a");
        CHECK(err.certificate()["to"] == "d");
        std::set<std::uint32_t> values{err.certificate()["first"][0][0].get<std::uint32_t>(),
                                       err.certificate()["second"][0][0].get<std::uint32_t>()};
        CHECK(values == std::set<std::uint32_t>{1, 100});
    }
    CHECK_THROWS_AS(serial::validate_module(bad), NotCommutative);

    Rng rng(3);
    auto chain = share(FinitePoset::chain({"0", "1", "2", "3"}));
    for (int t = 0; t < 20; ++t) {
        std::vector<std::size_t> dims;
        for (int i = 0; i < 4; ++i) dims.push_back(uniform_index(rng, 3));
        std::vector<Matrix> cm;
        for (auto [a, b] : chain->covers()) {
            Matrix x(dims[b], dims[a]);
            for (std::size_t i = 0; i < x.rows(); ++i)
                for (std::size_t j = 0; j < x.cols(); ++j) x(i, j) = static_cast<std::uint32_t>(rng() % 101);
            cm.push_back(x);
        }
        CHECK_NOTHROW(validate_module(PfdModule(chain, dims, cm)));
    }
}

TEST_CASE("interval_module examples") {
    auto d = diamond();
    CHECK(interval_module(d, d->empty_subset()) == PfdModule::zero(d));
    auto c3 = share(FinitePoset::chain({"x", "y", "z"}));
    auto full = interval_module(c3, c3->full_subset());
    CHECK(full.dims() == std::vector<std::size_t>{1, 1, 1});
    for (const auto& m : full.cover_maps()) CHECK(m.is_identity());

    auto bc = interval_module(d, subset_of(*d, {"b", "c"}));
    CHECK_NOTHROW(validate_module(bc));
    CHECK(bc.structure_map(d->index_of("a"), d->index_of("d")).rows() == 0);
    CHECK_THROWS_AS(interval_module(d, subset_of(*d, {"a", "d"})), NotInterval);
}

TEST_CASE("pullback examples") {
    auto c3 = share(FinitePoset::chain({"0", "1", "2"}));
    Rng rng(5);
    auto m = random_module(rng, c3, 3);
    CHECK(pullback(MonotoneMap::identity(c3), m) == m);

    auto pt = share(FinitePoset::antichain({"*"}));
    auto f = MonotoneMap::make(c3, pt, {0, 0, 0});
    CHECK(pullback(f, PfdModule::constant(pt, 1)) == PfdModule::constant(c3, 1));

    auto c2 = share(FinitePoset::chain({"lo", "hi"}));
    auto collapse = MonotoneMap::make(c3, c2, {0, 1, 1});
    auto n = PfdModule(c2, {1, 2}, {Matrix::from_rows({{3}, {4}})});
    auto pb = pullback(collapse, n);
    CHECK(pb.dims() == std::vector<std::size_t>{1, 2, 2});
    CHECK(pb.cover_map(0, 1) == Matrix::from_rows({{3}, {4}}));
    CHECK(pb.cover_map(1, 2).is_identity());
}

TEST_CASE("pullback is functorial") {
    Rng rng(17);
    for (int t = 0; t < 100; ++t) {
        auto a = share(random_poset(rng, 1 + uniform_index(rng, 7), 0.4));
        auto b = share(random_poset(rng, 1 + uniform_index(rng, 6), 0.4));
        auto c = share(random_poset(rng, 1 + uniform_index(rng, 5), 0.4));
        auto f = random_monotone_map(rng, a, b);
        auto g = random_monotone_map(rng, b, c);
        auto m = random_module(rng, c, 3);
        REQUIRE_NOTHROW(validate_module(m));
        auto lhs = pullback(compose(g, f), m);
        auto rhs = pullback(f, pullback(g, m));
        CHECK(lhs == rhs);
        CHECK_NOTHROW(validate_module(lhs));
    }
}

TEST_CASE("hom_space examples") {
    auto pt = share(FinitePoset::antichain({"*"}));
    CHECK(hom_space(PfdModule::constant(pt, 1), PfdModule::constant(pt, 1)).dimension == 1);

    auto ab = share(FinitePoset::chain({"a", "b"}));
    auto fb = interval_module(ab, subset_of(*ab, {"b"}));
    auto fa = interval_module(ab, subset_of(*ab, {"a"}));
    auto fab = interval_module(ab, ab->full_subset());
    CHECK(hom_space(fb, fab).dimension == 1);
    CHECK(hom_space(fa, fab).dimension == 0);

    auto anti = share(FinitePoset::antichain({"x", "y"}));
    auto hs = hom_space(PfdModule::constant(anti, 1), PfdModule::constant(anti, 1));
    CHECK(hs.dimension == 2);
    for (const auto& phi : hs.basis) CHECK_NOTHROW(check_naturality(phi));
}

TEST_CASE("hom_space dimension agrees with enumeration over small fields") {
    Rng rng(23);
    for (Prime p : {2u, 3u}) {
        for (int t = 0; t < 40; ++t) {
            auto base = share(random_poset(rng, 1 + uniform_index(rng, 4), 0.5));
            auto m = random_module(rng, base, 2, p);
            auto n = random_module(rng, base, 2, p);
            std::size_t entries = 0;
            for (std::size_t x = 0; x < base->size(); ++x) entries += m.dim(x) * n.dim(x);
            if (entries > 12) continue;
            const auto hs = hom_space(m, n);
            CHECK(count_homs(m, n) == ipow(p, hs.dimension));
            for (const auto& phi : hs.basis) CHECK_NOTHROW(check_naturality(phi));
        }
    }
}

TEST_CASE("kernel, image and cokernel examples") {
    Rng rng(29);
    auto d = diamond();
    auto m = random_module(rng, d, 3);
    auto id = kernel(Morphism::identity(m));
    CHECK(id.module.total_dim() == 0);
    CHECK(image(Morphism::identity(m)).module.dims() == m.dims());
    CHECK(cokernel(Morphism::identity(m)).module.total_dim() == 0);

    auto ab = share(FinitePoset::chain({"a", "b"}));
    auto fab = interval_module(ab, ab->full_subset());
    auto fa = interval_module(ab, subset_of(*ab, {"a"}));
    auto fb = interval_module(ab, subset_of(*ab, {"b"}));

    // Identity at b is not a natural map F[{a,b}] -> F[{b}]: the square on
    // a -> b reads 0 = 1. Hom is zero there.
    Morphism restriction{fab, fb, {Matrix(0, 1), Matrix::identity(1)}};
    CHECK_THROWS_AS(kernel(restriction), NoSolution);
    CHECK(hom_space(fab, fb).dimension == 0);

    // The natural maps go the other way round: onto the downset part, and in
    // from the upset part.
    Morphism onto_a{fab, fa, {Matrix::identity(1), Matrix(0, 1)}};
    CHECK(kernel(onto_a).module == fb);
    CHECK(cokernel(onto_a).module.total_dim() == 0);
    Morphism from_b{fb, fab, {Matrix(1, 0), Matrix::identity(1)}};
    CHECK(kernel(from_b).module.total_dim() == 0);
    CHECK(cokernel(from_b).module == fa);
    CHECK(image(from_b).module == fb);

    auto c2 = PfdModule::constant(ab, 1);
    Morphism nonnat{c2, c2, {Matrix::identity(1), Matrix::from_rows({{2}})}};
    CHECK_THROWS_AS(kernel(nonnat), NoSolution);
    CHECK_THROWS_AS(image(nonnat), NoSolution);
    CHECK_THROWS_AS(cokernel(nonnat), NoSolution);
}

TEST_CASE("exactness on random morphisms") {
    Rng rng(31);
    for (int t = 0; t < 150; ++t) {
        auto base = share(random_poset(rng, 1 + uniform_index(rng, 8), 0.35));
        auto m = random_module(rng, base, 3);
        auto n = random_module(rng, base, 3);
        check_exactness(random_morphism(rng, m, n));
    }
}

TEST_CASE("colimit_over_downset examples") {
    auto pt = share(FinitePoset::antichain({"*"}));
    auto f = PfdModule::constant(pt, 1);

    auto anti = share(FinitePoset::antichain({"x", "y"}));
    auto e1 = MonotoneMap::make(anti, pt, {0, 0});
    CHECK(colimit_over_downset(e1, f, anti->full_subset()).dimension == 2);

    auto ab = share(FinitePoset::chain({"a", "b"}));
    auto e2 = MonotoneMap::make(ab, pt, {0, 0});
    CHECK(colimit_over_downset(e2, f, ab->full_subset()).dimension == 1);

    auto three = PfdModule::constant(pt, 3);
    Subset single(ab->size());
    single.set(0);
    CHECK(colimit_over_downset(e2, three, single).dimension == 3);
    Subset top(ab->size());
    top.set(1);
    CHECK_THROWS_AS(colimit_over_downset(e2, three, top), InvalidArgument);
}

TEST_CASE("colimit dimension agrees with counted cocones") {
    Rng rng(37);
    for (Prime p : {2u, 3u}) {
        for (int t = 0; t < 60; ++t) {
            auto s = share(random_poset(rng, 1 + uniform_index(rng, 5), 0.4));
            auto tgt = share(random_poset(rng, 1 + uniform_index(rng, 4), 0.5));
            auto e = random_monotone_map(rng, s, tgt);
            auto m = random_module(rng, tgt, 2, p);
            Subset seed(s->size());
            seed.set(uniform_index(rng, s->size()));
            const auto d = downset_of(*s, seed);
            std::size_t entries = 0;
            for (auto x = d.find_first(); x != Subset::npos; x = d.find_next(x)) entries += m.dim(e(x));
            if (entries > 12) continue;
            CHECK(count_cocones(e, m, d) == ipow(p, colimit_over_downset(e, m, d).dimension));
        }
    }
}

TEST_CASE("counit_check examples") {
    auto pt = share(FinitePoset::antichain({"*"}));
    auto anti = share(FinitePoset::antichain({"x", "y"}));
    auto v = counit_check(MonotoneMap::make(anti, pt, {0, 0}), PfdModule::constant(pt, 1));
    REQUIRE(v.size() == 1);
    CHECK(v[0].colimit_dim == 2);
    CHECK(v[0].target_dim == 1);
    CHECK_FALSE(v[0].injective);
    CHECK(v[0].surjective);
    CHECK_FALSE(v[0].iso());

    Rng rng(41);
    auto d = diamond();
    auto m = random_module(rng, d, 3);
    for (const auto& verdict : counit_check(MonotoneMap::identity(d), m)) CHECK(verdict.iso());
}

TEST_CASE("counit is an isomorphism along refined maps and pullback is full") {
    Rng rng(43);
    for (int t = 0; t < 80; ++t) {
        auto s = share(random_poset(rng, 1 + uniform_index(rng, 8), 0.35));
        auto tgt = share(random_poset(rng, 1 + uniform_index(rng, 5), 0.4));
        auto e = random_monotone_map(rng, s, tgt);
        auto cr = component_refinement(e);
        REQUIRE(check_ff_conditions(cr.to_refined));
        auto m = random_module(rng, cr.refined, 3);
        auto n = random_module(rng, cr.refined, 3);
        const auto verdicts = counit_check(cr.to_refined, m);
        for (const auto& v : verdicts) CHECK(v.iso());
        CHECK(serial::counit_check(cr.to_refined, m).size() == verdicts.size());
        CHECK(hom_space(m, n).dimension ==
              hom_space(pullback(cr.to_refined, m), pullback(cr.to_refined, n)).dimension);
    }
}

TEST_CASE("module and morphism json") {
    Rng rng(47);
    auto d = diamond();
    auto m = random_module(rng, d, 3);
    auto back = module_from_json(to_json(m), d, 101);
    CHECK(back == m);
    auto n = random_module(rng, d, 3);
    auto phi = random_morphism(rng, m, n);
    auto phi2 = morphism_from_json(to_json(phi), m, n);
    CHECK(phi2.components == phi.components);

    auto j = nlohmann::json::parse(R"({"dims": {"a": 1, "b": 1}, "covers": []})");
    CHECK_THROWS_AS(module_from_json(j, d, 101), ParseError);
    auto j2 = nlohmann::json::parse(R"({"dims": {"a": 1, "d": 1}, "covers": [["a", "d", [[1]]]]})");
    CHECK_THROWS_AS(module_from_json(j2, d, 101), ParseError);
    auto j3 = nlohmann::json::parse(R"({"dims": {"zz": 1}})");
    CHECK_THROWS_AS(module_from_json(j3, d, 101), UnknownElement);
}
