#include <doctest.h>

#include "tame/encoding.hpp"
#include "tame/error.hpp"
#include "tame/random.hpp"

using namespace tame;

namespace {

Rational q(std::int64_t n, std::int64_t d = 1) { return Rational(n, d); }

GridPtr line(std::vector<Rational> bp) { return share(Grid({std::move(bp)})); }

// a < b, fiber(b) = [0,inf)^2.
Encoding quadrant() {
    const Coordinate corner[2] = {q(0), q(0)};
    const auto u = principal_upset(corner);
    return encoding_from_fibers(u.grid(), share(FinitePoset::chain({"a", "b"})), {{"b", u}}, "a");
}

// 1-d step at t: (-inf,t) -> a, [t,inf) -> b.
Encoding step(std::int64_t t) {
    auto g = line({q(t)});
    return Encoding{g, share(FinitePoset::chain({"a", "b"})), {0, 1, 1}};
}

// Oracle for "inverse image of an upset is an upset": check every pair of
// cells directly.
bool preimage_is_upset(const Encoding& e, const Subset& target_upset) {
    const auto& g = *e.grid;
    for (std::size_t c = 0; c < g.cell_count(); ++c)
        for (std::size_t d = 0; d < g.cell_count(); ++d)
            if (g.cell_leq(c, d) && target_upset.test(e.label[c]) && !target_upset.test(e.label[d])) return false;
    return true;
}

}  // namespace

TEST_CASE("validate_encoding examples") {
    CHECK_NOTHROW(validate_encoding(constant_encoding(line({q(0)}))));
    CHECK(validate_encoding(step(0)).pruned.empty());

    Encoding reversed{line({q(0)}), share(FinitePoset::chain({"b", "a"})), {1, 0, 0}};
    // labels: a on (-inf,0), b elsewhere, but now b < a.
    reversed.label = {reversed.target->index_of("a"), reversed.target->index_of("b"), reversed.target->index_of("b")};
    try {
        validate_encoding(reversed);
        FAIL("expected NotMonotone");
    } catch (const NotMonotone& err) {
        CHECK(err.certificate()["lower_label"] == "a");
        CHECK(err.certificate()["upper_label"] == "b");
        CHECK(err.certificate()["lower_cell"] == nlohmann::json::array({0}));
    }
}

TEST_CASE("validate_encoding prunes unrealized elements") {
    Encoding e{line({q(0)}), share(FinitePoset::chain({"a", "m", "b"})), {0, 2, 2}};
    auto v = validate_encoding(e);
    CHECK(v.pruned == std::vector<std::string>{"m"});
    REQUIRE(v.encoding.target->size() == 2);
    CHECK(v.encoding.target->leq(v.encoding.target->index_of("a"), v.encoding.target->index_of("b")));
    CHECK(fiber(v.encoding, "b") == fiber(e, "b"));
    CHECK_THROWS_AS(fiber(v.encoding, "m"), UnknownElement);
}

TEST_CASE("fiber examples") {
    auto c = constant_encoding(share(Grid({{q(0), q(1)}, {q(3)}})));
    CHECK(fiber(c, "*") == CellSet::all(c.grid));

    auto e = quadrant();
    const Coordinate corner[2] = {q(0), q(0)};
    CHECK(fiber(e, "b") == principal_upset(corner));
    CHECK(is_fixed_by_closures(fiber(e, "b")));
    CHECK(fiber(e, "a") == ~principal_upset(corner));
    CHECK_THROWS_AS(fiber(e, "zzz"), UnknownElement);
}

TEST_CASE("common_encoding examples") {
    SUBCASE("with the trivial constant encoding") {
        auto e = quadrant();
        auto c = common_encoding(e, constant_encoding(share(Grid::trivial(2))));
        CHECK(c.encoding.target->size() == e.target->size());
        for (std::size_t x = 0; x < c.encoding.target->size(); ++x)
            for (std::size_t y = 0; y < c.encoding.target->size(); ++y)
                CHECK(c.encoding.target->leq(x, y) == e.target->leq(c.to_first(x), c.to_first(y)));
        CHECK(fiber(c.encoding, "(b,*)") == fiber(e, "b"));
    }
    SUBCASE("two steps") {
        auto c = common_encoding(step(0), step(1));
        const auto& t = *c.encoding.target;
        REQUIRE(t.size() == 3);
        const auto aa = t.index_of("(a,a)"), ba = t.index_of("(b,a)"), bb = t.index_of("(b,b)");
        CHECK(t.leq(aa, ba));
        CHECK(t.leq(ba, bb));
        CHECK_FALSE(t.find("(a,b)"));
        const Rational pts[] = {q(-1), q(0), q(1, 2), q(1), q(5)};
        const std::size_t expect[] = {aa, ba, ba, bb, bb};
        for (std::size_t i = 0; i < 5; ++i) CHECK(c.encoding.element_at(std::span(&pts[i], 1)) == expect[i]);
    }
    SUBCASE("with itself") {
        auto e = quadrant();
        auto c = common_encoding(e, e);
        CHECK(c.encoding.target->size() == 2);
        CHECK(c.encoding.target->find("(a,a)"));
        CHECK(c.encoding.target->find("(b,b)"));
    }
    CHECK_THROWS_AS(common_encoding(quadrant(), step(0)), DimensionMismatch);
}

TEST_CASE("connective_refinement examples") {
    SUBCASE("connected fibers are kept") {
        auto e = quadrant();
        auto r = connective_refinement(e);
        CHECK(r.encoding.target->size() == 2);
        CHECK(r.encoding.target->ids() == e.target->ids());
    }
    SUBCASE("incomparable quadrant translates split") {
        const Coordinate c1[2] = {q(0), q(2)}, c2[2] = {q(2), q(0)}, w[2] = {q(1), q(1)};
        const auto u = principal_upset(c1) | principal_upset(c2);
        const auto top = principal_upset(w);
        auto e = encoding_from_fibers(share(Grid::trivial(2)), share(FinitePoset::chain({"a", "b", "c"})),
                                      {{"b", u - top}, {"c", top}}, "a");
        CHECK(validate_encoding(e).pruned.empty());
        CHECK(leq_components_cells(fiber(e, "b")).size() == 2);
        auto r = connective_refinement(e);
        CHECK(r.encoding.target->size() == 4);
        CHECK(r.encoding.target->find("b#0"));
        CHECK(r.encoding.target->find("b#1"));
        CHECK_FALSE(r.encoding.target->comparable(r.encoding.target->index_of("b#0"),
                                                  r.encoding.target->index_of("b#1")));
    }
    SUBCASE("antidiagonal") {
        for (std::size_t k = 2; k <= 6; ++k) {
            auto e = antidiagonal_encoding(k);
            CHECK(validate_encoding(e).pruned.empty());
            auto r = connective_refinement(e);
            CHECK(r.encoding.target->size() == k + 2);
            std::size_t diag = 0;
            for (std::size_t x = 0; x < r.encoding.target->size(); ++x)
                if (e.target->id(r.to_original(x)) == "diag") ++diag;
            CHECK(diag == k);
        }
    }
}

TEST_CASE("fibers_in_closed_class examples") {
    CHECK(fibers_in_closed_class(quadrant()).pass);
    CHECK(fibers_in_closed_class(quadrant()).exact);
    CHECK(fibers_in_closed_class(constant_encoding(share(Grid::trivial(3)))).pass);

    const Coordinate lo[2] = {q(1), q(1)};
    const auto box = principal_upset(lo) - open_upset(share(Grid::trivial(2)), std::array<Coordinate, 2>{q(2), q(2)});
    const auto above = up_closure(box) - box;
    auto e = encoding_from_fibers(share(Grid::trivial(2)), share(FinitePoset::chain({"lo", "box", "hi"})),
                                  {{"box", box}, {"hi", above}}, "lo");
    auto report = fibers_in_closed_class(e);
    CHECK_FALSE(report.pass);
    CHECK_FALSE(report.fibers[1].pass);
    CHECK(report.fibers[1].interval);
}

TEST_CASE("json and dot") {
    auto e = quadrant();
    auto j = to_json(e);
    auto back = encoding_from_json(j, nullptr);
    CHECK(*back.grid == *e.grid);
    CHECK(*back.target == *e.target);
    CHECK(back.label == e.label);

    auto fib = nlohmann::json::parse(R"({"poset": {"elements": ["a","b"], "relations": [["a","b"]]},
        "fibers": {"b": {"op": "upset", "point": ["0", "0"]}}, "default": "a"})");
    auto e2 = encoding_from_json(fib, nullptr);
    CHECK(fiber(e2, "b") == fiber(e, "b"));

    auto missing = nlohmann::json::parse(R"({"grid": [["0"]], "labels": [[[0], "a"]]})");
    CHECK_THROWS_AS(encoding_from_json(missing, e.target), ParseError);
    CHECK(to_dot(e).find("cells") != std::string::npos);
}

TEST_CASE("encoding properties on random closed-class encodings") {
    Rng rng(2024);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t dim = 1 + uniform_index(rng, 3);
        auto g1 = share(random_grid(rng, dim, 3));
        auto g2 = share(random_grid(rng, dim, 3));
        auto e1 = random_closed_encoding(rng, g1);
        auto e2 = random_closed_encoding(rng, g2);
        REQUIRE_NOTHROW(validate_encoding(e1));

        // Fibers partition the cells.
        Subset seen(g1->cell_count());
        for (const auto& f : all_fibers(e1)) {
            CHECK_FALSE(f.members().intersects(seen));
            seen |= f.members();
        }
        CHECK(seen.all());

        // Preimages of target upsets are upsets.
        const auto& t = *e1.target;
        for (std::size_t x = 0; x < t.size(); ++x) CHECK(preimage_is_upset(e1, t.up(x)));

        auto c = common_encoding(e1, e2);
        CHECK(validate_encoding(c.encoding).pruned.empty());
        for (std::size_t x = 0; x < c.encoding.target->size(); ++x) {
            const auto expect = fiber(e1, c.to_first(x)) & fiber(e2, c.to_second(x));
            CHECK(fiber(c.encoding, x) == expect);
        }

        auto r = connective_refinement(c.encoding);
        CHECK(check_ff_conditions(r.encoding.cell_map()));
        for (std::size_t cell = 0; cell < r.encoding.label.size(); ++cell)
            CHECK(r.to_original(r.encoding.label[cell]) == c.encoding.label[cell]);
        for (const auto& f : all_fibers(r.encoding)) {
            CHECK(leq_components_cells(f).size() == 1);
            CHECK(is_fixed_by_closures(f));
        }
        auto rr = connective_refinement(r.encoding);
        CHECK(rr.encoding.target->size() == r.encoding.target->size());
        CHECK(fibers_in_closed_class(r.encoding).pass);
    }
}
