#include <doctest.h>

#include <set>

#include "tame/error.hpp"
#include "tame/random.hpp"
#include "tame/staircase.hpp"

using namespace tame;

namespace {

GridPtr grid(std::vector<std::vector<std::int64_t>> bps) {
    std::vector<std::vector<Rational>> r;
    for (auto& axis : bps) {
        auto& out = r.emplace_back();
        for (auto t : axis) out.emplace_back(t);
    }
    return share(Grid(std::move(r)));
}

std::vector<Coordinate> corner(std::initializer_list<std::optional<std::int64_t>> xs) {
    std::vector<Coordinate> c;
    for (auto x : xs) c.push_back(x ? Coordinate(Rational(*x)) : std::nullopt);
    return c;
}

CellSet upset_at(std::initializer_list<std::optional<std::int64_t>> xs) { return principal_upset(corner(xs)); }

// Half-open box [lo, hi) or closed box [lo, hi] in 2-d over the integers.
CellSet box(std::int64_t lo, std::int64_t hi, bool closed) {
    auto g = grid({{lo, hi}, {lo, hi}});
    CellSet s(g);
    for (std::size_t x = 1; x <= (closed ? 3u : 2u); ++x)
        for (std::size_t y = 1; y <= (closed ? 3u : 2u); ++y) {
            const std::size_t at[2] = {x, y};
            s.insert(g->cell_of(at));
        }
    return s;
}

std::set<Subset> partition_of(const std::vector<CellSet>& parts) {
    std::set<Subset> out;
    for (const auto& p : parts) out.insert(p.members());
    return out;
}

}  // namespace

TEST_CASE("grid atoms and locate") {
    auto g = grid({{0, 2}});
    CHECK(g->atoms(0) == 5);
    CHECK(g->describe_atom(0, 0) == "(-inf,0)");
    CHECK(g->describe_atom(0, 1) == "{0}");
    CHECK(g->describe_atom(0, 2) == "(0,2)");
    CHECK(g->describe_atom(0, 4) == "(2,inf)");
    const Rational one(1), two(2), three(3), neg(-1);
    CHECK(g->locate(std::span(&neg, 1)) == 0);
    CHECK(g->locate(std::span(&one, 1)) == 2);
    CHECK(g->locate(std::span(&two, 1)) == 3);
    CHECK(g->locate(std::span(&three, 1)) == 4);
    CHECK_THROWS_AS(Grid({{Rational(1), Rational(0)}}), InvalidArgument);
    CHECK(parse_rational("-3/6") == Rational(-1, 2));
    CHECK(format_rational(Rational(3, 4)) == "3/4");
    CHECK_THROWS_AS(parse_rational("1/0"), ParseError);
    CHECK_THROWS_AS(parse_rational("x"), ParseError);
}

TEST_CASE("cell order matches the order of points") {
    Rng rng(31);
    for (int trial = 0; trial < 30; ++trial) {
        auto g = share(random_grid(rng, 1 + uniform_index(rng, 3), 3));
        for (int k = 0; k < 50; ++k) {
            const auto a = uniform_index(rng, g->cell_count());
            const auto b = uniform_index(rng, g->cell_count());
            const auto x = g->representative(a), y = g->representative(b);
            bool pointwise = true;
            for (std::size_t i = 0; i < x.size(); ++i) pointwise = pointwise && x[i] <= y[i];
            CHECK(g->cell_leq(a, b) == pointwise);
            CHECK(g->locate(x) == a);
        }
    }
}

TEST_CASE("merge_grids") {
    auto g = grid({{0, 1}, {}});
    auto same = merge_grids(g, g);
    CHECK(*same.grid == *g);
    for (std::size_t c = 0; c < g->cell_count(); ++c) CHECK(same.to_first[c] == c);

    auto m = merge_grids(grid({{1}}), grid({{2}}));
    CHECK(*m.grid == *grid({{1, 2}}));
    CHECK(m.to_first[2] == 2);   // (1,2) lies in (1,inf) of {1}
    CHECK(m.to_second[2] == 0);  // and in (-inf,2) of {2}
    CHECK(m.to_first[3] == 2);
    CHECK(m.to_second[3] == 1);

    CHECK(*merge_grids(grid({{}}), grid({{0}})).grid == *grid({{0}}));
    CHECK_THROWS_AS(merge_grids(grid({{}}), grid({{}, {}})), DimensionMismatch);
}

TEST_CASE("refinement maps are monotone with connected fibers") {
    Rng rng(37);
    for (int trial = 0; trial < 25; ++trial) {
        const auto dim = 1 + uniform_index(rng, 2);
        auto a = share(random_grid(rng, dim, 2));
        auto b = share(random_grid(rng, dim, 2));
        auto m = merge_grids(a, b);
        auto fine = share(cell_poset(*m.grid));
        auto coarse = share(cell_poset(*a));
        const auto map = MonotoneMap::make(fine, coarse, m.to_first);
        for (std::size_t q = 0; q < coarse->size(); ++q) {
            Subset fib = fine->empty_subset();
            for (auto x : map.fiber(q)) fib.set(x);
            CHECK(leq_components(*fine, fib).size() == 1);
        }
    }
}

TEST_CASE("boolean operations") {
    Rng rng(41);
    auto g = share(random_grid(rng, 2, 3));
    auto s = random_cellset(rng, g, 0.4);
    CHECK((s | ~s).count() == g->cell_count());
    CHECK((s & ~s).empty());

    // [0,inf) minus (-inf,0] is (0,inf).
    auto g1 = grid({{0}});
    auto closed_up = upset_at({0});
    auto closed_down = down_closure(CellSet::from_atoms(g1, {{1}}));
    auto result = closed_up & ~closed_down;
    CHECK(result == CellSet::from_atoms(g1, {{2}}));

    // Auto-merge: sets over different grids compare as point sets.
    auto a = upset_at({0});
    auto b = principal_upset(grid({{-1, 0, 5}}), corner({0}));
    CHECK(a == b);
    CHECK_FALSE(a == upset_at({1}));
}

TEST_CASE("boolean algebra laws") {
    Rng rng(43);
    for (int trial = 0; trial < 100; ++trial) {
        auto g = share(random_grid(rng, 1 + uniform_index(rng, 3), 3));
        auto a = random_cellset(rng, g, 0.5);
        auto b = random_cellset(rng, share(random_grid(rng, g->dim(), 3)), 0.5);
        auto c = random_cellset(rng, g, 0.3);
        CHECK(~(a | b) == (~a & ~b));
        CHECK(~(a & b) == (~a | ~b));
        CHECK((a | a) == a);
        CHECK((a & (a | b)) == a);
        CHECK((a | (a & b)) == a);
        CHECK((a & (b | c)) == ((a & b) | (a & c)));
        CHECK(~~a == a);
    }
}

TEST_CASE("principal_upset") {
    CHECK(upset_at({std::nullopt}).count() == 1);
    auto q = upset_at({0, 0});
    CHECK(q.count() == 4);
    CHECK(q == CellSet::from_atoms(q.grid(), {{1, 1}, {1, 2}, {2, 1}, {2, 2}}));
    auto half = upset_at({0, std::nullopt});
    CHECK(*half.grid() == *grid({{0}, {}}));
    CHECK(half == CellSet::from_atoms(half.grid(), {{1, 0}, {2, 0}}));
    CHECK(is_upset(q));
    CHECK(closure(q) == q);
}

TEST_CASE("up and down closure") {
    auto q = upset_at({0, 0});
    CHECK(up_closure(q) == q);
    auto g = grid({{0}});
    auto zero = CellSet::from_atoms(g, {{1}});
    CHECK(up_closure(zero) == CellSet::from_atoms(g, {{1}, {2}}));
    CHECK(down_closure(zero) == CellSet::from_atoms(g, {{0}, {1}}));

    auto g2 = grid({{0, 1}, {0, 1}});
    auto pts = CellSet::from_atoms(g2, {{1, 3}, {3, 1}});
    CHECK(up_closure(pts) == (upset_at({0, 1}) | upset_at({1, 0})));
}

TEST_CASE("upset, downset and interval tests") {
    CHECK(is_upset(upset_at({1, 2})));
    auto g = grid({{0, 1}});
    CellSet empty(g);
    CHECK(is_upset(empty));
    CHECK(is_downset(empty));
    CHECK(is_interval(empty));
    CHECK_FALSE(is_interval(CellSet::from_atoms(g, {{1}, {4}})));
}

TEST_CASE("underline") {
    auto g = grid({{0}});
    CHECK(underline(CellSet::from_atoms(g, {{2}})) == CellSet::from_atoms(g, {{1}, {2}}));
    auto q = upset_at({0, 0});
    CHECK(underline(q) == q);
    auto g2 = grid({{0}, {0}});
    CHECK(underline(CellSet::from_atoms(g2, {{2, 2}})) == q);
    // Approach from above only: the open interval (0,1) gains 0 but not 1.
    auto g3 = grid({{0, 1}});
    CHECK(underline(CellSet::from_atoms(g3, {{2}})) == CellSet::from_atoms(g3, {{1}, {2}}));
}

TEST_CASE("tilde") {
    auto g = grid({{0}});
    CHECK(tilde(CellSet::from_atoms(g, {{0}, {1}})) == CellSet::from_atoms(g, {{0}}));
    auto g2 = grid({{0, 1}});
    auto half_open = CellSet::from_atoms(g2, {{1}, {2}});
    CHECK(tilde(half_open) == half_open);
    CHECK(tilde(CellSet::all(g2)) == CellSet::all(g2));
}

TEST_CASE("serial references agree with the sweep kernels") {
    Rng rng(47);
    for (int trial = 0; trial < 150; ++trial) {
        auto g = share(random_grid(rng, 1 + uniform_index(rng, 3), 4));
        auto s = random_cellset(rng, g, 0.1 + 0.3 * static_cast<double>(uniform_index(rng, 3)));
        CHECK(up_closure(s) == serial::up_closure(s));
        CHECK(down_closure(s) == serial::down_closure(s));
        CHECK(underline(s) == serial::underline(s));
        CHECK(partition_of(leq_components_cells(s)) == partition_of(serial::leq_components_cells(s)));
    }
}

TEST_CASE("underline and tilde are monotone and underline commutes with unions") {
    Rng rng(53);
    for (int trial = 0; trial < 100; ++trial) {
        auto g = share(random_grid(rng, 1 + uniform_index(rng, 3), 3));
        auto a = random_cellset(rng, g, 0.3);
        auto b = random_cellset(rng, g, 0.3);
        auto ab = a | b;
        CHECK(underline(a).subset_of(underline(ab)));
        CHECK(tilde(a).subset_of(tilde(ab)));
        CHECK(underline(ab) == (underline(a) | underline(b)));
        CHECK(a.subset_of(underline(a)));
        CHECK(tilde(a).subset_of(a));
    }
}

TEST_CASE("leq_components_cells") {
    auto g = grid({{0, 1, 2}, {0, 1, 2}});
    auto diag = CellSet::from_atoms(g, {{1, 5}, {3, 3}, {5, 1}});
    CHECK(leq_components_cells(diag).size() == 3);
    CHECK(leq_components_cells(upset_at({0, 1}) | upset_at({1, 0})).size() == 1);
    CHECK(leq_components_cells(CellSet(g)).empty());
}

TEST_CASE("topological_components") {
    auto g = grid({{0}});
    CHECK(topological_components(CellSet::from_atoms(g, {{0}, {2}})).size() == 2);
    auto g2 = grid({{0, 1, 2}});
    CHECK(topological_components(CellSet::from_atoms(g2, {{1}, {2}, {3}, {4}, {5}})).size() == 1);
    auto g3 = grid({{0, 1, 2}, {0, 1, 2}});
    CHECK(topological_components(CellSet::from_atoms(g3, {{1, 5}, {3, 3}, {5, 1}})).size() == 3);
    // Open cells meeting only at a corner point that is not in the set.
    auto g4 = grid({{0}, {0}});
    CHECK(topological_components(CellSet::from_atoms(g4, {{0, 0}, {2, 2}})).size() == 2);
    CHECK(topological_components(CellSet::from_atoms(g4, {{0, 0}, {1, 1}, {2, 2}})).size() == 1);
    CHECK(topological_components(CellSet::from_atoms(g4, {{2, 0}, {0, 2}})).size() == 2);
}

TEST_CASE("closed_interval_decompose") {
    auto q = upset_at({0, 0});
    auto d = closed_interval_decompose(q);
    CHECK(d.upper == q);
    CHECK(d.lower.empty());

    auto half_open = box(1, 2, false);
    auto hd = closed_interval_decompose(half_open);
    CHECK(hd.upper == upset_at({1, 1}));
    CHECK(hd.lower == (upset_at({2, std::nullopt}) | upset_at({std::nullopt, 2})));
    CHECK((hd.upper - hd.lower) == half_open);

    CHECK_THROWS_AS(closed_interval_decompose(box(1, 2, true)), NotClosedClass);
    auto g = grid({{0, 1}});
    CHECK_THROWS_AS(closed_interval_decompose(CellSet::from_atoms(g, {{1}, {4}})), NotInterval);
}

TEST_CASE("is_closed_class_interval") {
    CHECK(is_closed_class_interval(upset_at({3, std::nullopt})));
    CHECK(is_closed_class_interval(box(1, 2, false)));
    CHECK_FALSE(is_closed_class_interval(box(1, 2, true)));
    auto g = grid({{0, 1}});
    CHECK_THROWS_AS(is_closed_class_interval(CellSet::from_atoms(g, {{1}, {4}})), NotInterval);
}

TEST_CASE("json sets and expressions") {
    auto j = nlohmann::json::parse(R"({
        "op": "difference",
        "args": [{"op": "upset", "point": ["0", "0"]}, {"op": "upset", "point": ["1", "1"]}]
    })");
    auto l = cellset_from_json(j);
    CHECK(l == (upset_at({0, 0}) - upset_at({1, 1})));
    CHECK(cellset_from_json(to_json(l)) == l);
    auto half = cellset_from_json(nlohmann::json::parse(R"({"op": "upset", "point": ["1/2", "-inf"]})"));
    const Rational inside[2] = {Rational(1, 2), Rational(-100)};
    CHECK(half.contains_point(inside));
    CHECK_THROWS_AS(cellset_from_json(nlohmann::json::parse(R"({"op": "xor", "args": [{"op":"all","dim":1}]})")),
                    ParseError);
    CHECK(render_ascii(upset_at({0, 0})) == ".##\n.##\n...\n");
}
