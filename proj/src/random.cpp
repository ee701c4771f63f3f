#include "tame/random.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace tame {

FinitePoset random_poset(Rng& rng, std::size_t n, double density) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[uniform_index(rng, i)]);
    std::vector<Relation> gen;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (coin(rng, density)) gen.emplace_back(order[i], order[j]);
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < n; ++i) ids.push_back("p" + std::to_string(i));
    return FinitePoset::from_relations(std::move(ids), gen);
}

MonotoneMap random_monotone_map(Rng& rng, const PosetPtr& source, const PosetPtr& target) {
    const auto& s = *source;
    const auto& t = *target;
    for (int attempt = 0; attempt < 64; ++attempt) {
        std::vector<std::size_t> a(s.size());
        bool ok = true;
        for (auto x : s.topological_order()) {
            Subset allowed = t.full_subset();
            for (auto e : s.covers_into(x)) allowed &= t.up(a[s.covers()[e].first]);
            const auto count = allowed.count();
            if (count == 0) {
                ok = false;
                break;
            }
            auto pick = uniform_index(rng, count);
            auto q = allowed.find_first();
            while (pick--) q = allowed.find_next(q);
            a[x] = q;
        }
        if (ok) return MonotoneMap::make(source, target, std::move(a));
    }
    return MonotoneMap::make(source, target, std::vector<std::size_t>(s.size(), uniform_index(rng, t.size())));
}

Grid random_grid(Rng& rng, std::size_t dim, std::size_t max_breakpoints) {
    std::vector<std::vector<Rational>> bp(dim);
    for (auto& axis : bp) {
        const auto k = uniform_index(rng, max_breakpoints + 1);
        while (axis.size() < k) {
            Rational t(static_cast<std::int64_t>(uniform_index(rng, 2 * max_breakpoints + 1)));
            if (coin(rng, 0.2)) t += Rational(1, 2);
            if (std::find(axis.begin(), axis.end(), t) == axis.end()) axis.push_back(t);
        }
        std::sort(axis.begin(), axis.end());
    }
    return Grid(std::move(bp));
}

CellSet random_cellset(Rng& rng, const GridPtr& grid, double density) {
    CellSet s(grid);
    for (std::size_t c = 0; c < grid->cell_count(); ++c)
        if (coin(rng, density)) s.insert(c);
    return s;
}

CellSet random_closed_upset(Rng& rng, const GridPtr& grid, std::size_t max_corners) {
    CellSet s(grid);
    const auto corners = 1 + uniform_index(rng, max_corners);
    for (std::size_t k = 0; k < corners; ++k) {
        std::vector<Coordinate> corner(grid->dim());
        for (std::size_t i = 0; i < grid->dim(); ++i) {
            const auto& bp = grid->breakpoints(i);
            const auto pick = uniform_index(rng, bp.size() + 1);
            if (pick < bp.size()) corner[i] = bp[pick];
        }
        s = s | principal_upset(grid, corner);
    }
    return s;
}

CellSet random_upset(Rng& rng, const GridPtr& grid) {
    return up_closure(random_cellset(rng, grid, 2.0 / static_cast<double>(grid->cell_count() + 1)));
}

CellSet random_downset(Rng& rng, const GridPtr& grid) {
    return down_closure(random_cellset(rng, grid, 2.0 / static_cast<double>(grid->cell_count() + 1)));
}

Encoding random_closed_encoding(Rng& rng, const GridPtr& grid, std::size_t max_upsets) {
    const auto m = 1 + uniform_index(rng, max_upsets);
    std::vector<CellSet> upsets;
    for (std::size_t k = 0; k < m; ++k) upsets.push_back(random_closed_upset(rng, grid).refined_to(grid));

    std::vector<std::string> patterns(grid->cell_count());
    for (std::size_t c = 0; c < patterns.size(); ++c) {
        std::string bits = "u";
        for (const auto& u : upsets) bits += u.contains(c) ? '1' : '0';
        patterns[c] = std::move(bits);
    }
    std::vector<std::string> ids = patterns;
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

    auto included = [](const std::string& a, const std::string& b) {
        for (std::size_t i = 1; i < a.size(); ++i)
            if (a[i] == '1' && b[i] == '0') return false;
        return true;
    };
    std::vector<Relation> rel;
    for (std::size_t a = 0; a < ids.size(); ++a)
        for (std::size_t b = 0; b < ids.size(); ++b)
            if (a != b && included(ids[a], ids[b])) rel.emplace_back(a, b);
    auto target = share(FinitePoset::from_relations(ids, rel));
    std::vector<std::size_t> label(patterns.size());
    for (std::size_t c = 0; c < label.size(); ++c) label[c] = target->index_of(patterns[c]);
    return Encoding{grid, target, std::move(label)};
}

Subset random_interval(Rng& rng, const FinitePoset& p) {
    Subset lo(p.size()), hi(p.size());
    lo.set(uniform_index(rng, p.size()));
    hi.set(uniform_index(rng, p.size()));
    for (std::size_t x = 0; x < p.size(); ++x) {
        if (coin(rng, 0.15)) lo.set(x);
        if (coin(rng, 0.15)) hi.set(x);
    }
    return upset_of(p, lo) & downset_of(p, hi);
}

std::pair<Matrix, Matrix> random_invertible(Rng& rng, std::size_t n, Prime p) {
    for (;;) {
        Matrix g(n, n, p);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) g(i, j) = static_cast<std::uint32_t>(rng() % p);
        if (rank(g) == n) return {g, solve_in_span(g, Matrix::identity(n, p))};
    }
}

PfdModule random_module(Rng& rng, const PosetPtr& base, std::size_t max_dim, Prime p) {
    const auto& P = *base;
    const auto summands = 1 + uniform_index(rng, std::max<std::size_t>(max_dim, 1));
    std::vector<Subset> intervals;
    for (std::size_t k = 0; k < summands; ++k) intervals.push_back(random_interval(rng, P));

    // Position of summand k inside the space at x, if x lies in it.
    std::vector<std::size_t> dims(P.size(), 0);
    std::vector<std::vector<std::size_t>> slot(P.size(), std::vector<std::size_t>(summands, 0));
    for (std::size_t x = 0; x < P.size(); ++x)
        for (std::size_t k = 0; k < summands; ++k)
            if (intervals[k].test(x)) slot[x][k] = dims[x]++;

    std::vector<std::pair<Matrix, Matrix>> change;
    for (std::size_t x = 0; x < P.size(); ++x) change.push_back(random_invertible(rng, dims[x], p));

    std::vector<Matrix> maps;
    for (auto [a, b] : P.covers()) {
        Matrix m(dims[b], dims[a], p);
        for (std::size_t k = 0; k < summands; ++k)
            if (intervals[k].test(a) && intervals[k].test(b)) m(slot[b][k], slot[a][k]) = 1;
        maps.push_back(change[b].first * m * change[a].second);
    }
    return PfdModule(base, std::move(dims), std::move(maps), p);
}

Morphism random_morphism(Rng& rng, const PfdModule& m, const PfdModule& n) {
    const auto hom = hom_space(m, n);
    std::vector<long long> coeffs(hom.dimension);
    for (auto& c : coeffs) c = static_cast<long long>(rng() % m.prime());
    return combine(hom, m, n, coeffs);
}

Grid random_subgrid(Rng& rng, const Grid& grid) {
    std::vector<std::vector<Rational>> bp(grid.dim());
    for (std::size_t i = 0; i < grid.dim(); ++i)
        for (const auto& t : grid.breakpoints(i))
            if (coin(rng, 0.7)) bp[i].push_back(t);
    return Grid(std::move(bp));
}

EncodedModule random_encoded_module(Rng& rng, const Grid& grid, std::size_t max_dim, Prime p) {
    auto e = random_closed_encoding(rng, share(random_subgrid(rng, grid)));
    auto m = random_module(rng, e.target, max_dim, p);
    return EncodedModule{std::move(e), std::move(m)};
}

}  // namespace tame
