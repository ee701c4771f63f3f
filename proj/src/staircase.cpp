#include "tame/staircase.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <sstream>

#include "tame/error.hpp"
#include "tame/parallel.hpp"

namespace tame {

Rational parse_rational(const std::string& text) {
    auto parse_int = [&](const std::string& s) -> std::int64_t {
        if (s.empty()) throw ParseError("malformed rational '" + text + "'");
        std::size_t used = 0;
        long long v = 0;
        try {
            v = std::stoll(s, &used);
        } catch (const std::exception&) {
            throw ParseError("malformed rational '" + text + "'");
        }
        if (used != s.size()) throw ParseError("malformed rational '" + text + "'");
        return v;
    };
    const auto slash = text.find('/');
    if (slash == std::string::npos) return Rational(parse_int(text));
    const auto den = parse_int(text.substr(slash + 1));
    if (den == 0) throw ParseError("zero denominator in '" + text + "'");
    return Rational(parse_int(text.substr(0, slash)), den);
}

Coordinate parse_coordinate(const std::string& text) {
    if (text == "-inf") return std::nullopt;
    return parse_rational(text);
}

std::string format_rational(const Rational& r) {
    if (r.denominator() == 1) return std::to_string(r.numerator());
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

// ---------------------------------------------------------------- Grid

Grid::Grid(std::vector<std::vector<Rational>> breakpoints) : breakpoints_(std::move(breakpoints)) {
    if (breakpoints_.empty()) throw InvalidArgument("grid dimension must be at least 1");
    for (const auto& axis : breakpoints_)
        for (std::size_t j = 1; j < axis.size(); ++j)
            if (!(axis[j - 1] < axis[j])) throw InvalidArgument("grid breakpoints must be strictly increasing");
    strides_.assign(dim(), 1);
    for (std::size_t i = dim(); i-- > 0;) {
        strides_[i] = cell_count_;
        cell_count_ *= atoms(i);
    }
}

std::vector<std::size_t> Grid::atoms_of(std::size_t cell) const {
    std::vector<std::size_t> a(dim());
    for (std::size_t i = 0; i < dim(); ++i) a[i] = atom(cell, i);
    return a;
}

std::size_t Grid::cell_of(std::span<const std::size_t> atom_indices) const {
    if (atom_indices.size() != dim()) throw DimensionMismatch("cell tuple has wrong length");
    std::size_t c = 0;
    for (std::size_t i = 0; i < dim(); ++i) {
        if (atom_indices[i] >= atoms(i)) throw InvalidArgument("atom index out of range");
        c += atom_indices[i] * strides_[i];
    }
    return c;
}

std::size_t Grid::atom_of_value(std::size_t axis, const Rational& t) const {
    const auto& bp = breakpoints_.at(axis);
    const auto j = static_cast<std::size_t>(std::lower_bound(bp.begin(), bp.end(), t) - bp.begin());
    if (j < bp.size() && bp[j] == t) return 2 * j + 1;
    return 2 * j;
}

std::size_t Grid::locate(std::span<const Rational> point) const {
    if (point.size() != dim()) throw DimensionMismatch("point has wrong dimension");
    std::size_t c = 0;
    for (std::size_t i = 0; i < dim(); ++i) c += atom_of_value(i, point[i]) * strides_[i];
    return c;
}

std::vector<Rational> Grid::representative(std::size_t cell) const {
    std::vector<Rational> x(dim());
    for (std::size_t i = 0; i < dim(); ++i) {
        const auto a = atom(cell, i);
        const auto& bp = breakpoints_[i];
        if (a % 2 == 1) {
            x[i] = bp[a / 2];
        } else if (bp.empty()) {
            x[i] = 0;
        } else if (a == 0) {
            x[i] = bp.front() - 1;
        } else if (a == 2 * bp.size()) {
            x[i] = bp.back() + 1;
        } else {
            x[i] = (bp[a / 2 - 1] + bp[a / 2]) / 2;
        }
    }
    return x;
}

bool Grid::cell_leq(std::size_t a, std::size_t b) const {
    for (std::size_t i = 0; i < dim(); ++i)
        if (atom(a, i) > atom(b, i)) return false;
    return true;
}

std::string Grid::describe_atom(std::size_t axis, std::size_t a) const {
    const auto& bp = breakpoints_.at(axis);
    if (a % 2 == 1) return "{" + format_rational(bp[a / 2]) + "}";
    const std::string lo = a == 0 ? "-inf" : format_rational(bp[a / 2 - 1]);
    const std::string hi = a == 2 * bp.size() ? "inf" : format_rational(bp[a / 2]);
    return "(" + lo + "," + hi + ")";
}

std::string Grid::describe_cell(std::size_t cell) const {
    std::string out;
    for (std::size_t i = 0; i < dim(); ++i) {
        if (i) out += "x";
        out += describe_atom(i, atom(cell, i));
    }
    return out;
}

FinitePoset cell_poset(const Grid& g) {
    std::vector<std::string> ids;
    ids.reserve(g.cell_count());
    std::vector<Relation> gen;
    for (std::size_t c = 0; c < g.cell_count(); ++c) {
        std::string id = "c[";
        for (std::size_t i = 0; i < g.dim(); ++i) {
            if (i) id += ",";
            const auto a = g.atom(c, i);
            id += std::to_string(a);
            if (a + 1 < g.atoms(i)) gen.emplace_back(c, c + g.stride(i));
        }
        ids.push_back(id + "]");
    }
    return FinitePoset::from_relations(std::move(ids), gen);
}

CellMap refinement_map(const Grid& fine, const Grid& coarse) {
    if (fine.dim() != coarse.dim()) throw DimensionMismatch("grids of different dimension");
    std::vector<std::vector<std::size_t>> axis_maps(fine.dim());
    for (std::size_t i = 0; i < fine.dim(); ++i) {
        const auto& f = fine.breakpoints(i);
        const auto& c = coarse.breakpoints(i);
        for (const auto& t : c)
            if (!std::binary_search(f.begin(), f.end(), t))
                throw InvalidArgument("refinement_map: fine grid lacks a coarse breakpoint");
        auto& m = axis_maps[i];
        m.resize(fine.atoms(i));
        for (std::size_t a = 0; a < m.size(); ++a) {
            if (a % 2 == 1) {
                m[a] = coarse.atom_of_value(i, f[a / 2]);
            } else if (a == 0) {
                m[a] = 0;
            } else {
                const auto& lower = f[a / 2 - 1];
                m[a] = 2 * static_cast<std::size_t>(std::upper_bound(c.begin(), c.end(), lower) - c.begin());
            }
        }
    }
    CellMap out(fine.cell_count());
    for (std::size_t cell = 0; cell < out.size(); ++cell) {
        std::size_t target = 0;
        for (std::size_t i = 0; i < fine.dim(); ++i) target += axis_maps[i][fine.atom(cell, i)] * coarse.stride(i);
        out[cell] = target;
    }
    return out;
}

GridMerge merge_grids(const GridPtr& first, const GridPtr& second) {
    if (first->dim() != second->dim())
        throw DimensionMismatch("cannot merge grids of dimension " + std::to_string(first->dim()) + " and " +
                                std::to_string(second->dim()));
    GridPtr merged;
    if (first == second || *first == *second) {
        merged = first;
    } else {
        std::vector<std::vector<Rational>> bp(first->dim());
        for (std::size_t i = 0; i < bp.size(); ++i) {
            const auto& a = first->breakpoints(i);
            const auto& b = second->breakpoints(i);
            std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(bp[i]));
        }
        merged = share(Grid(std::move(bp)));
    }
    return GridMerge{merged, refinement_map(*merged, *first), refinement_map(*merged, *second)};
}

// ---------------------------------------------------------------- CellSet

CellSet::CellSet(GridPtr grid) : grid_(std::move(grid)), members_(grid_->cell_count()) {}

CellSet::CellSet(GridPtr grid, Subset members) : grid_(std::move(grid)), members_(std::move(members)) {
    if (members_.size() != grid_->cell_count()) throw DimensionMismatch("cell bitset does not match grid");
}

CellSet CellSet::all(GridPtr grid) {
    CellSet s(std::move(grid));
    s.members_.set();
    return s;
}

CellSet CellSet::from_atoms(GridPtr grid, const std::vector<std::vector<std::size_t>>& cells) {
    CellSet s(std::move(grid));
    for (const auto& c : cells) s.insert(s.grid_->cell_of(c));
    return s;
}

std::vector<std::size_t> CellSet::cells() const {
    std::vector<std::size_t> out;
    for (auto c = members_.find_first(); c != Subset::npos; c = members_.find_next(c)) out.push_back(c);
    return out;
}

CellSet CellSet::refined_to(const GridPtr& finer) const {
    if (finer == grid_ || *finer == *grid_) return CellSet(finer, members_);
    const auto map = refinement_map(*finer, *grid_);
    Subset m(finer->cell_count());
    for (std::size_t c = 0; c < map.size(); ++c)
        if (members_.test(map[c])) m.set(c);
    return CellSet(finer, std::move(m));
}

std::pair<CellSet, CellSet> align(const CellSet& a, const CellSet& b) {
    if (a.grid() == b.grid() || *a.grid() == *b.grid()) return {a, CellSet(a.grid(), b.members())};
    const auto merged = merge_grids(a.grid(), b.grid());
    return {a.refined_to(merged.grid), b.refined_to(merged.grid)};
}

CellSet CellSet::operator~() const { return CellSet(grid_, ~members_); }

CellSet operator|(const CellSet& a, const CellSet& b) {
    auto [x, y] = align(a, b);
    return CellSet(x.grid(), x.members() | y.members());
}

CellSet operator&(const CellSet& a, const CellSet& b) {
    auto [x, y] = align(a, b);
    return CellSet(x.grid(), x.members() & y.members());
}

CellSet operator-(const CellSet& a, const CellSet& b) {
    auto [x, y] = align(a, b);
    return CellSet(x.grid(), x.members() - y.members());
}

bool operator==(const CellSet& a, const CellSet& b) {
    if (a.dim() != b.dim()) return false;
    auto [x, y] = align(a, b);
    return x.members() == y.members();
}

bool CellSet::subset_of(const CellSet& other) const {
    auto [x, y] = align(*this, other);
    return x.members().is_subset_of(y.members());
}

// ---------------------------------------------------------------- corners

namespace {

GridPtr corner_grid(const GridPtr& base, std::span<const Coordinate> corner) {
    if (corner.size() != base->dim()) throw DimensionMismatch("corner has wrong dimension");
    std::vector<std::vector<Rational>> bp(corner.size());
    bool any = false;
    for (std::size_t i = 0; i < corner.size(); ++i) {
        if (corner[i]) {
            bp[i].push_back(*corner[i]);
            any = true;
        }
    }
    if (!any) return base;
    return merge_grids(base, share(Grid(std::move(bp)))).grid;
}

CellSet orthant(const GridPtr& base, std::span<const Coordinate> corner, bool strict) {
    auto grid = corner_grid(base, corner);
    std::vector<std::size_t> first(grid->dim(), 0);
    for (std::size_t i = 0; i < grid->dim(); ++i)
        if (corner[i]) first[i] = grid->atom_of_value(i, *corner[i]) + (strict ? 1 : 0);
    CellSet s(grid);
    for (std::size_t c = 0; c < grid->cell_count(); ++c) {
        bool in = true;
        for (std::size_t i = 0; i < grid->dim() && in; ++i) in = grid->atom(c, i) >= first[i];
        if (in) s.insert(c);
    }
    return s;
}

}  // namespace

CellSet principal_upset(const GridPtr& base, std::span<const Coordinate> corner) {
    return orthant(base, corner, false);
}

CellSet principal_upset(std::span<const Coordinate> corner) {
    return orthant(share(Grid::trivial(corner.size())), corner, false);
}

CellSet open_upset(const GridPtr& base, std::span<const Coordinate> corner) { return orthant(base, corner, true); }

// ---------------------------------------------------------------- sweeps

namespace {

using Bytes = std::vector<std::uint8_t>;

Bytes to_bytes(const Subset& s) {
    Bytes b(s.size(), 0);
    for (auto c = s.find_first(); c != Subset::npos; c = s.find_next(c)) b[c] = 1;
    return b;
}

Subset from_bytes(const Bytes& b) {
    Subset s(b.size());
    for (std::size_t c = 0; c < b.size(); ++c)
        if (b[c]) s.set(c);
    return s;
}

// Calls f(first_cell, stride, length) on every line of cells parallel to the
// axis. Lines are disjoint, so they run in parallel.
template <class F>
void for_each_line(const Grid& g, std::size_t axis, F&& f) {
    const std::size_t stride = g.stride(axis);
    const std::size_t len = g.atoms(axis);
    const auto lines = static_cast<std::int64_t>(g.cell_count() / len);
    TAME_OMP_PRAGMA("omp parallel for schedule(static) if(lines > 256)")
    for (std::int64_t l = 0; l < lines; ++l) {
        const auto line = static_cast<std::size_t>(l);
        const std::size_t outer = line / stride;
        const std::size_t inner = line % stride;
        f(outer * stride * len + inner, stride, len);
    }
}

template <class Step>
CellSet sweep_all_axes(const CellSet& s, Step step) {
    const auto& g = *s.grid();
    Bytes b = to_bytes(s.members());
    for (std::size_t axis = 0; axis < g.dim(); ++axis)
        for_each_line(g, axis, [&](std::size_t first, std::size_t stride, std::size_t len) {
            step(b.data() + first, stride, len);
        });
    return CellSet(s.grid(), from_bytes(b));
}

}  // namespace

CellSet up_closure(const CellSet& s) {
    return sweep_all_axes(s, [](std::uint8_t* line, std::size_t stride, std::size_t len) {
        for (std::size_t k = 1; k < len; ++k) line[k * stride] |= line[(k - 1) * stride];
    });
}

CellSet down_closure(const CellSet& s) {
    return sweep_all_axes(s, [](std::uint8_t* line, std::size_t stride, std::size_t len) {
        for (std::size_t k = len - 1; k-- > 0;) line[k * stride] |= line[(k + 1) * stride];
    });
}

bool is_upset(const CellSet& s) { return up_closure(s).members() == s.members(); }
bool is_downset(const CellSet& s) { return down_closure(s).members() == s.members(); }
bool is_interval(const CellSet& s) {
    return (up_closure(s).members() & down_closure(s).members()) == s.members();
}

CellSet underline(const CellSet& s) {
    // Open atoms sit at even indices; the one at 2j (j >= 1) gains its lower
    // endpoint 2j-1. Point atoms only feed themselves.
    return sweep_all_axes(s, [](std::uint8_t* line, std::size_t stride, std::size_t len) {
        for (std::size_t k = 2; k < len; k += 2) line[(k - 1) * stride] |= line[k * stride];
    });
}

CellSet tilde(const CellSet& s) { return ~underline(~s); }

CellSet closure(const CellSet& s) {
    return sweep_all_axes(s, [](std::uint8_t* line, std::size_t stride, std::size_t len) {
        for (std::size_t k = 0; k < len; k += 2) {
            if (!line[k * stride]) continue;
            if (k > 0) line[(k - 1) * stride] = 1;
            if (k + 1 < len) line[(k + 1) * stride] = 1;
        }
    });
}

CellSet interior(const CellSet& s) { return ~closure(~s); }

bool is_fixed_by_closures(const CellSet& s) {
    return underline(s).members() == s.members() && tilde(s).members() == s.members();
}

// ---------------------------------------------------------------- components

namespace {

std::vector<CellSet> bfs_components(const CellSet& s, const std::vector<std::size_t>& cells,
                                    const std::vector<Subset>& adjacency) {
    // adjacency[i] is a bitset over positions in `cells`.
    const std::size_t m = cells.size();
    Subset unvisited(m);
    unvisited.set();
    std::vector<CellSet> comps;
    for (auto start = unvisited.find_first(); start != Subset::npos; start = unvisited.find_first()) {
        CellSet comp(s.grid());
        std::deque<std::size_t> queue{start};
        unvisited.reset(start);
        while (!queue.empty()) {
            const auto i = queue.front();
            queue.pop_front();
            comp.insert(cells[i]);
            const Subset fresh = adjacency[i] & unvisited;
            for (auto j = fresh.find_first(); j != Subset::npos; j = fresh.find_next(j)) queue.push_back(j);
            unvisited -= fresh;
        }
        comps.push_back(std::move(comp));
    }
    return comps;
}

}  // namespace

std::vector<CellSet> leq_components_cells(const CellSet& s) {
    const auto& g = *s.grid();
    const auto cells = s.cells();
    const std::size_t m = cells.size();
    const std::size_t n = g.dim();
    std::vector<std::size_t> atoms(m * n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t a = 0; a < n; ++a) atoms[i * n + a] = g.atom(cells[i], a);

    std::vector<Subset> adjacency(m, Subset(m));
    TAME_OMP_PRAGMA("omp parallel for schedule(dynamic, 16) if(m > 512)")
    for (std::int64_t ii = 0; ii < static_cast<std::int64_t>(m); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        const std::size_t* x = &atoms[i * n];
        for (std::size_t j = 0; j < m; ++j) {
            const std::size_t* y = &atoms[j * n];
            bool le = true, ge = true;
            for (std::size_t a = 0; a < n; ++a) {
                le = le && x[a] <= y[a];
                ge = ge && x[a] >= y[a];
            }
            if (le || ge) adjacency[i].set(j);
        }
    }
    return bfs_components(s, cells, adjacency);
}

std::vector<CellSet> topological_components(const CellSet& s) {
    const auto& g = *s.grid();
    const std::size_t n = g.dim();
    const auto cells = s.cells();
    std::vector<std::size_t> position(g.cell_count(), Subset::npos);
    for (std::size_t i = 0; i < cells.size(); ++i) position[cells[i]] = i;

    // closure(c) meets d iff on every axis d's atom equals c's or c's atom is
    // open and d's is an adjacent endpoint.
    auto meets_closure = [&](std::size_t c, std::size_t d) {
        for (std::size_t a = 0; a < n; ++a) {
            const auto ca = g.atom(c, a), da = g.atom(d, a);
            if (ca != da && !(ca % 2 == 0 && (ca + 1 == da || da + 1 == ca))) return false;
        }
        return true;
    };

    std::size_t offsets = 1;
    for (std::size_t a = 0; a < n; ++a) offsets *= 3;
    std::vector<Subset> adjacency(cells.size(), Subset(cells.size()));
    std::vector<std::size_t> at(n);
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto c = cells[i];
        for (std::size_t code = 0; code < offsets; ++code) {
            std::size_t rest = code;
            bool inside = true;
            for (std::size_t a = 0; a < n; ++a) {
                const auto delta = static_cast<long>(rest % 3) - 1;
                rest /= 3;
                const long v = static_cast<long>(g.atom(c, a)) + delta;
                if (v < 0 || v >= static_cast<long>(g.atoms(a))) inside = false;
                at[a] = static_cast<std::size_t>(std::max(v, 0L));
            }
            if (!inside) continue;
            const auto d = g.cell_of(at);
            const auto j = position[d];
            if (j == Subset::npos || j == i) continue;
            if (meets_closure(c, d) || meets_closure(d, c)) adjacency[i].set(j);
        }
    }
    return bfs_components(s, cells, adjacency);
}

// ---------------------------------------------------------------- intervals

IntervalDecomposition closed_interval_decompose(const CellSet& interval) {
    if (!is_interval(interval)) throw NotInterval("set is not an interval of R^n");
    const auto low = underline(interval);
    if (!(low.members() == interval.members())) {
        const auto witness = (low.members() - interval.members()).find_first();
        throw NotClosedClass("underline adds points to the interval",
                             {{"operator", "underline"}, {"cell", interval.grid()->describe_cell(witness)}});
    }
    const auto til = tilde(interval);
    if (!(til.members() == interval.members())) {
        const auto witness = (interval.members() - til.members()).find_first();
        throw NotClosedClass("tilde removes points from the interval",
                             {{"operator", "tilde"}, {"cell", interval.grid()->describe_cell(witness)}});
    }
    IntervalDecomposition d{underline(up_closure(interval)), underline(~down_closure(interval))};
    if (!((d.upper - d.lower) == interval)) throw std::logic_error("closed interval decomposition failed to reconstruct");
    return d;
}

bool is_closed_class_interval(const CellSet& interval) {
    if (!is_interval(interval)) throw NotInterval("set is not an interval of R^n");
    return is_fixed_by_closures(interval);
}

std::string render_ascii(const CellSet& s) {
    const auto& g = *s.grid();
    if (g.dim() != 2) throw InvalidArgument("ASCII rendering needs a 2-d set");
    std::ostringstream os;
    for (std::size_t y = g.atoms(1); y-- > 0;) {
        for (std::size_t x = 0; x < g.atoms(0); ++x) {
            const std::size_t idx[2] = {x, y};
            os << (s.contains(g.cell_of(idx)) ? '#' : '.');
        }
        os << '\n';
    }
    return os.str();
}

// ---------------------------------------------------------------- json

nlohmann::json to_json(const Grid& g) {
    auto out = nlohmann::json::array();
    for (std::size_t i = 0; i < g.dim(); ++i) {
        auto axis = nlohmann::json::array();
        for (const auto& t : g.breakpoints(i)) axis.push_back(format_rational(t));
        out.push_back(std::move(axis));
    }
    return out;
}

Grid grid_from_json(const nlohmann::json& j) {
    if (!j.is_array()) throw ParseError("grid must be an array of per-axis breakpoint arrays");
    std::vector<std::vector<Rational>> bp;
    for (const auto& axis : j) {
        if (!axis.is_array()) throw ParseError("grid axis must be an array");
        auto& out = bp.emplace_back();
        for (const auto& t : axis) {
            if (t.is_string())
                out.push_back(parse_rational(t.get<std::string>()));
            else if (t.is_number_integer())
                out.emplace_back(t.get<std::int64_t>());
            else
                throw ParseError("breakpoints must be \"num/den\" strings or integers");
        }
    }
    return Grid(std::move(bp));
}

nlohmann::json to_json(const CellSet& s) {
    auto cells = nlohmann::json::array();
    for (auto c : s.cells()) cells.push_back(s.grid()->atoms_of(c));
    return {{"grid", to_json(*s.grid())}, {"cells", cells}};
}

namespace {

std::vector<Coordinate> parse_corner(const nlohmann::json& j) {
    if (!j.is_array() || j.empty()) throw ParseError("upset corner must be a nonempty array");
    std::vector<Coordinate> corner;
    for (const auto& t : j) {
        if (t.is_string())
            corner.push_back(parse_coordinate(t.get<std::string>()));
        else if (t.is_number_integer())
            corner.emplace_back(Rational(t.get<std::int64_t>()));
        else
            throw ParseError("corner coordinates must be strings or integers");
    }
    return corner;
}

}  // namespace

CellSet cellset_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ParseError("cell set must be a JSON object");
    if (j.contains("cells")) {
        if (!j.contains("grid")) throw ParseError("explicit cell set needs a grid");
        auto grid = share(grid_from_json(j.at("grid")));
        std::vector<std::vector<std::size_t>> cells;
        for (const auto& c : j.at("cells")) {
            if (!c.is_array()) throw ParseError("cells are atom-index tuples");
            cells.push_back(c.get<std::vector<std::size_t>>());
        }
        return CellSet::from_atoms(grid, cells);
    }
    if (!j.contains("op")) throw ParseError("staircase expression needs an 'op'");
    const auto op = j.at("op").get<std::string>();
    if (op == "upset" || op == "open_upset") {
        const auto corner = parse_corner(j.at("point"));
        auto base = share(Grid::trivial(corner.size()));
        return op == "upset" ? principal_upset(base, corner) : open_upset(base, corner);
    }
    if (op == "all" || op == "empty") {
        auto grid = share(Grid::trivial(j.at("dim").get<std::size_t>()));
        return op == "all" ? CellSet::all(grid) : CellSet(grid);
    }
    if (!j.contains("args") || !j.at("args").is_array() || j.at("args").empty())
        throw ParseError("'" + op + "' needs a nonempty 'args' array");
    std::vector<CellSet> args;
    for (const auto& a : j.at("args")) args.push_back(cellset_from_json(a));
    if (op == "complement") {
        if (args.size() != 1) throw ParseError("complement takes one argument");
        return ~args[0];
    }
    CellSet acc = args[0];
    for (std::size_t k = 1; k < args.size(); ++k) {
        if (op == "union")
            acc = acc | args[k];
        else if (op == "intersect")
            acc = acc & args[k];
        else if (op == "difference")
            acc = acc - args[k];
        else
            throw ParseError("unknown staircase operation '" + op + "'");
    }
    if (args.size() == 1 && op != "union" && op != "intersect" && op != "difference")
        throw ParseError("unknown staircase operation '" + op + "'");
    return acc;
}

// ---------------------------------------------------------------- serial references

namespace serial {

CellSet up_closure(const CellSet& s) {
    const auto& g = *s.grid();
    CellSet out(s.grid());
    const auto members = s.cells();
    for (std::size_t c = 0; c < g.cell_count(); ++c)
        for (auto m : members)
            if (g.cell_leq(m, c)) {
                out.insert(c);
                break;
            }
    return out;
}

CellSet down_closure(const CellSet& s) {
    const auto& g = *s.grid();
    CellSet out(s.grid());
    const auto members = s.cells();
    for (std::size_t c = 0; c < g.cell_count(); ++c)
        for (auto m : members)
            if (g.cell_leq(c, m)) {
                out.insert(c);
                break;
            }
    return out;
}

CellSet underline(const CellSet& s) {
    const auto& g = *s.grid();
    CellSet out(s.grid());
    for (auto c : s.cells()) {
        // Product of per-axis underlines of the cell's atoms.
        std::vector<std::vector<std::size_t>> choices(g.dim());
        for (std::size_t i = 0; i < g.dim(); ++i) {
            const auto a = g.atom(c, i);
            choices[i].push_back(a);
            if (a % 2 == 0 && a > 0) choices[i].push_back(a - 1);
        }
        std::vector<std::size_t> pick(g.dim(), 0), at(g.dim());
        while (true) {
            for (std::size_t i = 0; i < g.dim(); ++i) at[i] = choices[i][pick[i]];
            out.insert(g.cell_of(at));
            std::size_t i = 0;
            while (i < g.dim() && ++pick[i] == choices[i].size()) pick[i++] = 0;
            if (i == g.dim()) break;
        }
    }
    return out;
}

std::vector<CellSet> leq_components_cells(const CellSet& s) {
    const auto& g = *s.grid();
    const auto cells = s.cells();
    std::vector<bool> seen(cells.size(), false);
    std::vector<CellSet> comps;
    for (std::size_t start = 0; start < cells.size(); ++start) {
        if (seen[start]) continue;
        CellSet comp(s.grid());
        std::vector<std::size_t> stack{start};
        seen[start] = true;
        while (!stack.empty()) {
            const auto i = stack.back();
            stack.pop_back();
            comp.insert(cells[i]);
            for (std::size_t j = 0; j < cells.size(); ++j) {
                if (seen[j]) continue;
                if (g.cell_leq(cells[i], cells[j]) || g.cell_leq(cells[j], cells[i])) {
                    seen[j] = true;
                    stack.push_back(j);
                }
            }
        }
        comps.push_back(std::move(comp));
    }
    return comps;
}

}  // namespace serial

}  // namespace tame
