#include "tame/encoding.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "tame/error.hpp"

namespace tame {

namespace {

nlohmann::json atoms_json(const Grid& g, std::size_t cell) { return g.atoms_of(cell); }

void check_labels(const Encoding& e) {
    if (!e.grid || !e.target) throw InvalidArgument("encoding needs a grid and a target poset");
    if (e.label.size() != e.grid->cell_count())
        throw DimensionMismatch("encoding has " + std::to_string(e.label.size()) + " labels for " +
                                std::to_string(e.grid->cell_count()) + " cells");
    for (auto q : e.label)
        if (q >= e.target->size()) throw InvalidArgument("encoding label out of range");
}

}  // namespace

MonotoneMap Encoding::cell_map() const {
    check_labels(*this);
    return MonotoneMap::make(share(cell_poset(*grid)), target, label);
}

Encoding constant_encoding(GridPtr grid, const std::string& id) {
    const auto n = grid->cell_count();
    return Encoding{std::move(grid), share(FinitePoset::antichain({id})), std::vector<std::size_t>(n, 0)};
}

Encoding encoding_from_fibers(GridPtr grid, PosetPtr target, const std::vector<std::pair<std::string, CellSet>>& fibers,
                              std::optional<std::string> default_element) {
    constexpr auto unset = static_cast<std::size_t>(-1);
    // Move every fiber to one grid first.
    for (const auto& [id, set] : fibers) grid = merge_grids(grid, set.grid()).grid;
    std::vector<std::size_t> label(grid->cell_count(), unset);
    for (const auto& [id, set] : fibers) {
        const auto q = target->index_of(id);
        const auto s = set.refined_to(grid);
        for (auto c : s.cells()) {
            if (label[c] != unset && label[c] != q)
                throw InvalidArgument("fibers overlap in cell " + grid->describe_cell(c),
                                      {{"cell", atoms_json(*grid, c)}});
            label[c] = q;
        }
    }
    std::optional<std::size_t> fallback;
    if (default_element) fallback = target->index_of(*default_element);
    for (std::size_t c = 0; c < label.size(); ++c) {
        if (label[c] != unset) continue;
        if (!fallback)
            throw InvalidArgument("cell " + grid->describe_cell(c) + " has no label",
                                  {{"cell", atoms_json(*grid, c)}});
        label[c] = *fallback;
    }
    return Encoding{std::move(grid), std::move(target), std::move(label)};
}

Encoding antidiagonal_encoding(std::size_t k) {
    if (k == 0) throw InvalidArgument("antidiagonal needs at least one point");
    std::vector<Rational> bp;
    for (std::size_t i = 0; i < k; ++i) bp.emplace_back(static_cast<std::int64_t>(i));
    auto grid = share(Grid({bp, bp}));
    CellSet diag(grid);
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t atoms[2] = {2 * i + 1, 2 * (k - 1 - i) + 1};
        diag.insert(grid->cell_of(atoms));
    }
    const auto high = up_closure(diag) - diag;
    auto target = share(FinitePoset::chain({"low", "diag", "high"}));
    return encoding_from_fibers(grid, target, {{"diag", diag}, {"high", high}}, "low");
}

ValidatedEncoding validate_encoding(const Encoding& e) {
    check_labels(e);
    const auto& g = *e.grid;
    const auto& t = *e.target;
    for (std::size_t c = 0; c < g.cell_count(); ++c) {
        for (std::size_t i = 0; i < g.dim(); ++i) {
            if (g.atom(c, i) + 1 >= g.atoms(i)) continue;
            const auto d = c + g.stride(i);
            if (!t.leq(e.label[c], e.label[d]))
                throw NotMonotone("cell " + g.describe_cell(c) + " <= " + g.describe_cell(d) + " but label " +
                                      t.id(e.label[c]) + " is not <= " + t.id(e.label[d]),
                                  {{"lower_cell", atoms_json(g, c)},
                                   {"upper_cell", atoms_json(g, d)},
                                   {"lower_label", t.id(e.label[c])},
                                   {"upper_label", t.id(e.label[d])}});
        }
    }

    std::vector<bool> used(t.size(), false);
    for (auto q : e.label) used[q] = true;
    ValidatedEncoding out;
    if (std::all_of(used.begin(), used.end(), [](bool b) { return b; })) {
        out.encoding = e;
        return out;
    }
    std::vector<std::size_t> keep, renumber(t.size());
    std::vector<std::string> ids;
    for (std::size_t q = 0; q < t.size(); ++q) {
        if (used[q]) {
            renumber[q] = keep.size();
            keep.push_back(q);
            ids.push_back(t.id(q));
        } else {
            out.pruned.push_back(t.id(q));
        }
    }
    std::vector<Relation> rel;
    for (std::size_t a = 0; a < keep.size(); ++a)
        for (std::size_t b = 0; b < keep.size(); ++b)
            if (a != b && t.leq(keep[a], keep[b])) rel.emplace_back(a, b);
    std::vector<std::size_t> label(e.label.size());
    for (std::size_t c = 0; c < label.size(); ++c) label[c] = renumber[e.label[c]];
    out.encoding = Encoding{e.grid, share(FinitePoset::from_relations(std::move(ids), rel)), std::move(label)};
    return out;
}

CellSet fiber(const Encoding& e, std::size_t element) {
    if (element >= e.target->size()) throw UnknownElement("no target element with index " + std::to_string(element));
    CellSet s(e.grid);
    for (std::size_t c = 0; c < e.label.size(); ++c)
        if (e.label[c] == element) s.insert(c);
    return s;
}

CellSet fiber(const Encoding& e, const std::string& element) { return fiber(e, e.target->index_of(element)); }

std::vector<CellSet> all_fibers(const Encoding& e) {
    std::vector<CellSet> out(e.target->size(), CellSet(e.grid));
    for (std::size_t c = 0; c < e.label.size(); ++c) out[e.label[c]].insert(c);
    return out;
}

CommonEncoding common_encoding(const Encoding& first, const Encoding& second) {
    check_labels(first);
    check_labels(second);
    const auto merge = merge_grids(first.grid, second.grid);
    const auto n2 = second.target->size();

    std::vector<std::size_t> pair_code(merge.grid->cell_count());
    std::vector<std::size_t> codes;
    for (std::size_t c = 0; c < pair_code.size(); ++c) {
        pair_code[c] = first.label[merge.to_first[c]] * n2 + second.label[merge.to_second[c]];
        codes.push_back(pair_code[c]);
    }
    std::sort(codes.begin(), codes.end());
    codes.erase(std::unique(codes.begin(), codes.end()), codes.end());

    std::vector<std::string> ids;
    std::vector<std::size_t> left, right;
    for (auto code : codes) {
        left.push_back(code / n2);
        right.push_back(code % n2);
        ids.push_back("(" + first.target->id(left.back()) + "," + second.target->id(right.back()) + ")");
    }
    std::vector<Relation> rel;
    for (std::size_t a = 0; a < codes.size(); ++a)
        for (std::size_t b = 0; b < codes.size(); ++b)
            if (a != b && first.target->leq(left[a], left[b]) && second.target->leq(right[a], right[b]))
                rel.emplace_back(a, b);
    auto target = share(FinitePoset::from_relations(std::move(ids), rel));

    std::vector<std::size_t> label(pair_code.size());
    for (std::size_t c = 0; c < label.size(); ++c)
        label[c] = static_cast<std::size_t>(std::lower_bound(codes.begin(), codes.end(), pair_code[c]) - codes.begin());

    CommonEncoding out{Encoding{merge.grid, target, std::move(label)},
                       MonotoneMap::make(target, first.target, std::move(left)),
                       MonotoneMap::make(target, second.target, std::move(right))};
    return out;
}

ConnectiveRefinement connective_refinement(const Encoding& e) {
    const auto cr = component_refinement(e.cell_map());
    return ConnectiveRefinement{Encoding{e.grid, cr.refined, cr.to_refined.assignment}, cr.projection};
}

ClosedClassReport fibers_in_closed_class(const Encoding& e) {
    ClosedClassReport r;
    r.pass = true;
    r.exact = true;
    const auto fibers = all_fibers(e);
    for (std::size_t q = 0; q < fibers.size(); ++q) {
        FiberReport f;
        f.element = e.target->id(q);
        f.cells = fibers[q].count();
        f.interval = is_interval(fibers[q]);
        f.fixed_point = is_fixed_by_closures(fibers[q]);
        f.pass = f.interval ? is_closed_class_interval(fibers[q]) : f.fixed_point;
        r.pass = r.pass && f.pass;
        r.exact = r.exact && f.interval;
        r.fibers.push_back(std::move(f));
    }
    return r;
}

nlohmann::json to_json(const ClosedClassReport& r) {
    nlohmann::json fibers = nlohmann::json::array();
    for (const auto& f : r.fibers)
        fibers.push_back({{"element", f.element},
                          {"cells", f.cells},
                          {"interval", f.interval},
                          {"fixed_point", f.fixed_point},
                          {"pass", f.pass}});
    return {{"pass", r.pass}, {"exact", r.exact}, {"fibers", fibers}};
}

nlohmann::json to_json(const Encoding& e) {
    nlohmann::json labels = nlohmann::json::array();
    for (std::size_t c = 0; c < e.label.size(); ++c)
        labels.push_back({atoms_json(*e.grid, c), e.target->id(e.label[c])});
    return {{"grid", to_json(*e.grid)}, {"poset", to_json(*e.target)}, {"labels", labels}};
}

Encoding encoding_from_json(const nlohmann::json& j, PosetPtr poset) {
    if (!j.is_object()) throw ParseError("encoding must be a JSON object");
    if (!poset) {
        if (!j.contains("poset") || !j["poset"].is_object()) throw ParseError("encoding needs an inline poset");
        poset = share(poset_from_json(j["poset"]));
    }
    std::optional<std::string> fallback;
    if (j.contains("default")) fallback = j["default"].get<std::string>();

    if (j.contains("fibers")) {
        if (!j["fibers"].is_object()) throw ParseError("encoding fibers must map ids to sets");
        GridPtr grid = j.contains("grid") ? share(grid_from_json(j["grid"])) : nullptr;
        std::vector<std::pair<std::string, CellSet>> fibers;
        for (const auto& [id, set] : j["fibers"].items()) fibers.emplace_back(id, cellset_from_json(set));
        if (!grid) {
            if (fibers.empty()) throw ParseError("encoding without grid or fibers");
            grid = share(Grid::trivial(fibers.front().second.dim()));
        }
        return encoding_from_fibers(grid, poset, fibers, fallback);
    }

    if (!j.contains("grid")) throw ParseError("encoding needs a grid");
    auto grid = share(grid_from_json(j["grid"]));
    constexpr auto unset = static_cast<std::size_t>(-1);
    std::vector<std::size_t> label(grid->cell_count(), unset);
    if (j.contains("labels")) {
        if (!j["labels"].is_array()) throw ParseError("encoding labels must be an array");
        for (const auto& entry : j["labels"]) {
            if (!entry.is_array() || entry.size() != 2 || !entry[0].is_array() || !entry[1].is_string())
                throw ParseError("encoding label entries are [[atom, ...], id]");
            const auto cell = grid->cell_of(entry[0].get<std::vector<std::size_t>>());
            label[cell] = poset->index_of(entry[1].get<std::string>());
        }
    }
    std::optional<std::size_t> fb;
    if (fallback) fb = poset->index_of(*fallback);
    for (std::size_t c = 0; c < label.size(); ++c) {
        if (label[c] != unset) continue;
        if (!fb) throw ParseError("cell " + grid->describe_cell(c) + " has no label");
        label[c] = *fb;
    }
    return Encoding{grid, poset, std::move(label)};
}

std::string to_dot(const Encoding& e) {
    std::map<std::size_t, std::string> notes;
    const auto fibers = all_fibers(e);
    for (std::size_t q = 0; q < fibers.size(); ++q) notes[q] = std::to_string(fibers[q].count()) + " cells";
    return to_dot(*e.target, notes);
}

}  // namespace tame
