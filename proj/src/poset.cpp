#include "tame/poset.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <queue>
#include <sstream>

#include "tame/error.hpp"

namespace tame {

namespace {

struct UnionFind {
    std::vector<std::size_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

}  // namespace

FinitePoset FinitePoset::from_relations(std::vector<std::string> ids, const std::vector<Relation>& generators) {
    FinitePoset p;
    const std::size_t n = ids.size();
    p.ids_ = std::move(ids);
    for (std::size_t i = 0; i < n; ++i) {
        if (!p.index_.emplace(p.ids_[i], i).second)
            throw InvalidArgument("duplicate poset element id '" + p.ids_[i] + "'");
    }

    std::vector<std::vector<std::size_t>> succ(n);
    std::vector<std::size_t> indegree(n, 0);
    {
        std::vector<Subset> seen(n, Subset(n));
        for (auto [a, b] : generators) {
            if (a >= n || b >= n) throw InvalidArgument("relation index out of range");
            if (a == b || seen[a].test(b)) continue;
            seen[a].set(b);
            succ[a].push_back(b);
            ++indegree[b];
        }
    }

    // Kahn's algorithm; a leftover element sits on a cycle.
    std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
    for (std::size_t i = 0; i < n; ++i)
        if (indegree[i] == 0) ready.push(i);
    while (!ready.empty()) {
        const auto a = ready.top();
        ready.pop();
        p.topo_.push_back(a);
        for (auto b : succ[a])
            if (--indegree[b] == 0) ready.push(b);
    }
    if (p.topo_.size() != n) {
        nlohmann::json cyc = nlohmann::json::array();
        for (std::size_t i = 0; i < n; ++i)
            if (indegree[i] > 0) cyc.push_back(p.ids_[i]);
        throw CycleDetected("generating relations contain a nontrivial cycle", {{"elements", cyc}});
    }

    p.up_.assign(n, Subset(n));
    for (auto it = p.topo_.rbegin(); it != p.topo_.rend(); ++it) {
        const auto a = *it;
        p.up_[a].set(a);
        for (auto b : succ[a]) p.up_[a] |= p.up_[b];
    }
    p.down_.assign(n, Subset(n));
    for (std::size_t a = 0; a < n; ++a)
        for (auto b = p.up_[a].find_first(); b != Subset::npos; b = p.up_[a].find_next(b)) p.down_[b].set(a);

    // x -> y is a cover iff y is strictly above x but not strictly above any
    // generator successor of x.
    p.out_.assign(n, {});
    p.in_.assign(n, {});
    for (std::size_t a = 0; a < n; ++a) {
        Subset strict = p.up_[a];
        strict.reset(a);
        Subset covered = strict;
        for (auto g : succ[a]) {
            Subset above_g = p.up_[g];
            above_g.reset(g);
            covered -= above_g;
        }
        for (auto b = covered.find_first(); b != Subset::npos; b = covered.find_next(b)) {
            p.out_[a].push_back(p.covers_.size());
            p.in_[b].push_back(p.covers_.size());
            p.covers_.emplace_back(a, b);
        }
    }
    return p;
}

FinitePoset FinitePoset::from_relations(std::vector<std::string> ids,
                                        const std::vector<std::pair<std::string, std::string>>& generators) {
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < ids.size(); ++i) index.emplace(ids[i], i);
    std::vector<Relation> rel;
    rel.reserve(generators.size());
    for (const auto& [a, b] : generators) {
        auto ia = index.find(a);
        auto ib = index.find(b);
        if (ia == index.end()) throw UnknownElement("relation mentions unknown element '" + a + "'");
        if (ib == index.end()) throw UnknownElement("relation mentions unknown element '" + b + "'");
        rel.emplace_back(ia->second, ib->second);
    }
    return from_relations(std::move(ids), rel);
}

FinitePoset FinitePoset::antichain(std::vector<std::string> ids) { return from_relations(std::move(ids), std::vector<Relation>{}); }

FinitePoset FinitePoset::chain(std::vector<std::string> ids) {
    std::vector<Relation> rel;
    for (std::size_t i = 1; i < ids.size(); ++i) rel.emplace_back(i - 1, i);
    return from_relations(std::move(ids), rel);
}

std::optional<std::size_t> FinitePoset::find(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::size_t FinitePoset::index_of(const std::string& id) const {
    auto i = find(id);
    if (!i) throw UnknownElement("unknown poset element '" + id + "'", {{"element", id}});
    return *i;
}

std::optional<std::size_t> FinitePoset::cover_index(std::size_t a, std::size_t b) const {
    for (auto e : out_[a])
        if (covers_[e].second == b) return e;
    return std::nullopt;
}

MonotoneMap MonotoneMap::make(PosetPtr source, PosetPtr target, std::vector<std::size_t> assignment) {
    if (assignment.size() != source->size()) throw InvalidArgument("monotone map must assign every source element");
    for (auto q : assignment)
        if (q >= target->size()) throw InvalidArgument("monotone map assignment out of range");
    for (auto [x, y] : source->covers()) {
        if (!target->leq(assignment[x], assignment[y])) {
            throw NotMonotone("map sends " + source->id(x) + " <= " + source->id(y) + " to incomparable or reversed " +
                                  target->id(assignment[x]) + ", " + target->id(assignment[y]),
                              {{"source", {source->id(x), source->id(y)}},
                               {"image", {target->id(assignment[x]), target->id(assignment[y])}}});
        }
    }
    return MonotoneMap{std::move(source), std::move(target), std::move(assignment)};
}

MonotoneMap MonotoneMap::identity(PosetPtr p) {
    std::vector<std::size_t> a(p->size());
    std::iota(a.begin(), a.end(), 0);
    return MonotoneMap{p, p, std::move(a)};
}

std::vector<std::size_t> MonotoneMap::fiber(std::size_t q) const {
    std::vector<std::size_t> out;
    for (std::size_t x = 0; x < assignment.size(); ++x)
        if (assignment[x] == q) out.push_back(x);
    return out;
}

MonotoneMap compose(const MonotoneMap& g, const MonotoneMap& f) {
    if (f.target != g.source && !(*f.target == *g.source))
        throw DimensionMismatch("composing monotone maps with mismatched middle poset");
    std::vector<std::size_t> a(f.assignment.size());
    for (std::size_t x = 0; x < a.size(); ++x) a[x] = g.assignment[f.assignment[x]];
    return MonotoneMap{f.source, g.target, std::move(a)};
}

Subset upset_of(const FinitePoset& p, const Subset& s) {
    Subset out(p.size());
    for (auto x = s.find_first(); x != Subset::npos; x = s.find_next(x)) out |= p.up(x);
    return out;
}

Subset downset_of(const FinitePoset& p, const Subset& s) {
    Subset out(p.size());
    for (auto x = s.find_first(); x != Subset::npos; x = s.find_next(x)) out |= p.down(x);
    return out;
}

bool is_interval(const FinitePoset& p, const Subset& s) { return (upset_of(p, s) & downset_of(p, s)) == s; }
bool is_upset(const FinitePoset& p, const Subset& s) { return upset_of(p, s) == s; }
bool is_downset(const FinitePoset& p, const Subset& s) { return downset_of(p, s) == s; }

std::vector<std::vector<std::size_t>> leq_components(const FinitePoset& p, const Subset& s) {
    UnionFind uf(p.size());
    for (auto x = s.find_first(); x != Subset::npos; x = s.find_next(x)) {
        const Subset near = (p.up(x) | p.down(x)) & s;
        for (auto y = near.find_next(x); y != Subset::npos; y = near.find_next(y)) uf.unite(x, y);
    }
    std::vector<std::vector<std::size_t>> comps;
    std::vector<std::size_t> slot(p.size(), Subset::npos);
    for (auto x = s.find_first(); x != Subset::npos; x = s.find_next(x)) {
        const auto r = uf.find(x);
        if (slot[r] == Subset::npos) {
            slot[r] = comps.size();
            comps.emplace_back();
        }
        comps[slot[r]].push_back(x);
    }
    return comps;
}

ProductPoset product(const PosetPtr& left, const PosetPtr& right) {
    const std::size_t m = right->size();
    std::vector<std::string> ids;
    ids.reserve(left->size() * m);
    for (std::size_t i = 0; i < left->size(); ++i)
        for (std::size_t j = 0; j < m; ++j) ids.push_back("(" + left->id(i) + "," + right->id(j) + ")");
    std::vector<Relation> gen;
    for (auto [a, b] : left->covers())
        for (std::size_t j = 0; j < m; ++j) gen.emplace_back(a * m + j, b * m + j);
    for (std::size_t i = 0; i < left->size(); ++i)
        for (auto [a, b] : right->covers()) gen.emplace_back(i * m + a, i * m + b);
    auto prod = share(FinitePoset::from_relations(std::move(ids), gen));
    std::vector<std::size_t> l(prod->size()), r(prod->size());
    for (std::size_t k = 0; k < prod->size(); ++k) {
        l[k] = k / m;
        r[k] = k % m;
    }
    return ProductPoset{prod, MonotoneMap{prod, left, std::move(l)}, MonotoneMap{prod, right, std::move(r)}};
}

MonotoneMap pairing(const MonotoneMap& f, const MonotoneMap& g, const ProductPoset& prod) {
    if (f.source->size() != g.source->size()) throw DimensionMismatch("pairing maps with different sources");
    const std::size_t m = g.target->size();
    std::vector<std::size_t> a(f.assignment.size());
    for (std::size_t x = 0; x < a.size(); ++x) a[x] = f.assignment[x] * m + g.assignment[x];
    return MonotoneMap{f.source, prod.poset, std::move(a)};
}

ComponentRefinement component_refinement(const MonotoneMap& e) {
    const auto& src = *e.source;
    const auto& tgt = *e.target;

    std::vector<Subset> fibers(tgt.size(), Subset(src.size()));
    for (std::size_t x = 0; x < src.size(); ++x) fibers[e.assignment[x]].set(x);

    ComponentRefinement out;
    std::vector<std::size_t> owner;  // refined element -> target element
    std::vector<std::size_t> comp_of(src.size());
    std::vector<std::size_t> comp_rank;  // position of the component inside its fiber
    std::vector<std::size_t> comp_count(tgt.size(), 0);
    for (std::size_t q = 0; q < tgt.size(); ++q) {
        for (auto& comp : leq_components(src, fibers[q])) {
            for (auto x : comp) comp_of[x] = out.members.size();
            owner.push_back(q);
            comp_rank.push_back(comp_count[q]++);
            out.members.push_back(std::move(comp));
        }
    }

    auto make_ids = [&](bool always_suffix) {
        std::vector<std::string> ids;
        for (std::size_t c = 0; c < owner.size(); ++c) {
            const auto q = owner[c];
            if (!always_suffix && comp_count[q] == 1)
                ids.push_back(tgt.id(q));
            else
                ids.push_back(tgt.id(q) + "#" + std::to_string(comp_rank[c]));
        }
        return ids;
    };
    auto ids = make_ids(false);
    {
        std::vector<std::string> sorted = ids;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) ids = make_ids(true);
    }

    // Every relation of the source is a chain of covers, so cover images
    // generate the same order as all relation images.
    std::vector<Relation> gen;
    for (auto [x, y] : src.covers())
        if (comp_of[x] != comp_of[y]) gen.emplace_back(comp_of[x], comp_of[y]);
    out.refined = share(FinitePoset::from_relations(std::move(ids), gen));
    out.to_refined = MonotoneMap{e.source, out.refined, std::move(comp_of)};
    out.projection = MonotoneMap{out.refined, e.target, std::move(owner)};
    return out;
}

FfDiagnosis diagnose_ff_conditions(const MonotoneMap& e) {
    const auto& src = *e.source;
    const auto& tgt = *e.target;
    FfDiagnosis d;

    std::vector<Relation> images;
    for (auto [x, y] : src.covers())
        if (e(x) != e(y)) images.emplace_back(e(x), e(y));
    try {
        const auto generated = FinitePoset::from_relations(tgt.ids(), images);
        d.order_generated = true;
        for (std::size_t q = 0; q < tgt.size() && d.order_generated; ++q)
            if (generated.up(q) != tgt.up(q)) d.order_generated = false;
    } catch (const CycleDetected&) {
        d.order_generated = false;
    }

    std::vector<Subset> fibers(tgt.size(), Subset(src.size()));
    for (std::size_t x = 0; x < src.size(); ++x) fibers[e(x)].set(x);
    for (std::size_t q = 0; q < tgt.size(); ++q)
        if (fibers[q].none() || leq_components(src, fibers[q]).size() != 1) d.bad_fibers.push_back(q);
    d.fibers_connected = d.bad_fibers.empty();
    return d;
}

nlohmann::json to_json(const FinitePoset& p) {
    nlohmann::json rel = nlohmann::json::array();
    for (auto [a, b] : p.covers()) rel.push_back({p.id(a), p.id(b)});
    return {{"elements", p.ids()}, {"relations", rel}};
}

FinitePoset poset_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("elements")) throw ParseError("poset needs an 'elements' array");
    std::vector<std::string> ids;
    for (const auto& e : j.at("elements")) {
        if (!e.is_string()) throw ParseError("poset element ids must be strings");
        ids.push_back(e.get<std::string>());
    }
    std::vector<std::pair<std::string, std::string>> rel;
    if (j.contains("relations")) {
        for (const auto& r : j.at("relations")) {
            if (!r.is_array() || r.size() != 2 || !r[0].is_string() || !r[1].is_string())
                throw ParseError("poset relations must be [id, id] pairs");
            rel.emplace_back(r[0].get<std::string>(), r[1].get<std::string>());
        }
    }
    return FinitePoset::from_relations(std::move(ids), rel);
}

namespace {

std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

}  // namespace

std::string to_dot(const FinitePoset& p, const std::map<std::size_t, std::string>& annotations) {
    std::ostringstream os;
    os << "digraph hasse {\n  rankdir=BT;\n  node [shape=box];\n";
    for (std::size_t i = 0; i < p.size(); ++i) {
        os << "  n" << i << " [label=\"" << dot_escape(p.id(i));
        if (auto it = annotations.find(i); it != annotations.end()) os << "\\n" << dot_escape(it->second);
        os << "\"];\n";
    }
    for (auto [a, b] : p.covers()) os << "  n" << a << " -> n" << b << ";\n";
    os << "}\n";
    return os.str();
}

}  // namespace tame
