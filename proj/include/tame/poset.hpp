#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <boost/dynamic_bitset.hpp>
#include <json.hpp>

namespace tame {

using Subset = boost::dynamic_bitset<std::uint64_t>;
using Relation = std::pair<std::size_t, std::size_t>;

/// A finite partially ordered set on indices 0..n-1, each carrying an opaque
/// string id. The order is stored as full up/down bitset rows; the Hasse
/// diagram is derived once at construction. Instances are immutable.
class FinitePoset {
public:
    /// Reflexive-transitive closure of the generating pairs. Self-pairs are
    /// ignored. Throws CycleDetected when the generators contain a nontrivial
    /// cycle, and InvalidArgument on duplicate ids or out-of-range indices.
    static FinitePoset from_relations(std::vector<std::string> ids,
                                      const std::vector<Relation>& generators);
    static FinitePoset from_relations(std::vector<std::string> ids,
                                      const std::vector<std::pair<std::string, std::string>>& generators);

    /// Discrete order on the given ids.
    static FinitePoset antichain(std::vector<std::string> ids);
    /// ids[0] < ids[1] < ... .
    static FinitePoset chain(std::vector<std::string> ids);

    std::size_t size() const noexcept { return ids_.size(); }
    const std::string& id(std::size_t i) const { return ids_.at(i); }
    const std::vector<std::string>& ids() const noexcept { return ids_; }
    std::optional<std::size_t> find(const std::string& id) const;
    /// Throws UnknownElement.
    std::size_t index_of(const std::string& id) const;

    bool leq(std::size_t a, std::size_t b) const { return up_[a].test(b); }
    bool comparable(std::size_t a, std::size_t b) const { return leq(a, b) || leq(b, a); }
    /// {b : a <= b}, including a itself.
    const Subset& up(std::size_t a) const { return up_[a]; }
    /// {b : b <= a}, including a itself.
    const Subset& down(std::size_t a) const { return down_[a]; }

    const std::vector<Relation>& covers() const noexcept { return covers_; }
    /// Indices into covers() of the edges leaving / entering an element.
    const std::vector<std::size_t>& covers_from(std::size_t a) const { return out_[a]; }
    const std::vector<std::size_t>& covers_into(std::size_t a) const { return in_[a]; }
    /// Index into covers() of the edge a -> b, if b covers a.
    std::optional<std::size_t> cover_index(std::size_t a, std::size_t b) const;

    /// A linear extension: every element appears after all elements below it.
    const std::vector<std::size_t>& topological_order() const noexcept { return topo_; }

    Subset empty_subset() const { return Subset(size()); }
    Subset full_subset() const { return Subset(size()).set(); }

    friend bool operator==(const FinitePoset& a, const FinitePoset& b) {
        return a.ids_ == b.ids_ && a.up_ == b.up_;
    }

private:
    FinitePoset() = default;

    std::vector<std::string> ids_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<Subset> up_;
    std::vector<Subset> down_;
    std::vector<Relation> covers_;
    std::vector<std::vector<std::size_t>> out_;
    std::vector<std::vector<std::size_t>> in_;
    std::vector<std::size_t> topo_;
};

using PosetPtr = std::shared_ptr<const FinitePoset>;

inline PosetPtr share(FinitePoset p) { return std::make_shared<const FinitePoset>(std::move(p)); }

/// An order-preserving map between finite posets.
struct MonotoneMap {
    PosetPtr source;
    PosetPtr target;
    std::vector<std::size_t> assignment;

    /// Checks monotonicity on every cover of the source; throws NotMonotone
    /// with the offending pair as certificate.
    static MonotoneMap make(PosetPtr source, PosetPtr target, std::vector<std::size_t> assignment);
    static MonotoneMap identity(PosetPtr p);

    std::size_t operator()(std::size_t x) const { return assignment[x]; }
    /// Indices of the source elements mapped to q.
    std::vector<std::size_t> fiber(std::size_t q) const;
};

/// g after f.
MonotoneMap compose(const MonotoneMap& g, const MonotoneMap& f);

Subset upset_of(const FinitePoset& p, const Subset& s);
Subset downset_of(const FinitePoset& p, const Subset& s);
bool is_interval(const FinitePoset& p, const Subset& s);
bool is_upset(const FinitePoset& p, const Subset& s);
bool is_downset(const FinitePoset& p, const Subset& s);

/// Partition of s into its zigzag-connected components. Components are
/// listed by smallest member, members ascending.
std::vector<std::vector<std::size_t>> leq_components(const FinitePoset& p, const Subset& s);

struct ProductPoset {
    PosetPtr poset;
    /// Element (i, j) has index i * right.size() + j.
    MonotoneMap left_projection;
    MonotoneMap right_projection;
};

/// Componentwise order on pairs; ids are "(a,b)".
ProductPoset product(const PosetPtr& left, const PosetPtr& right);

/// The pairing <f, g> : S -> L x R, landing in the product built by product().
MonotoneMap pairing(const MonotoneMap& f, const MonotoneMap& g, const ProductPoset& prod);

struct ComponentRefinement {
    PosetPtr refined;      ///< zigzag components of the fibers of e
    MonotoneMap to_refined;  ///< x -> its component
    MonotoneMap projection;  ///< component of e^-1(q) -> q
    /// For each refined element, the source elements of its component.
    std::vector<std::vector<std::size_t>> members;
};

/// Splits every fiber of e into its zigzag components and orders the
/// components by the relation generated from source comparabilities. The
/// factorization e = projection . to_refined always holds, and to_refined
/// satisfies check_ff_conditions. Refined ids keep the target id when a fiber
/// is connected and get a "#k" suffix otherwise. Throws CycleDetected only on
/// corrupted (non-monotone) input.
ComponentRefinement component_refinement(const MonotoneMap& e);

struct FfDiagnosis {
    bool order_generated = false;   ///< target order = closure of image relations
    bool fibers_connected = false;  ///< each fiber nonempty and zigzag connected
    std::vector<std::size_t> bad_fibers;
    bool ok() const noexcept { return order_generated && fibers_connected; }
};

FfDiagnosis diagnose_ff_conditions(const MonotoneMap& e);
inline bool check_ff_conditions(const MonotoneMap& e) { return diagnose_ff_conditions(e).ok(); }

/// {elements: [id], relations: [[id, id]]} with relations = Hasse edges.
nlohmann::json to_json(const FinitePoset& p);
FinitePoset poset_from_json(const nlohmann::json& j);

/// Graphviz rendering of the Hasse diagram, bottom to top. Optional
/// per-element annotations are appended to node labels.
std::string to_dot(const FinitePoset& p, const std::map<std::size_t, std::string>& annotations = {});

}  // namespace tame
