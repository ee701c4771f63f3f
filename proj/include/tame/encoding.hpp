#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tame/poset.hpp"
#include "tame/staircase.hpp"

namespace tame {

/// A monotone map from R^n to a finite poset, constant on the cells of a
/// grid. Only the finite cell-level map is stored.
struct Encoding {
    GridPtr grid;
    PosetPtr target;
    std::vector<std::size_t> label;  ///< target element of each cell

    std::size_t dim() const { return grid->dim(); }
    std::size_t element_at(std::span<const Rational> point) const { return label[grid->locate(point)]; }
    /// The induced map on the cell poset. Builds the cell poset and checks
    /// monotonicity; throws NotMonotone.
    MonotoneMap cell_map() const;
};

/// Every cell labelled with the single element of a one-point poset.
Encoding constant_encoding(GridPtr grid, const std::string& id = "*");

/// Encoding whose fibers are the given disjoint cell sets over one grid,
/// each labelled by the corresponding element of target. Cells not covered
/// by any fiber get default_element; throws InvalidArgument if there is none.
Encoding encoding_from_fibers(GridPtr grid, PosetPtr target, const std::vector<std::pair<std::string, CellSet>>& fibers,
                              std::optional<std::string> default_element = std::nullopt);

/// Discretized antidiagonal on a 2-d grid with breakpoints 0..k-1: the k
/// points (i, k-1-i) form the fiber of "diag", everything strictly above
/// them maps to "high" and the rest to "low", with low < diag < high.
/// The diag fiber has k pairwise incomparable cells.
Encoding antidiagonal_encoding(std::size_t k);

struct ValidatedEncoding {
    Encoding encoding;                ///< target restricted to realized elements
    std::vector<std::string> pruned;  ///< ids with empty fibers, dropped
};

/// Checks monotonicity on every cover pair of cells (NotMonotone carries the
/// two cells and their labels) and prunes target elements with empty fiber.
/// The pruned target keeps the induced order.
ValidatedEncoding validate_encoding(const Encoding& e);

/// Throws UnknownElement.
CellSet fiber(const Encoding& e, const std::string& element);
CellSet fiber(const Encoding& e, std::size_t element);
std::vector<CellSet> all_fibers(const Encoding& e);

struct CommonEncoding {
    Encoding encoding;
    MonotoneMap to_first;   ///< common target -> first target
    MonotoneMap to_second;  ///< common target -> second target
};

/// Labels each cell of the merged grid with the pair of input labels. The
/// target is the set of realized pairs with the product order; ids "(a,b)".
/// Throws DimensionMismatch.
CommonEncoding common_encoding(const Encoding& first, const Encoding& second);

struct ConnectiveRefinement {
    Encoding encoding;
    MonotoneMap to_original;  ///< refined target -> input target
};

/// Replaces each fiber by its zigzag components, ordered by the relation
/// generated from cell comparabilities.
ConnectiveRefinement connective_refinement(const Encoding& e);

struct FiberReport {
    std::string element;
    std::size_t cells = 0;
    bool interval = false;
    bool fixed_point = false;  ///< underline(F) == F == tilde(F)
    bool pass = false;
};

struct ClosedClassReport {
    std::vector<FiberReport> fibers;
    bool pass = false;
    /// True when every fiber is an interval, so pass is an exact membership
    /// verdict; otherwise pass only reports the necessary fixed-point test.
    bool exact = false;
};

ClosedClassReport fibers_in_closed_class(const Encoding& e);
nlohmann::json to_json(const ClosedClassReport& r);

/// {grid, poset, labels: [[cell-tuple, id], ...]}
nlohmann::json to_json(const Encoding& e);
/// Accepts the form above; "poset" may be inline, "default" labels unlisted
/// cells, and "fibers": {id: staircase-expression} may replace "labels".
Encoding encoding_from_json(const nlohmann::json& j, PosetPtr poset);

/// Target Hasse diagram, each node annotated with its fiber size.
std::string to_dot(const Encoding& e);

}  // namespace tame
