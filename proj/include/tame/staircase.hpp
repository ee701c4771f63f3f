#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/rational.hpp>
#include <json.hpp>

#include "tame/poset.hpp"

namespace tame {

using Rational = boost::rational<std::int64_t>;

/// A coordinate of a principal upset corner; nullopt stands for -infinity.
using Coordinate = std::optional<Rational>;

/// Accepts "p", "p/q" and "-inf" (the latter only where allowed).
Rational parse_rational(const std::string& text);
Coordinate parse_coordinate(const std::string& text);
std::string format_rational(const Rational& r);

/// Axis-aligned decomposition of R^n. An axis with breakpoints t_1 < ... < t_k
/// is split into 2k+1 atoms (-inf,t_1), {t_1}, (t_1,t_2), ..., {t_k}, (t_k,inf),
/// numbered 0..2k; point atoms have odd indices. Cells are products of atoms,
/// linearized row-major with axis 0 most significant.
///
/// Cells ordered by per-axis atom index (product order) carry exactly the
/// relation "some point of c is <= some point of c'".
class Grid {
public:
    explicit Grid(std::vector<std::vector<Rational>> breakpoints);
    static Grid trivial(std::size_t dim) { return Grid(std::vector<std::vector<Rational>>(dim)); }

    std::size_t dim() const noexcept { return breakpoints_.size(); }
    const std::vector<Rational>& breakpoints(std::size_t axis) const { return breakpoints_.at(axis); }
    const std::vector<std::vector<Rational>>& all_breakpoints() const noexcept { return breakpoints_; }
    std::size_t atoms(std::size_t axis) const { return 2 * breakpoints_[axis].size() + 1; }
    std::size_t stride(std::size_t axis) const { return strides_[axis]; }
    std::size_t cell_count() const noexcept { return cell_count_; }

    std::size_t atom(std::size_t cell, std::size_t axis) const { return cell / strides_[axis] % atoms(axis); }
    std::vector<std::size_t> atoms_of(std::size_t cell) const;
    std::size_t cell_of(std::span<const std::size_t> atoms) const;

    /// Atom index containing the value t on the given axis.
    std::size_t atom_of_value(std::size_t axis, const Rational& t) const;
    /// Cell containing a point of Q^n.
    std::size_t locate(std::span<const Rational> point) const;
    /// A rational point inside the cell.
    std::vector<Rational> representative(std::size_t cell) const;

    bool cell_leq(std::size_t a, std::size_t b) const;

    std::string describe_atom(std::size_t axis, std::size_t atom) const;
    std::string describe_cell(std::size_t cell) const;

    friend bool operator==(const Grid& a, const Grid& b) { return a.breakpoints_ == b.breakpoints_; }

private:
    std::vector<std::vector<Rational>> breakpoints_;
    std::vector<std::size_t> strides_;
    std::size_t cell_count_ = 1;
};

using GridPtr = std::shared_ptr<const Grid>;

inline GridPtr share(Grid g) { return std::make_shared<const Grid>(std::move(g)); }

/// The cell poset of a grid as a finite poset; ids are "c[i,j,...]".
FinitePoset cell_poset(const Grid& g);

/// Sends each cell of a finer grid to the cell of a coarser grid containing it.
using CellMap = std::vector<std::size_t>;

/// Requires every breakpoint of coarse to be a breakpoint of fine.
CellMap refinement_map(const Grid& fine, const Grid& coarse);

struct GridMerge {
    GridPtr grid;
    CellMap to_first;
    CellMap to_second;
};

/// Per-axis union of breakpoints. Throws DimensionMismatch.
GridMerge merge_grids(const GridPtr& first, const GridPtr& second);

/// A union of grid cells, i.e. an exact staircase-constructible subset of
/// R^n. Binary operations on sets over different grids first move both
/// operands to the merged grid.
class CellSet {
public:
    explicit CellSet(GridPtr grid);
    CellSet(GridPtr grid, Subset members);

    static CellSet all(GridPtr grid);
    static CellSet from_atoms(GridPtr grid, const std::vector<std::vector<std::size_t>>& cells);

    const GridPtr& grid() const noexcept { return grid_; }
    std::size_t dim() const { return grid_->dim(); }
    const Subset& members() const noexcept { return members_; }
    bool contains(std::size_t cell) const { return members_.test(cell); }
    bool contains_point(std::span<const Rational> point) const { return contains(grid_->locate(point)); }
    std::size_t count() const { return members_.count(); }
    bool empty() const { return members_.none(); }
    std::vector<std::size_t> cells() const;

    void insert(std::size_t cell) { members_.set(cell); }

    /// The same point set expressed over a finer grid.
    CellSet refined_to(const GridPtr& finer) const;

    CellSet operator~() const;
    friend CellSet operator|(const CellSet& a, const CellSet& b);
    friend CellSet operator&(const CellSet& a, const CellSet& b);
    friend CellSet operator-(const CellSet& a, const CellSet& b);
    /// Point-set equality, independent of the grids used.
    friend bool operator==(const CellSet& a, const CellSet& b);
    /// Point-set inclusion.
    bool subset_of(const CellSet& other) const;

private:
    GridPtr grid_;
    Subset members_;
};

/// Moves both sets onto a common grid.
std::pair<CellSet, CellSet> align(const CellSet& a, const CellSet& b);

/// [p, inf) with -inf coordinates allowed. The grid is the given base grid
/// refined by the finite coordinates of p.
CellSet principal_upset(const GridPtr& base, std::span<const Coordinate> corner);
CellSet principal_upset(std::span<const Coordinate> corner);
/// Open orthant prod (p_i, inf) over the grid refined by p.
CellSet open_upset(const GridPtr& base, std::span<const Coordinate> corner);

CellSet up_closure(const CellSet& s);
CellSet down_closure(const CellSet& s);
bool is_upset(const CellSet& s);
bool is_downset(const CellSet& s);
bool is_interval(const CellSet& s);

/// Points reachable as limits of sequences in s approaching from above.
/// Per axis a point atom maps to itself and an open atom (a,b) to {a} u (a,b).
CellSet underline(const CellSet& s);
/// complement . underline . complement
CellSet tilde(const CellSet& s);
/// Topological closure and interior, for cross-checking the operators above.
CellSet closure(const CellSet& s);
CellSet interior(const CellSet& s);

/// underline(s) == s == tilde(s); necessary for membership in the algebra
/// generated by closed staircase upsets, and sufficient for intervals.
bool is_fixed_by_closures(const CellSet& s);

/// Zigzag components over the cell order, ordered by smallest cell.
std::vector<CellSet> leq_components_cells(const CellSet& s);
/// Connected components of the point set, ordered by smallest cell. Two
/// cells touch iff one meets the closure of the other.
std::vector<CellSet> topological_components(const CellSet& s);

struct IntervalDecomposition {
    CellSet upper;  ///< closed upset U
    CellSet lower;  ///< closed upset V, with I = U minus V
};

/// Writes a closed-class interval as U intersect complement(V) with U, V
/// closed upsets. Throws NotInterval or NotClosedClass.
IntervalDecomposition closed_interval_decompose(const CellSet& interval);

/// Throws NotInterval when the argument is not an interval.
bool is_closed_class_interval(const CellSet& interval);

/// 2-d picture, axis 1 growing upward; '#' marks members.
std::string render_ascii(const CellSet& s);

nlohmann::json to_json(const Grid& g);
Grid grid_from_json(const nlohmann::json& j);
/// {"grid": [...], "cells": [[atom,...], ...]}
nlohmann::json to_json(const CellSet& s);
/// Either the explicit form above or a staircase expression
/// {"op": "union"|"intersect"|"difference"|"complement", "args": [...]},
/// {"op": "upset"|"open_upset", "point": ["0", "-inf", ...]},
/// {"op": "all"|"empty", "dim": n}.
CellSet cellset_from_json(const nlohmann::json& j);

namespace serial {

/// Reference implementations straight from the definitions, quadratic in the
/// number of cells. Kept for testing the sweep kernels.
CellSet up_closure(const CellSet& s);
CellSet down_closure(const CellSet& s);
CellSet underline(const CellSet& s);
std::vector<CellSet> leq_components_cells(const CellSet& s);

}  // namespace serial

}  // namespace tame
