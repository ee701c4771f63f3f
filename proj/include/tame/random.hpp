#pragma once

#include <cstdint>
#include <random>

#include "tame/encoding.hpp"
#include "tame/persistence.hpp"
#include "tame/pipeline.hpp"
#include "tame/poset.hpp"
#include "tame/staircase.hpp"

namespace tame {

/// Generators for randomized suites. Draws go through rng() directly (no
/// std distributions), so a seed reproduces the same objects on any
/// standard library.
using Rng = std::mt19937_64;

inline std::size_t uniform_index(Rng& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }
inline bool coin(Rng& rng, double probability) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53 < probability;
}

/// n elements "p0".."p{n-1}"; each pair is related with the given
/// probability along a random linear order.
FinitePoset random_poset(Rng& rng, std::size_t n, double density);

/// A uniformly-built monotone map: elements are assigned in topological
/// order to a random element above the images of their lower covers.
MonotoneMap random_monotone_map(Rng& rng, const PosetPtr& source, const PosetPtr& target);

/// Grid with 0..max_breakpoints breakpoints per axis drawn from the
/// integers 0..2*max_breakpoints (plus the occasional half-integer).
Grid random_grid(Rng& rng, std::size_t dim, std::size_t max_breakpoints);

/// Each cell kept independently with the given probability.
CellSet random_cellset(Rng& rng, const GridPtr& grid, double density);

/// Union of 1..max_corners principal upsets [p, inf) whose corners sit on
/// grid breakpoints or at -inf; always a closed upset.
CellSet random_closed_upset(Rng& rng, const GridPtr& grid, std::size_t max_corners = 3);

/// Up-closure of a sparse random cell set; generally neither open nor closed.
CellSet random_upset(Rng& rng, const GridPtr& grid);
CellSet random_downset(Rng& rng, const GridPtr& grid);

/// Labels each cell by its membership pattern in 1..max_upsets random closed
/// upsets; the target is the realized patterns ordered by inclusion, with
/// ids like "u0110". Every fiber lies in the closed staircase class.
Encoding random_closed_encoding(Rng& rng, const GridPtr& grid, std::size_t max_upsets = 3);

/// Intersection of a random upset and a random downset; may be empty.
Subset random_interval(Rng& rng, const FinitePoset& p);

/// Direct sum of 1..max_dim random interval modules, with every space put
/// through a random change of basis so the maps are not just 0/1 patterns.
PfdModule random_module(Rng& rng, const PosetPtr& base, std::size_t max_dim, Prime p = kDefaultPrime);

/// Random invertible n x n matrix together with its inverse.
std::pair<Matrix, Matrix> random_invertible(Rng& rng, std::size_t n, Prime p = kDefaultPrime);

/// Random linear combination of a basis of Hom(m, n).
Morphism random_morphism(Rng& rng, const PfdModule& m, const PfdModule& n);

/// Keeps each breakpoint of the grid with probability 0.7.
Grid random_subgrid(Rng& rng, const Grid& grid);

/// A random module over a random closed-class encoding of a random subgrid.
EncodedModule random_encoded_module(Rng& rng, const Grid& grid, std::size_t max_dim, Prime p = kDefaultPrime);

}  // namespace tame
