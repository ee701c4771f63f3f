#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace tame {

/// Outcome of a randomized or fixed property suite. Every case is rebuilt
/// from (seed, case index), so results do not depend on thread count.
struct SuiteResult {
    std::string name;
    std::size_t cases = 0;
    std::size_t failures = 0;
    nlohmann::json details = nlohmann::json::object();

    bool pass() const noexcept { return failures == 0; }
};

nlohmann::json to_json(const SuiteResult& r);

/// Random posets of at most 10 elements, random monotone maps passed through
/// component_refinement, random modules of dimension at most 4 over the
/// refined target: the counit is an isomorphism at every element.
SuiteResult counit_suite(std::uint64_t seed, std::size_t cases = 200);

/// Same cases, random module pairs: Hom over the target and Hom between the
/// pullbacks have equal dimension.
SuiteResult full_faithfulness_suite(std::uint64_t seed, std::size_t cases = 200);

/// Antichain-to-point collapse (counit 2 vs 1, Hom 1 vs 2) and the
/// antidiagonal with k = 2..10 points (exactly k components).
SuiteResult negative_control_suite();

/// Random staircase module pairs in dimension 1 to 3 with at most 4
/// breakpoints per axis and dimensions at most 3; phi drawn from a Hom basis
/// over the common refinement; kernel, image and cokernel crosschecked
/// against the oracle on product sample grids.
SuiteResult abelian_suite(std::uint64_t seed, std::size_t scenarios = 50);

/// The nested-quadrant cases: the literal restriction F[[(0,0),inf)] ->
/// F[[(1,1),inf)] and its kernel, plus the two natural presentations of the
/// L-shaped interval (a cokernel of an inclusion and a kernel between
/// complements), each compared with interval_module and the oracle.
SuiteResult lshape_suite();

/// Closure operator laws on random staircase sets.
SuiteResult closure_law_suite(std::uint64_t seed, std::size_t cases = 200);

/// leq and topological components agree on closed upset meet open downset;
/// components of random intervals are intervals.
SuiteResult component_suite(std::uint64_t seed, std::size_t cases = 100);

/// U minus V for closed upsets U, V is a closed-class interval that
/// closed_interval_decompose reconstructs; [1,2]^2 is rejected.
SuiteResult interval_suite(std::uint64_t seed, std::size_t cases = 100);

/// Every suite above, in that order.
std::vector<SuiteResult> run_all_suites(std::uint64_t seed);

}  // namespace tame
