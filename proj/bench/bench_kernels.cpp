// Parallel kernels against their serial references on the same inputs.

#include <benchmark/benchmark.h>

#include "tame/persistence.hpp"
#include "tame/random.hpp"
#include "tame/staircase.hpp"

using namespace tame;

namespace {

CellSet sample_set(std::size_t breakpoints) {
    Rng rng(17);
    std::vector<Rational> axis;
    for (std::size_t i = 0; i < breakpoints; ++i) axis.emplace_back(static_cast<std::int64_t>(i));
    auto grid = share(Grid({axis, axis, axis}));
    return random_cellset(rng, grid, 0.3);
}

// n x n grid poset with a random module of dimension at most 3.
struct ModuleCase {
    PfdModule m;
    Morphism phi;
};

ModuleCase module_case(std::size_t n) {
    Rng rng(5);
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < n; ++i) ids.push_back(std::to_string(i));
    auto chain = share(FinitePoset::chain(ids));
    auto grid = product(chain, chain).poset;
    auto m = random_module(rng, grid, 3);
    auto n2 = random_module(rng, grid, 3);
    return {m, random_morphism(rng, m, n2)};
}

}  // namespace

static void BM_up_closure(benchmark::State& st) {
    const auto s = sample_set(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(up_closure(s));
}
static void BM_up_closure_serial(benchmark::State& st) {
    const auto s = sample_set(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(serial::up_closure(s));
}
static void BM_underline(benchmark::State& st) {
    const auto s = sample_set(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(underline(s));
}
static void BM_underline_serial(benchmark::State& st) {
    const auto s = sample_set(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(serial::underline(s));
}
static void BM_components(benchmark::State& st) {
    const auto s = sample_set(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(leq_components_cells(s));
}
static void BM_components_serial(benchmark::State& st) {
    const auto s = sample_set(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(serial::leq_components_cells(s));
}
BENCHMARK(BM_up_closure)->Arg(4)->Arg(8);
BENCHMARK(BM_up_closure_serial)->Arg(4)->Arg(8);
BENCHMARK(BM_underline)->Arg(4)->Arg(8);
BENCHMARK(BM_underline_serial)->Arg(4)->Arg(8);
BENCHMARK(BM_components)->Arg(4)->Arg(8);
BENCHMARK(BM_components_serial)->Arg(4)->Arg(8);

static void BM_validate_module(benchmark::State& st) {
    const auto c = module_case(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st) validate_module(c.m);
}
static void BM_validate_module_serial(benchmark::State& st) {
    const auto c = module_case(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st) serial::validate_module(c.m);
}
static void BM_kernel(benchmark::State& st) {
    const auto c = module_case(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(kernel(c.phi));
}
static void BM_kernel_serial(benchmark::State& st) {
    const auto c = module_case(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(serial::kernel(c.phi));
}
static void BM_counit(benchmark::State& st) {
    Rng rng(9);
    auto s = share(random_poset(rng, static_cast<std::size_t>(st.range(0)), 0.2));
    auto t = share(random_poset(rng, static_cast<std::size_t>(st.range(0)) / 2, 0.3));
    auto e = random_monotone_map(rng, s, t);
    auto m = random_module(rng, t, 3);
    for (auto _ : st) benchmark::DoNotOptimize(counit_check(e, m));
}
static void BM_counit_serial(benchmark::State& st) {
    Rng rng(9);
    auto s = share(random_poset(rng, static_cast<std::size_t>(st.range(0)), 0.2));
    auto t = share(random_poset(rng, static_cast<std::size_t>(st.range(0)) / 2, 0.3));
    auto e = random_monotone_map(rng, s, t);
    auto m = random_module(rng, t, 3);
    for (auto _ : st) benchmark::DoNotOptimize(serial::counit_check(e, m));
}
BENCHMARK(BM_validate_module)->Arg(4)->Arg(6);
BENCHMARK(BM_validate_module_serial)->Arg(4)->Arg(6);
BENCHMARK(BM_kernel)->Arg(4)->Arg(8);
BENCHMARK(BM_kernel_serial)->Arg(4)->Arg(8);
BENCHMARK(BM_counit)->Arg(20)->Arg(40);
BENCHMARK(BM_counit_serial)->Arg(20)->Arg(40);

BENCHMARK_MAIN();
