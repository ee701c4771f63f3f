#include "tame/suite.hpp"

#include <optional>

#include "tame/error.hpp"
#include "tame/oracle.hpp"
#include "tame/parallel.hpp"
#include "tame/random.hpp"

namespace tame {

namespace {

using Failure = std::optional<nlohmann::json>;

Rng case_rng(std::uint64_t seed, std::uint64_t salt, std::size_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(salt), static_cast<std::uint32_t>(index)};
    return Rng(seq);
}

// Runs every case (in parallel) and keeps the first failure by index.
template <class Case>
SuiteResult run_cases(std::string name, std::size_t cases, Case&& body) {
    std::vector<Failure> failures(cases);
    for_each_index(cases, true, [&](std::size_t i) {
        try {
            failures[i] = body(i);
        } catch (const Error& e) {
            failures[i] = nlohmann::json{{"error", e.code()}, {"message", e.what()}, {"certificate", e.certificate()}};
        }
    });
    SuiteResult r;
    r.name = std::move(name);
    r.cases = cases;
    for (std::size_t i = 0; i < cases; ++i) {
        if (!failures[i]) continue;
        if (r.failures++ == 0) r.details["first_failure"] = {{"case", i}, {"detail", *failures[i]}};
    }
    return r;
}

struct FfCase {
    MonotoneMap map;  ///< source -> refined target, passes the ff conditions
    Rng rng;
};

FfCase make_ff_case(std::uint64_t seed, std::size_t i) {
    auto rng = case_rng(seed, 1, i);
    auto s = share(random_poset(rng, 1 + uniform_index(rng, 10), 0.3));
    auto t = share(random_poset(rng, 1 + uniform_index(rng, 10), 0.3));
    auto e = random_monotone_map(rng, s, t);
    return FfCase{component_refinement(e).to_refined, std::move(rng)};
}

CellSet upset_at(std::int64_t x, std::int64_t y) {
    const Coordinate c[2] = {Rational(x), Rational(y)};
    return principal_upset(c);
}

nlohmann::json identity_where_both(const CommonRefinement& c) {
    nlohmann::json comps = nlohmann::json::object();
    const auto& t = *c.encoding.target;
    for (std::size_t x = 0; x < t.size(); ++x)
        if (c.first.dim(x) == 1 && c.second.dim(x) == 1) comps[t.id(x)] = {{1}};
    return comps;
}

// Compares a result with interval_module of the elements whose fibers
// make up s: equal dimensions and equal cover map ranks.
Failure compare_with_interval(const EncodedModule& result, const CellSet& s) {
    const auto fibers = all_fibers(result.encoding);
    Subset members(fibers.size());
    for (std::size_t x = 0; x < fibers.size(); ++x) {
        if (fibers[x].subset_of(s)) members.set(x);
        else if (!(fibers[x] & s).empty()) return nlohmann::json{{"reason", "interval is not a union of fibers"}};
    }
    const auto expect = interval_module(result.encoding.target, members, result.module.prime());
    if (expect.dims() != result.module.dims())
        return nlohmann::json{{"reason", "dimensions differ from interval_module"},
                              {"expected", expect.dims()},
                              {"actual", result.module.dims()}};
    for (std::size_t e = 0; e < expect.cover_maps().size(); ++e)
        if (rank(expect.cover_map(e)) != rank(result.module.cover_map(e)))
            return nlohmann::json{{"reason", "cover map rank differs from interval_module"}};
    return std::nullopt;
}

SamplePlan lshape_plan() {
    std::vector<Rational> axis{Rational(-1), Rational(0), Rational(1, 2), Rational(1), Rational(2)};
    return product_plan({axis, axis});
}

bool same_partition(const std::vector<CellSet>& a, const std::vector<CellSet>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!(a[i] == b[i])) return false;
    return true;
}

}  // namespace

nlohmann::json to_json(const SuiteResult& r) {
    return {{"suite", r.name}, {"cases", r.cases}, {"failures", r.failures}, {"pass", r.pass()}, {"details", r.details}};
}

SuiteResult counit_suite(std::uint64_t seed, std::size_t cases) {
    return run_cases("counit", cases, [&](std::size_t i) -> Failure {
        auto c = make_ff_case(seed, i);
        auto m = random_module(c.rng, c.map.target, 4);
        for (const auto& v : counit_check(c.map, m))
            if (!v.iso())
                return nlohmann::json{{"element", c.map.target->id(v.element)},
                                      {"colimit_dim", v.colimit_dim},
                                      {"target_dim", v.target_dim},
                                      {"rank", v.rank}};
        return std::nullopt;
    });
}

SuiteResult full_faithfulness_suite(std::uint64_t seed, std::size_t cases) {
    return run_cases("full_faithfulness", cases, [&](std::size_t i) -> Failure {
        auto c = make_ff_case(seed, i);
        // Skip the module drawn by the counit suite so both suites see the
        // same maps but independent module pairs.
        (void)random_module(c.rng, c.map.target, 4);
        auto m = random_module(c.rng, c.map.target, 4);
        auto n = random_module(c.rng, c.map.target, 4);
        const auto below = hom_space(m, n).dimension;
        const auto above = hom_space(pullback(c.map, m), pullback(c.map, n)).dimension;
        if (below != above) return nlohmann::json{{"hom_target", below}, {"hom_pullback", above}};
        return std::nullopt;
    });
}

SuiteResult negative_control_suite() {
    SuiteResult r;
    r.name = "negative_control";
    auto fail = [&](nlohmann::json detail) {
        if (r.failures++ == 0) r.details["first_failure"] = std::move(detail);
    };

    auto pt = share(FinitePoset::antichain({"*"}));
    auto anti = share(FinitePoset::antichain({"x", "y"}));
    auto collapse = MonotoneMap::make(anti, pt, {0, 0});
    auto f = PfdModule::constant(pt, 1);
    const auto v = counit_check(collapse, f).at(0);
    ++r.cases;
    r.details["collapse_counit"] = {{"colimit_dim", v.colimit_dim}, {"target_dim", v.target_dim},
                                    {"injective", v.injective}};
    if (v.colimit_dim != 2 || v.target_dim != 1 || v.injective) fail({{"check", "collapse counit"}});
    const auto hom_below = hom_space(f, f).dimension;
    const auto hom_above = hom_space(pullback(collapse, f), pullback(collapse, f)).dimension;
    ++r.cases;
    r.details["collapse_hom"] = {{"target", hom_below}, {"pullback", hom_above}};
    if (hom_below != 1 || hom_above != 2) fail({{"check", "collapse hom"}});

    nlohmann::json counts = nlohmann::json::object();
    for (std::size_t k = 2; k <= 10; ++k) {
        ++r.cases;
        const auto e = antidiagonal_encoding(k);
        const auto refined = connective_refinement(e);
        std::size_t diag = 0;
        for (std::size_t x = 0; x < refined.encoding.target->size(); ++x)
            if (e.target->id(refined.to_original(x)) == "diag") ++diag;
        const auto components = leq_components_cells(fiber(e, "diag")).size();
        counts[std::to_string(k)] = {{"components", components}, {"refined_target", refined.encoding.target->size()}};
        if (diag != k || components != k || refined.encoding.target->size() != k + 2)
            fail({{"check", "antidiagonal"}, {"k", k}, {"components", diag}});
    }
    r.details["antidiagonal"] = counts;
    return r;
}

SuiteResult abelian_suite(std::uint64_t seed, std::size_t scenarios) {
    std::vector<std::size_t> nonzero(scenarios, 0), points(scenarios, 0), pairs(scenarios, 0);
    auto r = run_cases("abelian_pipeline", scenarios, [&](std::size_t i) -> Failure {
        auto rng = case_rng(seed, 4, i);
        const auto dim = 1 + uniform_index(rng, 3);
        const auto grid = random_grid(rng, dim, 4);
        auto a = random_encoded_module(rng, grid, 3);
        auto b = random_encoded_module(rng, grid, 3);
        auto common = common_refinement(a, b);
        const auto hom = hom_space(common.first, common.second);
        std::vector<long long> coeffs(hom.dimension);
        for (auto& c : coeffs) c = static_cast<long long>(rng() % common.first.prime());
        auto phi = combine(hom, common.first, common.second, coeffs);
        for (const auto& c : phi.components)
            if (!c.is_zero()) {
                nonzero[i] = 1;
                break;
            }

        // Product plans are closed under suprema. In dimension 3 each axis
        // keeps at most 5 of its sample coordinates.
        std::vector<std::vector<Rational>> axes(dim);
        const auto full = grid_plan(*common.encoding.grid);
        for (const auto& x : full.points)
            for (std::size_t k = 0; k < dim; ++k) axes[k].push_back(x[k]);
        for (auto& ax : axes) {
            std::sort(ax.begin(), ax.end());
            ax.erase(std::unique(ax.begin(), ax.end()), ax.end());
            while (dim == 3 && ax.size() > 5) ax.erase(ax.begin() + static_cast<long>(uniform_index(rng, ax.size())));
        }
        const auto plan = product_plan(axes);

        for (auto op : {Operation::kernel, Operation::image, Operation::cokernel}) {
            auto run = run_operation(common, phi, op);
            if (!run.certification.pass) return nlohmann::json{{"operation", to_string(op)}, {"reason", "certification"}};
            const auto report = crosscheck_result(a, b, run, plan);
            points[i] += report.points;
            pairs[i] += report.pairs;
            if (!report.ok) return to_json(report);
        }
        return std::nullopt;
    });
    std::size_t nz = 0, pts = 0, prs = 0;
    for (std::size_t i = 0; i < scenarios; ++i) {
        nz += nonzero[i];
        pts += points[i];
        prs += pairs[i];
    }
    r.details["nonzero_morphisms"] = nz;
    r.details["sample_points"] = pts;
    r.details["comparable_pairs"] = prs;
    return r;
}

SuiteResult lshape_suite() {
    SuiteResult r;
    r.name = "lshape";
    const auto u1 = upset_at(0, 0), u2 = upset_at(1, 1);
    const auto l = u1 - u2;
    auto record = [&](const std::string& check, Failure f, nlohmann::json info = nlohmann::json::object()) {
        ++r.cases;
        info["pass"] = !f;
        if (f) {
            info["failure"] = *f;
            ++r.failures;
        }
        r.details[check] = std::move(info);
    };
    auto attempt = [&](const EncodedModule& a, const EncodedModule& b, Operation op) -> Failure {
        try {
            auto common = common_refinement(a, b);
            auto run = abelian_pipeline(a, b, PhiSpec::explicit_components(identity_where_both(common)), op);
            if (auto f = compare_with_interval(run.result, l)) return f;
            const auto report = crosscheck_result(a, b, run, lshape_plan());
            if (!report.ok) return to_json(report);
            return std::nullopt;
        } catch (const Error& e) {
            return nlohmann::json{{"error", e.code()}, {"message", e.what()}, {"certificate", e.certificate()}};
        }
    };

    {
        const auto a = interval_encoded(u1), b = interval_encoded(u2);
        const auto common = common_refinement(a, b);
        record("kernel_of_restriction", attempt(a, b, Operation::kernel),
               {{"hom_dimension", hom_space(common.first, common.second).dimension}});
    }
    record("cokernel_of_inclusion", attempt(interval_encoded(u2), interval_encoded(u1), Operation::cokernel));
    record("kernel_between_complements", attempt(interval_encoded(~u2), interval_encoded(~u1), Operation::kernel));
    return r;
}

SuiteResult closure_law_suite(std::uint64_t seed, std::size_t cases) {
    const char* laws[] = {"upset_underline_is_closure", "downset_tilde_is_interior", "underline_of_difference",
                          "tilde_of_difference", "closed_class_fixed_points", "components_fixed_points"};
    constexpr std::size_t law_count = 6;
    std::vector<std::size_t> per_law(law_count, 0);
    std::vector<Failure> first(law_count);
    auto r = run_cases("closure_laws", cases * law_count, [&](std::size_t i) -> Failure {
        const auto law = i % law_count;
        auto rng = case_rng(seed, 5, i);
        auto g = share(random_grid(rng, 1 + uniform_index(rng, 3), 3));
        bool ok = true;
        switch (law) {
            case 0: {
                const auto u = coin(rng, 0.5) ? random_upset(rng, g) : random_closed_upset(rng, g) | random_upset(rng, g);
                const auto c = closure(u);
                ok = underline(u) == c && is_upset(c);
                break;
            }
            case 1: {
                const auto d = random_downset(rng, g);
                const auto in = interior(d);
                ok = tilde(d) == in && is_downset(in);
                break;
            }
            case 2: {
                const auto u = random_upset(rng, g);
                const auto v = random_closed_upset(rng, g);
                ok = underline(u & ~v) == (underline(u) & ~v);
                break;
            }
            case 3: {
                const auto u = random_upset(rng, g);
                const auto v = random_upset(rng, g);
                ok = tilde(u & ~v) == (u & tilde(~v));
                break;
            }
            default: {
                CellSet s(g);
                const auto terms = 1 + uniform_index(rng, 3);
                for (std::size_t k = 0; k < terms; ++k) s = s | (random_closed_upset(rng, g) & ~random_closed_upset(rng, g));
                if (law == 4) {
                    ok = underline(s) == s && tilde(s) == s;
                } else {
                    for (const auto& c : leq_components_cells(s)) ok = ok && underline(c) == c && tilde(c) == c;
                }
            }
        }
        if (ok) return std::nullopt;
        return nlohmann::json{{"law", laws[law]}};
    });
    r.details["laws"] = nlohmann::json::array();
    for (auto name : laws) r.details["laws"].push_back(name);
    r.details["cases_per_law"] = cases;
    return r;
}

SuiteResult component_suite(std::uint64_t seed, std::size_t cases) {
    return run_cases("components", 2 * cases, [&](std::size_t i) -> Failure {
        auto rng = case_rng(seed, 6, i);
        auto g = share(random_grid(rng, 1 + uniform_index(rng, 3), 3));
        if (i % 2 == 0) {
            // closed upset meet open downset (complement of a closed upset)
            const auto s = random_closed_upset(rng, g) & ~random_closed_upset(rng, g);
            if (!same_partition(leq_components_cells(s), topological_components(s)))
                return nlohmann::json{{"check", "leq and topological components differ"}};
        } else {
            const auto s = random_upset(rng, g) & random_downset(rng, g);
            for (const auto& c : leq_components_cells(s))
                if (!is_interval(c)) return nlohmann::json{{"check", "component is not an interval"}};
        }
        return std::nullopt;
    });
}

SuiteResult interval_suite(std::uint64_t seed, std::size_t cases) {
    auto r = run_cases("intervals", cases, [&](std::size_t i) -> Failure {
        auto rng = case_rng(seed, 7, i);
        auto g = share(random_grid(rng, 1 + uniform_index(rng, 3), 3));
        auto s = random_closed_upset(rng, g) & ~random_closed_upset(rng, g);
        for (int retry = 0; retry < 8 && s.empty(); ++retry)
            s = random_closed_upset(rng, g) & ~random_closed_upset(rng, g);
        if (!is_closed_class_interval(s)) return nlohmann::json{{"check", "not recognized as closed-class"}};
        const auto d = closed_interval_decompose(s);
        if (!((d.upper - d.lower) == s)) return nlohmann::json{{"check", "decomposition does not reconstruct"}};
        if (!is_upset(d.upper) || !is_upset(d.lower) || !(underline(d.upper) == d.upper) ||
            !(underline(d.lower) == d.lower))
            return nlohmann::json{{"check", "decomposition parts are not closed upsets"}};
        return std::nullopt;
    });
    ++r.cases;
    const Coordinate lo[2] = {Rational(1), Rational(1)};
    const std::array<Coordinate, 2> hi{Rational(2), Rational(2)};
    const auto box = principal_upset(lo) - open_upset(share(Grid::trivial(2)), hi);
    bool rejected = false;
    try {
        closed_interval_decompose(box);
    } catch (const NotClosedClass&) {
        rejected = true;
    }
    r.details["closed_box_rejected"] = rejected;
    if (!rejected && r.failures++ == 0) r.details["first_failure"] = {{"check", "[1,2]^2 accepted"}};
    return r;
}

std::vector<SuiteResult> run_all_suites(std::uint64_t seed) {
    return {counit_suite(seed),       full_faithfulness_suite(seed), negative_control_suite(),
            abelian_suite(seed),      lshape_suite(),                closure_law_suite(seed),
            component_suite(seed),    interval_suite(seed)};
}

}  // namespace tame
