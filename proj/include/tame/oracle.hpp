#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "tame/pipeline.hpp"
#include "tame/staircase.hpp"

namespace tame {

using Point = std::vector<Rational>;

/// Finitely many distinct rational points of R^n.
struct SamplePlan {
    std::vector<Point> points;

    std::size_t dim() const { return points.empty() ? 0 : points.front().size(); }
};

/// All points of a product of per-axis coordinate lists; always closed under
/// coordinatewise suprema. Duplicate coordinates are dropped.
SamplePlan product_plan(std::vector<std::vector<Rational>> axes);

/// Per axis: every breakpoint and one point inside each open atom.
SamplePlan grid_plan(const Grid& grid);

bool is_sup_closed(const SamplePlan& plan);

/// Adds coordinatewise suprema until the plan is closed under them.
SamplePlan sup_closure(SamplePlan plan);

/// {"points": [["1/2", "0"], ...]} or {"axes": [[...], [...]]}.
SamplePlan plan_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SamplePlan& plan);
std::string format_point(const Point& x);

/// Dimension of the module at x.
std::size_t evaluate(const EncodedModule& m, const Point& x);
/// The structure map from x to y. Throws InvalidArgument unless x <= y.
Matrix evaluate(const EncodedModule& m, const Point& x, const Point& y);

/// Product order on the sample points; ids are the formatted points.
FinitePoset sample_poset(const SamplePlan& plan);

/// The module x -> M(x) over the sample poset.
PfdModule restrict_to_samples(const EncodedModule& m, const SamplePlan& plan);
PfdModule restrict_to_samples(const EncodedModule& m, const SamplePlan& plan, const PosetPtr& samples);

struct CrosscheckReport {
    Operation operation = Operation::kernel;
    bool ok = true;
    std::size_t points = 0;
    std::size_t pairs = 0;
    nlohmann::json mismatch;  ///< null when ok

    std::string summary() const;
};

nlohmann::json to_json(const CrosscheckReport& r);

/// Compares a pipeline result against the operation recomputed pointwise
/// from the inputs. phi is the morphism over the refined encoding used by
/// the run. Compares dimensions at every sample and transition ranks on
/// every comparable pair.
CrosscheckReport crosscheck_result(const EncodedModule& a, const EncodedModule& b, const PipelineResult& run,
                                   const SamplePlan& plan);

/// Runs abelian_pipeline and then crosscheck_result.
CrosscheckReport crosscheck_operation(Operation op, const EncodedModule& a, const EncodedModule& b,
                                      const PhiSpec& spec, const SamplePlan& plan);

/// Throws Mismatch carrying the report's certificate unless ok.
void require_match(const CrosscheckReport& r);

}  // namespace tame
