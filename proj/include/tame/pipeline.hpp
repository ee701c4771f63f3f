#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "tame/encoding.hpp"
#include "tame/persistence.hpp"

namespace tame {

/// A module on R^n presented as the pullback of a finite module along an
/// encoding. module.base() must be encoding.target.
struct EncodedModule {
    Encoding encoding;
    PfdModule module;
};

/// Checks the encoding, that the bases match (DimensionMismatch) and that
/// the module commutes. Elements with empty fibers are dropped, restricting
/// the module to the remaining subposet.
EncodedModule validated(const EncodedModule& m);

/// F[I] for a staircase interval I: the target is the chain
/// below < in < above with fibers complement(up I), I, up(I) minus I (empty
/// ones pruned), and the module is F at "in". Throws NotInterval.
EncodedModule interval_encoded(const CellSet& interval, Prime p = kDefaultPrime);

enum class Operation { kernel, image, cokernel };

Operation parse_operation(const std::string& name);
std::string to_string(Operation op);

/// How the morphism between the two inputs is given. Morphisms are always
/// expressed over the common connective refinement of the two encodings.
struct PhiSpec {
    enum class Kind { components, hom_coefficients };
    Kind kind = Kind::hom_coefficients;
    /// {refined-id: matrix}; unlisted components are zero.
    nlohmann::json components = nlohmann::json::object();
    /// Coefficients on the basis returned by hom_space.
    std::vector<long long> coefficients;

    static PhiSpec explicit_components(nlohmann::json components);
    static PhiSpec from_hom_basis(std::vector<long long> coefficients);
};

struct CommonRefinement {
    Encoding encoding;     ///< connective refinement of the common encoding
    MonotoneMap to_first;  ///< refined target -> first input's target
    MonotoneMap to_second;
    PfdModule first;  ///< first input pulled back to the refined target
    PfdModule second;
};

/// Steps 1 to 3: common encoding, connective refinement, pullbacks.
CommonRefinement common_refinement(const EncodedModule& a, const EncodedModule& b);

/// Builds phi and checks naturality (NoSolution otherwise).
Morphism assemble_morphism(const CommonRefinement& common, const PhiSpec& spec);

struct PipelineResult {
    CommonRefinement common;
    Morphism phi;
    Operation operation;
    AbelianResult op;
    EncodedModule result;  ///< op.module over the refined encoding
    ClosedClassReport certification;
};

/// The full run: validate inputs, refine, assemble phi, compute the
/// operation over the refined poset and certify the refined fibers.
PipelineResult abelian_pipeline(const EncodedModule& a, const EncodedModule& b, const PhiSpec& spec, Operation op);

/// Steps 5 to 7 for an already assembled phi.
PipelineResult run_operation(CommonRefinement common, Morphism phi, Operation op);

/// {encoding, module}
nlohmann::json to_json(const EncodedModule& m);
/// {operation, encoding, module, morphism, certification}
nlohmann::json to_json(const PipelineResult& r);

}  // namespace tame
