#include "tame/pipeline.hpp"

#include "tame/error.hpp"

namespace tame {

EncodedModule validated(const EncodedModule& m) {
    if (!(m.module.base() == m.encoding.target || *m.module.base() == *m.encoding.target))
        throw DimensionMismatch("module base differs from the encoding target");
    auto v = validate_encoding(m.encoding);
    validate_module(m.module);
    if (v.pruned.empty()) return EncodedModule{v.encoding, PfdModule(v.encoding.target, m.module.dims(),
                                                                     m.module.cover_maps(), m.module.prime())};
    std::vector<std::size_t> keep;
    for (const auto& id : v.encoding.target->ids()) keep.push_back(m.encoding.target->index_of(id));
    auto inclusion = MonotoneMap::make(v.encoding.target, m.module.base(), std::move(keep));
    return EncodedModule{v.encoding, pullback(inclusion, m.module)};
}

EncodedModule interval_encoded(const CellSet& interval, Prime p) {
    if (!is_interval(interval)) throw NotInterval("set is not an interval of R^n");
    auto chain = share(FinitePoset::chain({"below", "in", "above"}));
    auto e = encoding_from_fibers(interval.grid(), chain, {{"in", interval}, {"above", up_closure(interval) - interval}},
                                  "below");
    Subset in(3);
    in.set(1);
    return validated(EncodedModule{std::move(e), interval_module(chain, in, p)});
}

Operation parse_operation(const std::string& name) {
    if (name == "kernel") return Operation::kernel;
    if (name == "image") return Operation::image;
    if (name == "cokernel") return Operation::cokernel;
    throw InvalidArgument("unknown operation '" + name + "'");
}

std::string to_string(Operation op) {
    switch (op) {
        case Operation::kernel: return "kernel";
        case Operation::image: return "image";
        case Operation::cokernel: return "cokernel";
    }
    return "?";
}

PhiSpec PhiSpec::explicit_components(nlohmann::json components) {
    PhiSpec s;
    s.kind = Kind::components;
    s.components = std::move(components);
    return s;
}

PhiSpec PhiSpec::from_hom_basis(std::vector<long long> coefficients) {
    PhiSpec s;
    s.kind = Kind::hom_coefficients;
    s.coefficients = std::move(coefficients);
    return s;
}

CommonRefinement common_refinement(const EncodedModule& a, const EncodedModule& b) {
    const auto va = validated(a);
    const auto vb = validated(b);
    if (va.module.prime() != vb.module.prime()) throw InvalidArgument("modules over different fields");
    const auto common = common_encoding(va.encoding, vb.encoding);
    auto refined = connective_refinement(common.encoding);
    auto to_first = compose(common.to_first, refined.to_original);
    auto to_second = compose(common.to_second, refined.to_original);
    auto first = pullback(to_first, va.module);
    auto second = pullback(to_second, vb.module);
    return CommonRefinement{std::move(refined.encoding), std::move(to_first), std::move(to_second), std::move(first),
                            std::move(second)};
}

Morphism assemble_morphism(const CommonRefinement& common, const PhiSpec& spec) {
    Morphism phi = spec.kind == PhiSpec::Kind::components
                       ? morphism_from_json(spec.components, common.first, common.second)
                       : combine(hom_space(common.first, common.second), common.first, common.second, spec.coefficients);
    check_naturality(phi);
    return phi;
}

PipelineResult run_operation(CommonRefinement common, Morphism phi, Operation op) {
    AbelianResult out = [&] {
        switch (op) {
            case Operation::kernel: return kernel(phi);
            case Operation::image: return image(phi);
            case Operation::cokernel: return cokernel(phi);
        }
        throw InvalidArgument("unknown operation");
    }();
    EncodedModule result{common.encoding, out.module};
    auto cert = fibers_in_closed_class(common.encoding);
    return PipelineResult{std::move(common), std::move(phi), op, std::move(out), std::move(result), std::move(cert)};
}

PipelineResult abelian_pipeline(const EncodedModule& a, const EncodedModule& b, const PhiSpec& spec, Operation op) {
    auto common = common_refinement(a, b);
    auto phi = assemble_morphism(common, spec);
    return run_operation(std::move(common), std::move(phi), op);
}

nlohmann::json to_json(const EncodedModule& m) {
    return {{"encoding", to_json(m.encoding)}, {"module", to_json(m.module)}};
}

nlohmann::json to_json(const PipelineResult& r) {
    return {{"operation", to_string(r.operation)},
            {"encoding", to_json(r.result.encoding)},
            {"module", to_json(r.result.module)},
            {"morphism", to_json(r.phi)},
            {"certification", to_json(r.certification)}};
}

}  // namespace tame
