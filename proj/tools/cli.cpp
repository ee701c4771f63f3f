#include "cli.hpp"

#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include <CLI11.hpp>

#include "tame/error.hpp"
#include "tame/oracle.hpp"
#include "tame/parallel.hpp"
#include "tame/pipeline.hpp"
#include "tame/suite.hpp"

namespace tame::cli {

namespace {

using nlohmann::json;

const std::vector<std::string> kCommands = {"validate", "common",   "refine",     "check-ff",   "counit",
                                            "hom",      "kernel",   "cokernel",   "image",      "components",
                                            "closure",  "decompose", "crosscheck", "export-dot", "suite"};

// Named entities of a manifest, all resolved up front so that every
// cross-reference is checked before any command runs.
class Context {
public:
    Context(const json& manifest, Prime p) : manifest_(manifest), p_(p) {
        if (!manifest.is_object()) throw ParseError("manifest must be a JSON object");
        for (const char* key : {"posets", "sets", "maps", "encodings", "modules", "encoded", "morphisms", "plans", "phis"})
            sections_[key] = section(key);
        for (const auto& [name, j] : sections_.at("posets").items()) posets_[name] = share(poset_from_json(j));
        for (const auto& [name, j] : sections_.at("sets").items()) sets_.emplace(name, resolve_set(j, 0));
        for (const auto& [name, j] : sections_.at("maps").items()) maps_.emplace(name, build_map(j));
        for (const auto& [name, j] : sections_.at("encodings").items()) encodings_.emplace(name, build_encoding(j));
        for (const auto& [name, j] : sections_.at("modules").items()) modules_.emplace(name, build_module(j));
        for (const auto& [name, j] : sections_.at("encoded").items()) encoded_.emplace(name, build_encoded(j));
        for (const auto& [name, j] : sections_.at("morphisms").items()) morphisms_.emplace(name, build_morphism(j));
        for (const auto& [name, j] : sections_.at("plans").items()) plans_.emplace(name, plan_from_json(j));
        for (const auto& [name, j] : sections_.at("phis").items()) phis_.emplace(name, build_phi(j));
    }

    Prime prime() const { return p_; }

    PosetPtr poset(const json& ref) const {
        if (ref.is_string()) return lookup(posets_, ref, "poset");
        return share(poset_from_json(ref));
    }
    CellSet set(const json& ref) const {
        if (ref.is_string()) return lookup(sets_, ref, "set");
        return resolve_set(ref, 0);
    }
    const MonotoneMap& map(const json& ref) const { return lookup(maps_, ref, "map"); }
    const Encoding& encoding(const json& ref) const { return lookup(encodings_, ref, "encoding"); }
    const PfdModule& module(const json& ref) const { return lookup(modules_, ref, "module"); }
    const EncodedModule& encoded(const json& ref) const { return lookup(encoded_, ref, "encoded module"); }
    const Morphism& morphism(const json& ref) const { return lookup(morphisms_, ref, "morphism"); }
    SamplePlan plan(const json& ref) const {
        if (ref.is_string()) return lookup(plans_, ref, "plan");
        return plan_from_json(ref);
    }
    PhiSpec phi(const json& ref) const {
        if (ref.is_string()) return lookup(phis_, ref, "phi");
        return build_phi(ref);
    }

    bool has_encoded(const json& ref) const { return ref.is_string() && encoded_.count(ref.get<std::string>()); }

    const auto& posets() const { return posets_; }
    const auto& maps() const { return maps_; }
    const auto& encodings() const { return encodings_; }
    const auto& modules() const { return modules_; }
    const auto& encoded() const { return encoded_; }
    const auto& morphisms() const { return morphisms_; }

private:
    json section(const char* key) const {
        if (!manifest_.contains(key)) return json::object();
        const auto& s = manifest_[key];
        if (!s.is_object()) throw ParseError(std::string("manifest section '") + key + "' must be an object");
        return s;
    }

    template <class Map>
    static const typename Map::mapped_type& lookup(const Map& m, const json& ref, const char* kind) {
        if (!ref.is_string()) throw ParseError(std::string(kind) + " reference must be a name");
        const auto it = m.find(ref.get<std::string>());
        if (it == m.end())
            throw UnresolvedReference(std::string("no ") + kind + " named '" + ref.get<std::string>() + "'",
                                      {{"kind", kind}, {"name", ref}});
        return it->second;
    }

    // Staircase expressions may use {"ref": name} to refer to earlier sets.
    json expand_refs(const json& j, int depth) const {
        if (depth > 64) throw ParseError("set references nest too deeply");
        if (j.is_object() && j.size() == 1 && j.contains("ref")) {
            const auto& name = j["ref"];
            if (!name.is_string()) throw ParseError("set reference must be a name");
            const auto& sets = section("sets");
            if (!sets.contains(name.get<std::string>()))
                throw UnresolvedReference("no set named '" + name.get<std::string>() + "'",
                                          {{"kind", "set"}, {"name", name}});
            return expand_refs(sets[name.get<std::string>()], depth + 1);
        }
        if (j.is_object() && j.contains("args") && j["args"].is_array()) {
            json out = j;
            for (auto& a : out["args"]) a = expand_refs(a, depth + 1);
            return out;
        }
        return j;
    }

    CellSet resolve_set(const json& j, int depth) const { return cellset_from_json(expand_refs(j, depth)); }

    // {"source": poset, "target": poset, "images": {source-id: target-id}}
    MonotoneMap build_map(const json& j) const {
        if (!j.is_object() || !j.contains("source") || !j.contains("target") || !j.contains("images"))
            throw ParseError("map needs source, target and images");
        auto s = poset(j["source"]), t = poset(j["target"]);
        const auto& images = j["images"];
        if (!images.is_object()) throw ParseError("map images must be an object");
        std::vector<std::size_t> assignment(s->size());
        std::vector<bool> seen(s->size(), false);
        for (const auto& [id, image] : images.items()) {
            if (!image.is_string()) throw ParseError("image of " + id + " must be an element id");
            const auto x = s->index_of(id);
            assignment[x] = t->index_of(image.get<std::string>());
            seen[x] = true;
        }
        for (std::size_t x = 0; x < s->size(); ++x)
            if (!seen[x]) throw ParseError("map has no image for " + s->id(x), {{"element", s->id(x)}});
        return MonotoneMap::make(s, t, std::move(assignment));
    }

    Encoding build_encoding(const json& j) const {
        if (!j.is_object()) throw ParseError("encoding must be a JSON object");
        json body = j;
        if (body.contains("fibers") && body["fibers"].is_object())
            for (auto& [id, expr] : body["fibers"].items()) expr = expr.is_string() ? to_json(set(expr)) : expand_refs(expr, 0);
        PosetPtr target = body.contains("poset") && body["poset"].is_string() ? poset(body["poset"]) : nullptr;
        return encoding_from_json(body, target);
    }

    PfdModule build_module(const json& j) const {
        if (!j.is_object() || !j.contains("poset")) throw ParseError("module needs a poset");
        return module_from_json(j, poset(j["poset"]), p_);
    }

    // {"encoding": name|inline, "module": {dims, covers}} or {"interval": set}
    EncodedModule build_encoded(const json& j) const {
        if (!j.is_object()) throw ParseError("encoded module must be a JSON object");
        if (j.contains("interval")) return interval_encoded(set(j["interval"]), p_);
        if (!j.contains("encoding") || !j.contains("module")) throw ParseError("encoded module needs encoding and module");
        auto e = j["encoding"].is_string() ? encoding(j["encoding"]) : build_encoding(j["encoding"]);
        auto m = j["module"].is_string() ? module(j["module"]) : module_from_json(j["module"], e.target, p_);
        return EncodedModule{std::move(e), std::move(m)};
    }

    Morphism build_morphism(const json& j) const {
        if (!j.is_object() || !j.contains("source") || !j.contains("target"))
            throw ParseError("morphism needs source and target modules");
        return morphism_from_json(j.value("components", json::object()), module(j["source"]), module(j["target"]));
    }

    static PhiSpec build_phi(const json& j) {
        if (!j.is_object()) throw ParseError("phi must be an object");
        if (j.contains("coefficients")) {
            if (!j["coefficients"].is_array()) throw ParseError("phi coefficients must be an array");
            std::vector<long long> c;
            for (const auto& v : j["coefficients"]) {
                if (!v.is_number_integer()) throw ParseError("phi coefficients must be integers");
                c.push_back(v.get<long long>());
            }
            return PhiSpec::from_hom_basis(std::move(c));
        }
        return PhiSpec::explicit_components(j.value("components", json::object()));
    }

    json manifest_;
    std::map<std::string, json> sections_;
    Prime p_;
    std::map<std::string, PosetPtr> posets_;
    std::map<std::string, CellSet> sets_;
    std::map<std::string, MonotoneMap> maps_;
    std::map<std::string, Encoding> encodings_;
    std::map<std::string, PfdModule> modules_;
    std::map<std::string, EncodedModule> encoded_;
    std::map<std::string, Morphism> morphisms_;
    std::map<std::string, SamplePlan> plans_;
    std::map<std::string, PhiSpec> phis_;
};

json error_json(const Error& e) { return {{"error", e.code()}, {"message", e.what()}, {"certificate", e.certificate()}}; }

json map_json(const MonotoneMap& f) {
    json out = json::object();
    for (std::size_t x = 0; x < f.source->size(); ++x) out[f.source->id(x)] = f.target->id(f(x));
    return out;
}

json cellsets_json(const std::vector<CellSet>& sets) {
    json out = json::array();
    for (const auto& s : sets) out.push_back(to_json(s));
    return out;
}

// A command whose computation succeeded but whose certificate did not hold.
struct Failed {
    json result;
    json error;
};

const json& arg(const json& cmd, const char* key) {
    if (!cmd.contains(key)) throw ParseError(std::string("command needs '") + key + "'");
    return cmd[key];
}

using Outcome = std::variant<json, Failed>;

Outcome cmd_validate(const Context& ctx, const json& cmd) {
    json report = {{"validated", json::array()}, {"pruned", json::object()}};
    auto note = [&](const std::string& kind, const std::string& name) { report["validated"].push_back(kind + ":" + name); };
    auto check_encoded = [&](const std::string& name, const EncodedModule& m) {
        auto v = validated(m);
        if (!v.encoding.target->size() || m.encoding.target->size() != v.encoding.target->size()) {
            json pruned = json::array();
            for (const auto& id : m.encoding.target->ids())
                if (!v.encoding.target->find(id)) pruned.push_back(id);
            report["pruned"][name] = pruned;
        }
        note("encoded", name);
    };
    auto check_encoding = [&](const std::string& name, const Encoding& e) {
        auto v = validate_encoding(e);
        if (!v.pruned.empty()) report["pruned"][name] = v.pruned;
        note("encoding", name);
    };
    bool selected = false;
    if (cmd.contains("encoding")) {
        selected = true;
        check_encoding(cmd["encoding"], ctx.encoding(cmd["encoding"]));
    }
    if (cmd.contains("module")) {
        selected = true;
        validate_module(ctx.module(cmd["module"]));
        note("module", cmd["module"]);
    }
    if (cmd.contains("encoded")) {
        selected = true;
        check_encoded(cmd["encoded"], ctx.encoded(cmd["encoded"]));
    }
    if (cmd.contains("morphism")) {
        selected = true;
        check_naturality(ctx.morphism(cmd["morphism"]));
        note("morphism", cmd["morphism"]);
    }
    if (cmd.contains("map")) {
        selected = true;
        ctx.map(cmd["map"]);
        note("map", cmd["map"]);
    }
    if (!selected) {
        for (const auto& [name, p] : ctx.posets()) note("poset", name);
        for (const auto& [name, f] : ctx.maps()) note("map", name);
        for (const auto& [name, e] : ctx.encodings()) check_encoding(name, e);
        for (const auto& [name, m] : ctx.modules()) {
            validate_module(m);
            note("module", name);
        }
        for (const auto& [name, m] : ctx.encoded()) check_encoded(name, m);
        for (const auto& [name, phi] : ctx.morphisms()) {
            check_naturality(phi);
            note("morphism", name);
        }
    }
    return report;
}

Outcome cmd_common(const Context& ctx, const json& cmd) {
    const auto& a = arg(cmd, "first");
    const auto& b = arg(cmd, "second");
    if (ctx.has_encoded(a) && ctx.has_encoded(b)) {
        auto c = common_refinement(ctx.encoded(a), ctx.encoded(b));
        return json{{"encoding", to_json(c.encoding)},
                    {"to_first", map_json(c.to_first)},
                    {"to_second", map_json(c.to_second)},
                    {"first", to_json(c.first)},
                    {"second", to_json(c.second)}};
    }
    auto c = common_encoding(ctx.encoding(a), ctx.encoding(b));
    return json{{"encoding", to_json(c.encoding)}, {"to_first", map_json(c.to_first)}, {"to_second", map_json(c.to_second)}};
}

Outcome cmd_refine(const Context& ctx, const json& cmd) {
    if (cmd.contains("map")) {
        auto r = component_refinement(ctx.map(cmd["map"]));
        return json{{"refined", to_json(*r.refined)},
                    {"to_refined", map_json(r.to_refined)},
                    {"projection", map_json(r.projection)}};
    }
    auto r = connective_refinement(ctx.encoding(arg(cmd, "encoding")));
    return json{{"encoding", to_json(r.encoding)}, {"to_original", map_json(r.to_original)}};
}

Outcome cmd_check_ff(const Context& ctx, const json& cmd) {
    const auto& f = ctx.map(arg(cmd, "map"));
    const auto d = diagnose_ff_conditions(f);
    json bad = json::array();
    for (auto q : d.bad_fibers) bad.push_back(f.target->id(q));
    json report = {{"order_generated", d.order_generated}, {"fibers_connected", d.fibers_connected},
                   {"bad_fibers", bad}, {"ok", d.ok()}};
    if (d.ok()) return report;
    return Failed{report, {{"error", "ConditionsFailed"},
                           {"message", "map does not satisfy the full-faithfulness conditions"},
                           {"certificate", {{"order_generated", d.order_generated}, {"bad_fibers", bad}}}}};
}

Outcome cmd_counit(const Context& ctx, const json& cmd) {
    const auto& f = ctx.map(arg(cmd, "map"));
    const auto& m = ctx.module(arg(cmd, "module"));
    const auto verdicts = counit_check(f, m);
    json not_injective = json::array(), not_surjective = json::array();
    for (const auto& v : verdicts) {
        if (!v.injective) not_injective.push_back(f.target->id(v.element));
        if (!v.surjective) not_surjective.push_back(f.target->id(v.element));
    }
    json report = {{"verdicts", to_json(verdicts, *f.target)},
                   {"iso", not_injective.empty() && not_surjective.empty()}};
    if (report["iso"]) return report;
    std::string message;
    auto list = [](const json& ids) {
        std::string s;
        for (const auto& id : ids) s += (s.empty() ? "" : ", ") + id.get<std::string>();
        return s;
    };
    if (!not_injective.empty()) message = "not injective at " + list(not_injective);
    if (!not_surjective.empty()) message += (message.empty() ? "" : "; ") + std::string("not surjective at ") + list(not_surjective);
    return Failed{report, {{"error", "CounitNotIso"},
                           {"message", message},
                           {"certificate", {{"not_injective", not_injective}, {"not_surjective", not_surjective}}}}};
}

Outcome cmd_hom(const Context& ctx, const json& cmd) {
    if (cmd.contains("first")) {
        auto c = common_refinement(ctx.encoded(cmd["first"]), ctx.encoded(arg(cmd, "second")));
        const auto h = hom_space(c.first, c.second);
        json basis = json::array();
        for (const auto& b : h.basis) basis.push_back(to_json(b));
        return json{{"dimension", h.dimension}, {"basis", basis}, {"encoding", to_json(c.encoding)}};
    }
    const auto h = hom_space(ctx.module(arg(cmd, "source")), ctx.module(arg(cmd, "target")));
    json basis = json::array();
    for (const auto& b : h.basis) basis.push_back(to_json(b));
    return json{{"dimension", h.dimension}, {"basis", basis}};
}

Outcome cmd_abelian(const Context& ctx, const json& cmd, Operation op) {
    if (cmd.contains("morphism")) {
        const auto& phi = ctx.morphism(cmd["morphism"]);
        const auto r = op == Operation::kernel ? kernel(phi) : op == Operation::image ? image(phi) : cokernel(phi);
        return json{{"operation", to_string(op)}, {"module", to_json(r.module)}, {"map", to_json(r.map)}};
    }
    const auto spec = cmd.contains("phi") ? ctx.phi(cmd["phi"]) : PhiSpec::from_hom_basis({});
    const auto run = abelian_pipeline(ctx.encoded(arg(cmd, "first")), ctx.encoded(arg(cmd, "second")), spec, op);
    auto report = to_json(run);
    if (run.certification.pass) return report;
    return Failed{report, {{"error", "NotClosedClass"},
                           {"message", "a refined fiber failed the closed-class check"},
                           {"certificate", to_json(run.certification)}}};
}

Outcome cmd_components(const Context& ctx, const json& cmd) {
    if (cmd.contains("poset")) {
        const auto p = ctx.poset(cmd["poset"]);
        Subset s(p->size());
        for (const auto& id : arg(cmd, "elements")) s.set(p->index_of(id.get<std::string>()));
        json out = json::array();
        for (const auto& comp : leq_components(*p, s)) {
            json ids = json::array();
            for (auto x : comp) ids.push_back(p->id(x));
            out.push_back(ids);
        }
        return json{{"components", out}};
    }
    const auto s = ctx.set(arg(cmd, "set"));
    const auto leq = leq_components_cells(s);
    const auto top = topological_components(s);
    bool agree = leq.size() == top.size();
    for (std::size_t i = 0; agree && i < leq.size(); ++i) agree = leq[i] == top[i];
    return json{{"leq", cellsets_json(leq)}, {"topological", cellsets_json(top)}, {"agree", agree}};
}

Outcome cmd_closure(const Context& ctx, const json& cmd) {
    const auto s = ctx.set(arg(cmd, "set"));
    return json{{"underline", to_json(underline(s))},
                {"tilde", to_json(tilde(s))},
                {"closure", to_json(closure(s))},
                {"interior", to_json(interior(s))},
                {"fixed", is_fixed_by_closures(s)}};
}

Outcome cmd_decompose(const Context& ctx, const json& cmd) {
    const auto d = closed_interval_decompose(ctx.set(arg(cmd, "set")));
    return json{{"upper", to_json(d.upper)}, {"lower", to_json(d.lower)}};
}

Outcome cmd_crosscheck(const Context& ctx, const json& cmd) {
    const auto op = parse_operation(arg(cmd, "operation").get<std::string>());
    const auto& a = ctx.encoded(arg(cmd, "first"));
    const auto& b = ctx.encoded(arg(cmd, "second"));
    const auto spec = cmd.contains("phi") ? ctx.phi(cmd["phi"]) : PhiSpec::from_hom_basis({});
    auto run = abelian_pipeline(a, b, spec, op);
    const auto plan = cmd.contains("plan") ? ctx.plan(cmd["plan"]) : grid_plan(*run.common.encoding.grid);
    const auto report = crosscheck_result(a, b, run, plan);
    if (report.ok) return to_json(report);
    return Failed{to_json(report), {{"error", "Mismatch"}, {"message", report.summary()}, {"certificate", report.mismatch}}};
}

Outcome cmd_export_dot(const Context& ctx, const json& cmd) {
    if (cmd.contains("encoding")) return json{{"dot", to_dot(ctx.encoding(cmd["encoding"]))}};
    if (cmd.contains("encoded")) return json{{"dot", to_dot(ctx.encoded(cmd["encoded"]).encoding)}};
    if (cmd.contains("map")) return json{{"dot", to_dot(*ctx.map(cmd["map"]).target)}};
    return json{{"dot", to_dot(*ctx.poset(arg(cmd, "poset")))}};
}

Outcome cmd_suite(const json& cmd, unsigned long long seed) {
    if (cmd.contains("seed")) seed = cmd["seed"].get<unsigned long long>();
    json suites = json::array();
    json failing = json::array();
    for (const auto& r : run_all_suites(seed)) {
        suites.push_back(to_json(r));
        if (!r.pass()) failing.push_back(r.name);
    }
    json report = {{"seed", seed}, {"suites", suites}, {"pass", failing.empty()}};
    if (failing.empty()) return report;
    return Failed{report, {{"error", "SuiteFailed"}, {"message", "failing suites"}, {"certificate", failing}}};
}

Outcome dispatch(const Context& ctx, const json& cmd, unsigned long long seed) {
    const auto name = arg(cmd, "command").get<std::string>();
    if (name == "validate") return cmd_validate(ctx, cmd);
    if (name == "common") return cmd_common(ctx, cmd);
    if (name == "refine") return cmd_refine(ctx, cmd);
    if (name == "check-ff") return cmd_check_ff(ctx, cmd);
    if (name == "counit") return cmd_counit(ctx, cmd);
    if (name == "hom") return cmd_hom(ctx, cmd);
    if (name == "kernel" || name == "image" || name == "cokernel") return cmd_abelian(ctx, cmd, parse_operation(name));
    if (name == "components") return cmd_components(ctx, cmd);
    if (name == "closure") return cmd_closure(ctx, cmd);
    if (name == "decompose") return cmd_decompose(ctx, cmd);
    if (name == "crosscheck") return cmd_crosscheck(ctx, cmd);
    if (name == "export-dot") return cmd_export_dot(ctx, cmd);
    if (name == "suite") return cmd_suite(cmd, seed);
    throw ParseError("unknown command '" + name + "'");
}

json execute_in(const Context& ctx, const json& cmd, unsigned long long seed) {
    json report = {{"command", cmd.is_object() ? cmd.value("command", "") : ""}};
    try {
        if (!cmd.is_object()) throw ParseError("command must be a JSON object");
        auto outcome = dispatch(ctx, cmd, seed);
        if (auto* ok = std::get_if<json>(&outcome)) {
            report["status"] = "ok";
            report["result"] = std::move(*ok);
        } else {
            auto& f = std::get<Failed>(outcome);
            report["status"] = "failed";
            report["result"] = std::move(f.result);
            report["error"] = std::move(f.error);
        }
    } catch (const Error& e) {
        report["status"] = "failed";
        report["error"] = error_json(e);
    } catch (const json::exception& e) {
        report["status"] = "failed";
        report["error"] = {{"error", "ParseError"}, {"message", e.what()}, {"certificate", nullptr}};
    }
    return report;
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path, {{"path", path}});
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path + ": " + e.what(), {{"path", path}, {"byte", e.byte}});
    }
}

Prime resolve_prime(const json& manifest, std::optional<unsigned> flag) {
    long long p = kDefaultPrime;
    if (flag) p = *flag;
    else if (manifest.is_object() && manifest.contains("field_char")) {
        if (!manifest["field_char"].is_number_integer()) throw ParseError("field_char must be an integer");
        p = manifest["field_char"].get<long long>();
    }
    if (p < 2 || p >= (1LL << 31)) throw InvalidArgument("field characteristic out of range", {{"field_char", p}});
    check_prime(static_cast<Prime>(p));
    return static_cast<Prime>(p);
}

void print(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

}  // namespace

json execute(const json& manifest, const json& command, unsigned field_char, unsigned long long seed) {
    check_prime(field_char);
    const Context ctx(manifest, field_char);
    return execute_in(ctx, command, seed);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Staircase encodings and persistence modules over finite posets"};
    app.require_subcommand(1);
    app.fallthrough();
    std::optional<unsigned> field_char;
    unsigned long long seed = 0;
    std::string format = "json";
    app.add_option("--field-char", field_char, "prime field characteristic (default: manifest, else 101)");
    app.add_option("--seed", seed, "seed for the randomized suites");
    app.add_option("--format", format, "output format")->check(CLI::IsMember({"json", "dot"}));

    std::string manifest_path;
    std::map<std::string, std::string> selectors;
    const std::vector<std::string> keys = {"poset", "map", "encoding", "module", "encoded", "morphism", "set",
                                           "first", "second", "source", "target", "phi", "plan", "operation"};
    std::vector<CLI::App*> subs;
    for (const auto& name : kCommands) {
        auto* sub = app.add_subcommand(name, "run " + name + " on manifest entries");
        if (name != "suite") sub->add_option("manifest", manifest_path, "manifest JSON file")->required();
        for (const auto& key : keys) sub->add_option("--" + key, selectors[key], "name of a manifest " + key);
        subs.push_back(sub);
    }
    auto* run_sub = app.add_subcommand("run", "run every command listed in the manifest");
    run_sub->add_option("manifest", manifest_path, "manifest JSON file")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << e.what() << '\n';
        return 2;
    }

    auto emit_dot_or_json = [&](const json& reports) {
        if (format == "dot") {
            for (const auto& r : reports)
                if (r.contains("result") && r["result"].is_object() && r["result"].contains("dot"))
                    out << r["result"]["dot"].get<std::string>();
        } else {
            print(out, reports.size() == 1 ? reports[0] : reports);
        }
    };

    try {
        const json manifest = manifest_path.empty() ? json::object() : load_json(manifest_path);
        const Prime p = resolve_prime(manifest, field_char);
        const Context ctx(manifest, p);

        std::vector<json> commands;
        std::string chosen;
        for (std::size_t i = 0; i < subs.size(); ++i)
            if (subs[i]->parsed()) chosen = kCommands[i];
        if (run_sub->parsed()) {
            if (manifest.contains("commands")) {
                if (!manifest["commands"].is_array()) throw ParseError("manifest commands must be an array");
                for (const auto& c : manifest["commands"]) commands.push_back(c);
            }
        } else {
            json cmd = {{"command", chosen}};
            for (const auto& [key, value] : selectors)
                if (!value.empty()) cmd[key] = value;
            if (cmd.size() == 1 && manifest.contains("commands") && manifest["commands"].is_array()) {
                for (const auto& c : manifest["commands"])
                    if (c.is_object() && c.value("command", "") == chosen) commands.push_back(c);
            }
            if (commands.empty()) commands.push_back(cmd);
        }

        std::vector<json> reports(commands.size());
        for_each_index(commands.size(), true, [&](std::size_t i) { reports[i] = execute_in(ctx, commands[i], seed); });

        bool ok = true;
        for (const auto& r : reports) {
            if (r["status"] == "ok") continue;
            ok = false;
            err << r["command"].get<std::string>() << ": " << r["error"]["error"].get<std::string>() << ": "
                << r["error"]["message"].get<std::string>() << '\n';
        }
        if (run_sub->parsed()) {
            if (format == "dot") emit_dot_or_json(json(reports));
            else print(out, {{"field_char", p}, {"reports", reports}, {"ok", ok}});
        } else {
            emit_dot_or_json(json(reports));
        }
        return ok ? 0 : 1;
    } catch (const Error& e) {
        print(out, error_json(e));
        err << e.code() << ": " << e.what() << '\n';
        return 1;
    }
}

}  // namespace tame::cli
