#include "tame/oracle.hpp"

#include <algorithm>
#include <optional>
#include <set>

#include "tame/error.hpp"
#include "tame/parallel.hpp"

namespace tame {

namespace {

bool point_leq(const Point& x, const Point& y) {
    for (std::size_t i = 0; i < x.size(); ++i)
        if (y[i] < x[i]) return false;
    return true;
}

// Plain Gaussian elimination kept separate from the library's rref, so the
// oracle does not share code with the computation it checks.
std::size_t naive_rank(const Matrix& m) {
    const std::uint64_t p = m.prime();
    std::vector<std::vector<std::uint64_t>> a(m.rows(), std::vector<std::uint64_t>(m.cols()));
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) a[i][j] = m(i, j);
    std::size_t r = 0;
    for (std::size_t c = 0; c < m.cols() && r < a.size(); ++c) {
        std::size_t piv = r;
        while (piv < a.size() && a[piv][c] == 0) ++piv;
        if (piv == a.size()) continue;
        std::swap(a[piv], a[r]);
        // Fermat inverse.
        std::uint64_t inv = 1, base = a[r][c], e = p - 2;
        while (e) {
            if (e & 1) inv = inv * base % p;
            base = base * base % p;
            e >>= 1;
        }
        for (std::size_t i = r + 1; i < a.size(); ++i) {
            if (!a[i][c]) continue;
            const auto f = a[i][c] * inv % p;
            for (std::size_t j = c; j < m.cols(); ++j) a[i][j] = (a[i][j] + (p - f) * a[r][j]) % p;
        }
        ++r;
    }
    return r;
}

Matrix stack_rows(const Matrix& top, const Matrix& bottom) {
    Matrix out(top.rows() + bottom.rows(), top.cols(), top.prime());
    for (std::size_t i = 0; i < top.rows(); ++i)
        for (std::size_t j = 0; j < top.cols(); ++j) out(i, j) = top(i, j);
    for (std::size_t i = 0; i < bottom.rows(); ++i)
        for (std::size_t j = 0; j < bottom.cols(); ++j) out(top.rows() + i, j) = bottom(i, j);
    return out;
}

}  // namespace

std::string format_point(const Point& x) {
    std::string s = "(";
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (i) s += ",";
        s += format_rational(x[i]);
    }
    return s + ")";
}

SamplePlan product_plan(std::vector<std::vector<Rational>> axes) {
    SamplePlan plan;
    if (axes.empty()) return plan;
    for (auto& a : axes) {
        std::sort(a.begin(), a.end());
        a.erase(std::unique(a.begin(), a.end()), a.end());
        if (a.empty()) return plan;
    }
    std::vector<std::size_t> idx(axes.size(), 0);
    for (;;) {
        Point x(axes.size());
        for (std::size_t i = 0; i < axes.size(); ++i) x[i] = axes[i][idx[i]];
        plan.points.push_back(std::move(x));
        std::size_t i = axes.size();
        while (i > 0) {
            --i;
            if (++idx[i] < axes[i].size()) break;
            idx[i] = 0;
            if (i == 0) return plan;
        }
    }
}

SamplePlan grid_plan(const Grid& grid) {
    std::vector<std::vector<Rational>> axes(grid.dim());
    for (std::size_t i = 0; i < grid.dim(); ++i) {
        const auto& bp = grid.breakpoints(i);
        if (bp.empty()) {
            axes[i] = {Rational(0)};
            continue;
        }
        axes[i].push_back(bp.front() - 1);
        for (std::size_t k = 0; k < bp.size(); ++k) {
            axes[i].push_back(bp[k]);
            axes[i].push_back(k + 1 < bp.size() ? (bp[k] + bp[k + 1]) / 2 : bp[k] + 1);
        }
    }
    return product_plan(std::move(axes));
}

bool is_sup_closed(const SamplePlan& plan) {
    std::set<Point> pts(plan.points.begin(), plan.points.end());
    for (const auto& x : plan.points)
        for (const auto& y : plan.points) {
            Point s(x.size());
            for (std::size_t i = 0; i < x.size(); ++i) s[i] = std::max(x[i], y[i]);
            if (!pts.count(s)) return false;
        }
    return true;
}

SamplePlan sup_closure(SamplePlan plan) {
    std::set<Point> pts(plan.points.begin(), plan.points.end());
    plan.points.assign(pts.begin(), pts.end());
    for (bool grew = true; grew;) {
        grew = false;
        const auto current = plan.points;
        for (const auto& x : current)
            for (const auto& y : current) {
                Point s(x.size());
                for (std::size_t i = 0; i < x.size(); ++i) s[i] = std::max(x[i], y[i]);
                if (pts.insert(s).second) {
                    plan.points.push_back(std::move(s));
                    grew = true;
                }
            }
    }
    return plan;
}

SamplePlan plan_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ParseError("sample plan must be a JSON object");
    auto parse_list = [](const nlohmann::json& list) {
        if (!list.is_array()) throw ParseError("expected an array of rationals");
        std::vector<Rational> out;
        for (const auto& v : list) {
            if (v.is_number_integer()) out.emplace_back(v.get<std::int64_t>());
            else if (v.is_string()) out.push_back(parse_rational(v.get<std::string>()));
            else throw ParseError("coordinates are integers or rational strings");
        }
        return out;
    };
    SamplePlan plan;
    if (j.contains("axes")) {
        std::vector<std::vector<Rational>> axes;
        for (const auto& a : j["axes"]) axes.push_back(parse_list(a));
        plan = product_plan(std::move(axes));
    } else if (j.contains("points")) {
        for (const auto& p : j["points"]) plan.points.push_back(parse_list(p));
    } else {
        throw ParseError("sample plan needs \"axes\" or \"points\"");
    }
    std::set<Point> seen;
    for (const auto& x : plan.points) {
        if (x.size() != plan.dim()) throw ParseError("sample points of different dimension");
        if (!seen.insert(x).second) throw ParseError("duplicate sample point " + format_point(x));
    }
    if (j.value("sup_closed", false)) plan = sup_closure(std::move(plan));
    return plan;
}

nlohmann::json to_json(const SamplePlan& plan) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& x : plan.points) {
        nlohmann::json p = nlohmann::json::array();
        for (const auto& c : x) p.push_back(format_rational(c));
        pts.push_back(p);
    }
    return {{"points", pts}};
}

std::size_t evaluate(const EncodedModule& m, const Point& x) { return m.module.dim(m.encoding.element_at(x)); }

Matrix evaluate(const EncodedModule& m, const Point& x, const Point& y) {
    if (x.size() != y.size() || !point_leq(x, y))
        throw InvalidArgument(format_point(x) + " is not below " + format_point(y));
    return m.module.structure_map(m.encoding.element_at(x), m.encoding.element_at(y));
}

FinitePoset sample_poset(const SamplePlan& plan) {
    std::vector<std::string> ids;
    for (const auto& x : plan.points) ids.push_back(format_point(x));
    std::vector<Relation> rel;
    for (std::size_t i = 0; i < plan.points.size(); ++i)
        for (std::size_t j = 0; j < plan.points.size(); ++j)
            if (i != j && point_leq(plan.points[i], plan.points[j])) rel.emplace_back(i, j);
    return FinitePoset::from_relations(std::move(ids), rel);
}

PfdModule restrict_to_samples(const EncodedModule& m, const SamplePlan& plan) {
    return restrict_to_samples(m, plan, share(sample_poset(plan)));
}

PfdModule restrict_to_samples(const EncodedModule& m, const SamplePlan& plan, const PosetPtr& samples) {
    std::vector<std::size_t> dims(plan.points.size());
    for (std::size_t i = 0; i < dims.size(); ++i) dims[i] = evaluate(m, plan.points[i]);
    std::vector<Matrix> maps(samples->covers().size());
    for_each_index(maps.size(), true, [&](std::size_t e) {
        const auto [a, b] = samples->covers()[e];
        maps[e] = evaluate(m, plan.points[a], plan.points[b]);
    });
    return PfdModule(samples, std::move(dims), std::move(maps), m.module.prime());
}

std::string CrosscheckReport::summary() const {
    std::string s = to_string(operation) + ": ";
    if (ok)
        return s + "match on " + std::to_string(points) + " points and " + std::to_string(pairs) + " comparable pairs";
    return s + "mismatch " + mismatch.dump();
}

nlohmann::json to_json(const CrosscheckReport& r) {
    return {{"operation", to_string(r.operation)},
            {"ok", r.ok},
            {"points", r.points},
            {"pairs", r.pairs},
            {"mismatch", r.mismatch},
            {"summary", r.summary()}};
}

CrosscheckReport crosscheck_result(const EncodedModule& a, const EncodedModule& b, const PipelineResult& run,
                                   const SamplePlan& plan) {
    if (plan.points.empty()) throw InvalidArgument("sample plan is empty");
    const auto samples = share(sample_poset(plan));
    const auto sa = restrict_to_samples(a, plan, samples);
    const auto sb = restrict_to_samples(b, plan, samples);
    const auto sr = restrict_to_samples(run.result, plan, samples);
    const auto n = plan.points.size();

    std::vector<Matrix> phi(n);
    std::vector<std::size_t> phi_rank(n);
    for (std::size_t i = 0; i < n; ++i) {
        phi[i] = run.phi.components.at(run.common.encoding.element_at(plan.points[i]));
        phi_rank[i] = naive_rank(phi[i]);
    }

    auto expected_dim = [&](std::size_t i) -> std::size_t {
        switch (run.operation) {
            case Operation::kernel: return sa.dim(i) - phi_rank[i];
            case Operation::image: return phi_rank[i];
            case Operation::cokernel: return sb.dim(i) - phi_rank[i];
        }
        return 0;
    };
    auto expected_rank = [&](std::size_t i, std::size_t j) -> std::size_t {
        switch (run.operation) {
            case Operation::kernel:
                // rank of A(x<=y) on ker phi_x = rank [phi_x; A(x<=y)] - rank phi_x
                return naive_rank(stack_rows(phi[i], sa.structure_map(i, j))) - phi_rank[i];
            case Operation::image: return naive_rank(sb.structure_map(i, j) * phi[i]);
            case Operation::cokernel: return naive_rank(sb.structure_map(i, j).hstack(phi[j])) - phi_rank[j];
        }
        return 0;
    };

    std::vector<std::optional<nlohmann::json>> first(n);
    std::vector<std::size_t> pair_count(n, 0);
    for_each_index(n, true, [&](std::size_t i) {
        const auto& x = plan.points[i];
        if (phi[i].rows() != sb.dim(i) || phi[i].cols() != sa.dim(i)) {
            first[i] = nlohmann::json{{"kind", "phi_shape"}, {"point", format_point(x)}};
            return;
        }
        if (sr.dim(i) != expected_dim(i)) {
            first[i] = nlohmann::json{{"kind", "dimension"},
                                      {"point", format_point(x)},
                                      {"expected", expected_dim(i)},
                                      {"actual", sr.dim(i)}};
            return;
        }
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i || !samples->leq(i, j)) continue;
            ++pair_count[i];
            const auto want = expected_rank(i, j);
            const auto got = naive_rank(sr.structure_map(i, j));
            if (want != got) {
                first[i] = nlohmann::json{{"kind", "transition_rank"},
                                          {"from", format_point(x)},
                                          {"to", format_point(plan.points[j])},
                                          {"expected", want},
                                          {"actual", got}};
                return;
            }
        }
    });

    CrosscheckReport r;
    r.operation = run.operation;
    r.points = n;
    for (auto c : pair_count) r.pairs += c;
    for (std::size_t i = 0; i < n; ++i)
        if (first[i]) {
            r.ok = false;
            r.mismatch = *first[i];
            break;
        }
    return r;
}

CrosscheckReport crosscheck_operation(Operation op, const EncodedModule& a, const EncodedModule& b, const PhiSpec& spec,
                                      const SamplePlan& plan) {
    return crosscheck_result(a, b, abelian_pipeline(a, b, spec, op), plan);
}

void require_match(const CrosscheckReport& r) {
    if (!r.ok) throw Mismatch(r.summary(), r.mismatch);
}

}  // namespace tame
