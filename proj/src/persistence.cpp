#include "tame/persistence.hpp"

#include <optional>
#include <set>

#include "tame/error.hpp"
#include "tame/parallel.hpp"

namespace tame {

namespace {

bool same_base(const PosetPtr& a, const PosetPtr& b) { return a == b || *a == *b; }

void require_same_base(const PfdModule& a, const PfdModule& b, const char* what) {
    if (!same_base(a.base(), b.base()) || a.prime() != b.prime())
        throw DimensionMismatch(std::string(what) + ": modules live over different posets or fields");
}

nlohmann::json shape(const Matrix& m) { return {m.rows(), m.cols()}; }

// First element (by topological position) reached from source along two cover
// paths with different composites.
void check_commutes_from(const PfdModule& m, std::size_t source) {
    const auto& P = *m.base();
    std::vector<std::optional<Matrix>> composite(P.size());
    composite[source] = Matrix::identity(m.dim(source), m.prime());
    for (auto q : P.topological_order()) {
        if (q == source || !P.leq(source, q)) continue;
        for (auto e : P.covers_into(q)) {
            const auto r = P.covers()[e].first;
            if (!P.leq(source, r)) continue;
            auto candidate = m.cover_map(e) * *composite[r];
            if (!composite[q]) {
                composite[q] = std::move(candidate);
            } else if (!(*composite[q] == candidate)) {
                throw NotCommutative("structure maps from " + P.id(source) + " to " + P.id(q) + " do not commute",
                                     {{"from", P.id(source)},
                                      {"to", P.id(q)},
                                      {"first", to_json(*composite[q])},
                                      {"second", to_json(candidate)}});
            }
        }
    }
}

AbelianResult kernel_impl(const Morphism& phi, bool parallel) {
    check_naturality(phi);
    const auto& src = phi.source;
    const auto& P = *src.base();
    std::vector<Matrix> basis(P.size());
    for_each_index(P.size(), parallel, [&](std::size_t x) { basis[x] = kernel_basis(phi.components[x]); });
    std::vector<Matrix> maps(P.covers().size());
    for_each_index(maps.size(), parallel, [&](std::size_t e) {
        const auto [a, b] = P.covers()[e];
        maps[e] = solve_in_span(basis[b], src.cover_map(e) * basis[a]);
    });
    std::vector<std::size_t> dims(P.size());
    for (std::size_t x = 0; x < dims.size(); ++x) dims[x] = basis[x].cols();
    PfdModule k(src.base(), std::move(dims), std::move(maps), src.prime());
    Morphism inclusion{k, src, std::move(basis)};
    return {std::move(k), std::move(inclusion)};
}

AbelianResult image_impl(const Morphism& phi, bool parallel) {
    check_naturality(phi);
    const auto& tgt = phi.target;
    const auto& P = *tgt.base();
    std::vector<Matrix> basis(P.size());
    for_each_index(P.size(), parallel, [&](std::size_t x) { basis[x] = column_space_basis(phi.components[x]); });
    std::vector<Matrix> maps(P.covers().size());
    for_each_index(maps.size(), parallel, [&](std::size_t e) {
        const auto [a, b] = P.covers()[e];
        maps[e] = solve_in_span(basis[b], tgt.cover_map(e) * basis[a]);
    });
    std::vector<std::size_t> dims(P.size());
    for (std::size_t x = 0; x < dims.size(); ++x) dims[x] = basis[x].cols();
    PfdModule im(tgt.base(), std::move(dims), std::move(maps), tgt.prime());
    Morphism inclusion{im, tgt, std::move(basis)};
    return {std::move(im), std::move(inclusion)};
}

AbelianResult cokernel_impl(const Morphism& phi, bool parallel) {
    check_naturality(phi);
    const auto& tgt = phi.target;
    const auto& P = *tgt.base();
    std::vector<Matrix> proj(P.size()), section(P.size());
    for_each_index(P.size(), parallel, [&](std::size_t x) {
        proj[x] = cokernel_projection(phi.components[x]);
        section[x] = right_inverse(proj[x]);
    });
    std::vector<Matrix> maps(P.covers().size());
    for_each_index(maps.size(), parallel, [&](std::size_t e) {
        const auto [a, b] = P.covers()[e];
        maps[e] = proj[b] * tgt.cover_map(e) * section[a];
    });
    std::vector<std::size_t> dims(P.size());
    for (std::size_t x = 0; x < dims.size(); ++x) dims[x] = proj[x].rows();
    PfdModule c(tgt.base(), std::move(dims), std::move(maps), tgt.prime());
    Morphism projection{tgt, c, std::move(proj)};
    return {std::move(c), std::move(projection)};
}

std::vector<CounitVerdict> counit_impl(const MonotoneMap& e, const PfdModule& m, bool parallel) {
    if (!same_base(e.target, m.base())) throw DimensionMismatch("counit_check: module is not over the map's target");
    const auto& T = *e.target;
    const auto& S = *e.source;
    std::vector<CounitVerdict> out(T.size());
    for_each_index(T.size(), parallel, [&](std::size_t q) {
        Subset d(S.size());
        for (std::size_t x = 0; x < S.size(); ++x)
            if (T.leq(e(x), q)) d.set(x);
        const auto pres = colimit_over_downset(e, m, d);
        Matrix eps(m.dim(q), pres.generators, m.prime());
        for (std::size_t i = 0; i < pres.elements.size(); ++i) {
            const auto x = pres.elements[i];
            const auto block = m.structure_map(e(x), q);
            for (std::size_t r = 0; r < block.rows(); ++r)
                for (std::size_t c = 0; c < block.cols(); ++c) eps(r, pres.offsets[i] + c) = block(r, c);
        }
        auto& v = out[q];
        v.element = q;
        v.colimit_dim = pres.dimension;
        v.target_dim = m.dim(q);
        // The relations lie in the kernel of eps, so eps and the induced map
        // on the quotient have the same rank.
        v.rank = rank(eps);
        v.injective = v.rank == v.colimit_dim;
        v.surjective = v.rank == v.target_dim;
    });
    return out;
}

}  // namespace

// ---------------------------------------------------------------- PfdModule

PfdModule::PfdModule(PosetPtr base, std::vector<std::size_t> dims, std::vector<Matrix> cover_maps, Prime p)
    : base_(std::move(base)), dims_(std::move(dims)), cover_maps_(std::move(cover_maps)), p_(p) {
    check_prime(p_);
    if (!base_) throw InvalidArgument("module needs a base poset");
    if (dims_.size() != base_->size()) throw DimensionMismatch("module needs one dimension per element");
    if (cover_maps_.size() != base_->covers().size()) throw DimensionMismatch("module needs one matrix per cover");
    for (std::size_t e = 0; e < cover_maps_.size(); ++e) {
        const auto [a, b] = base_->covers()[e];
        const auto& m = cover_maps_[e];
        if (m.rows() != dims_[b] || m.cols() != dims_[a] || m.prime() != p_)
            throw DimensionMismatch("cover map " + base_->id(a) + " -> " + base_->id(b) + " has the wrong shape",
                                    {{"from", base_->id(a)},
                                     {"to", base_->id(b)},
                                     {"expected", {dims_[b], dims_[a]}},
                                     {"actual", shape(m)}});
    }
}

PfdModule PfdModule::zero(PosetPtr base, Prime p) {
    std::vector<Matrix> maps(base->covers().size(), Matrix(0, 0, p));
    std::vector<std::size_t> dims(base->size(), 0);
    return PfdModule(std::move(base), std::move(dims), std::move(maps), p);
}

PfdModule PfdModule::constant(PosetPtr base, std::size_t n, Prime p) {
    std::vector<Matrix> maps(base->covers().size(), Matrix::identity(n, p));
    std::vector<std::size_t> dims(base->size(), n);
    return PfdModule(std::move(base), std::move(dims), std::move(maps), p);
}

std::size_t PfdModule::total_dim() const {
    std::size_t t = 0;
    for (auto d : dims_) t += d;
    return t;
}

const Matrix& PfdModule::cover_map(std::size_t a, std::size_t b) const {
    const auto e = base_->cover_index(a, b);
    if (!e) throw InvalidArgument(base_->id(b) + " does not cover " + base_->id(a));
    return cover_maps_[*e];
}

Matrix PfdModule::structure_map(std::size_t a, std::size_t b) const {
    if (!base_->leq(a, b)) throw InvalidArgument(base_->id(a) + " is not below " + base_->id(b));
    Matrix result = Matrix::identity(dims_[a], p_);
    auto cur = a;
    while (cur != b) {
        for (auto e : base_->covers_from(cur)) {
            const auto next = base_->covers()[e].second;
            if (base_->leq(next, b)) {
                result = cover_maps_[e] * result;
                cur = next;
                break;
            }
        }
    }
    return result;
}

bool operator==(const PfdModule& a, const PfdModule& b) {
    return a.p_ == b.p_ && same_base(a.base_, b.base_) && a.dims_ == b.dims_ && a.cover_maps_ == b.cover_maps_;
}

// ---------------------------------------------------------------- Morphism

Morphism Morphism::identity(const PfdModule& m) {
    std::vector<Matrix> c;
    for (auto d : m.dims()) c.push_back(Matrix::identity(d, m.prime()));
    return Morphism{m, m, std::move(c)};
}

Morphism Morphism::zero(const PfdModule& source, const PfdModule& target) {
    require_same_base(source, target, "zero morphism");
    std::vector<Matrix> c;
    for (std::size_t x = 0; x < source.dims().size(); ++x)
        c.emplace_back(target.dim(x), source.dim(x), source.prime());
    return Morphism{source, target, std::move(c)};
}

Morphism compose(const Morphism& g, const Morphism& f) {
    if (!(f.target == g.source)) throw DimensionMismatch("compose: middle modules differ");
    std::vector<Matrix> c(f.components.size());
    for (std::size_t x = 0; x < c.size(); ++x) c[x] = g.components[x] * f.components[x];
    return Morphism{f.source, g.target, std::move(c)};
}

// ---------------------------------------------------------------- checks

void validate_module(const PfdModule& m) {
    for_each_index(m.base()->size(), true, [&](std::size_t p) { check_commutes_from(m, p); });
}

void check_naturality(const Morphism& phi) {
    require_same_base(phi.source, phi.target, "morphism");
    const auto& P = *phi.source.base();
    if (phi.components.size() != P.size()) throw DimensionMismatch("morphism needs one component per element");
    for (std::size_t x = 0; x < P.size(); ++x) {
        const auto& c = phi.components[x];
        if (c.rows() != phi.target.dim(x) || c.cols() != phi.source.dim(x) || c.prime() != phi.source.prime())
            throw DimensionMismatch("component at " + P.id(x) + " has the wrong shape",
                                    {{"element", P.id(x)},
                                     {"expected", {phi.target.dim(x), phi.source.dim(x)}},
                                     {"actual", shape(c)}});
    }
    for (std::size_t e = 0; e < P.covers().size(); ++e) {
        const auto [a, b] = P.covers()[e];
        if (!(phi.target.cover_map(e) * phi.components[a] == phi.components[b] * phi.source.cover_map(e)))
            throw NoSolution("morphism is not natural on the cover " + P.id(a) + " -> " + P.id(b),
                             {{"from", P.id(a)}, {"to", P.id(b)}});
    }
}

// ---------------------------------------------------------------- constructions

PfdModule interval_module(PosetPtr base, const Subset& interval, Prime p) {
    if (!is_interval(*base, interval)) {
        nlohmann::json members = nlohmann::json::array();
        for (auto x = interval.find_first(); x != Subset::npos; x = interval.find_next(x)) members.push_back(base->id(x));
        throw NotInterval("subset is not an interval of the poset", {{"subset", members}});
    }
    std::vector<std::size_t> dims(base->size());
    for (std::size_t x = 0; x < dims.size(); ++x) dims[x] = interval.test(x) ? 1 : 0;
    std::vector<Matrix> maps;
    for (auto [a, b] : base->covers())
        maps.push_back(dims[a] && dims[b] ? Matrix::identity(1, p) : Matrix(dims[b], dims[a], p));
    return PfdModule(std::move(base), std::move(dims), std::move(maps), p);
}

PfdModule pullback(const MonotoneMap& f, const PfdModule& m) {
    if (!same_base(f.target, m.base())) throw DimensionMismatch("pullback: module is not over the map's target");
    const auto& S = *f.source;
    std::vector<std::size_t> dims(S.size());
    for (std::size_t x = 0; x < dims.size(); ++x) dims[x] = m.dim(f(x));
    std::vector<Matrix> maps(S.covers().size());
    for_each_index(maps.size(), true, [&](std::size_t e) {
        const auto [a, b] = S.covers()[e];
        maps[e] = m.structure_map(f(a), f(b));
    });
    return PfdModule(f.source, std::move(dims), std::move(maps), m.prime());
}

Morphism pullback(const MonotoneMap& f, const Morphism& psi) {
    std::vector<Matrix> c(f.source->size());
    for (std::size_t x = 0; x < c.size(); ++x) c[x] = psi.components.at(f(x));
    return Morphism{pullback(f, psi.source), pullback(f, psi.target), std::move(c)};
}

// ---------------------------------------------------------------- Hom

HomSpace hom_space(const PfdModule& m, const PfdModule& n) {
    require_same_base(m, n, "hom_space");
    const auto& P = *m.base();
    const Prime p = m.prime();

    // phi_x[k][j] is unknown offset[x] + k * dim M_x + j.
    std::vector<std::size_t> offset(P.size() + 1, 0);
    for (std::size_t x = 0; x < P.size(); ++x) offset[x + 1] = offset[x] + n.dim(x) * m.dim(x);
    const auto unknowns = offset.back();

    std::size_t rows = 0;
    for (auto [a, b] : P.covers()) rows += n.dim(b) * m.dim(a);
    Matrix eq(rows, unknowns, p);
    std::size_t row = 0;
    for (std::size_t e = 0; e < P.covers().size(); ++e) {
        const auto [a, b] = P.covers()[e];
        const auto& ne = n.cover_map(e);  // dim N_b x dim N_a
        const auto& me = m.cover_map(e);  // dim M_b x dim M_a
        // (N_e phi_a - phi_b M_e)[k][j] = 0
        for (std::size_t k = 0; k < n.dim(b); ++k) {
            for (std::size_t j = 0; j < m.dim(a); ++j, ++row) {
                for (std::size_t l = 0; l < n.dim(a); ++l) {
                    const auto v = ne(k, l);
                    if (v) eq(row, offset[a] + l * m.dim(a) + j) = v;
                }
                for (std::size_t l = 0; l < m.dim(b); ++l) {
                    const auto v = me(l, j);
                    if (!v) continue;
                    auto& slot = eq(row, offset[b] + k * m.dim(b) + l);
                    slot = static_cast<std::uint32_t>((std::uint64_t{slot} + p - v) % p);
                }
            }
        }
    }

    const auto basis = kernel_basis(eq);
    HomSpace out;
    out.dimension = basis.cols();
    for (std::size_t col = 0; col < basis.cols(); ++col) {
        std::vector<Matrix> comp(P.size());
        for (std::size_t x = 0; x < P.size(); ++x) {
            comp[x] = Matrix(n.dim(x), m.dim(x), p);
            for (std::size_t k = 0; k < n.dim(x); ++k)
                for (std::size_t j = 0; j < m.dim(x); ++j) comp[x](k, j) = basis(offset[x] + k * m.dim(x) + j, col);
        }
        out.basis.push_back(Morphism{m, n, std::move(comp)});
    }
    return out;
}

Morphism combine(const HomSpace& hom, const PfdModule& m, const PfdModule& n, const std::vector<long long>& coefficients) {
    auto phi = Morphism::zero(m, n);
    for (std::size_t i = 0; i < hom.basis.size() && i < coefficients.size(); ++i) {
        const auto c = reduce(coefficients[i], m.prime());
        if (!c) continue;
        for (std::size_t x = 0; x < phi.components.size(); ++x)
            phi.components[x] = phi.components[x] + hom.basis[i].components[x].scaled(c);
    }
    return phi;
}

// ---------------------------------------------------------------- abelian operations

AbelianResult kernel(const Morphism& phi) { return kernel_impl(phi, true); }
AbelianResult image(const Morphism& phi) { return image_impl(phi, true); }
AbelianResult cokernel(const Morphism& phi) { return cokernel_impl(phi, true); }

// ---------------------------------------------------------------- colimits

ColimitPresentation colimit_over_downset(const MonotoneMap& e, const PfdModule& m, const Subset& downset) {
    if (!same_base(e.target, m.base())) throw DimensionMismatch("colimit: module is not over the map's target");
    const auto& S = *e.source;
    if (downset.size() != S.size() || !is_downset(S, downset))
        throw InvalidArgument("colimit_over_downset needs a downset of the source poset");

    ColimitPresentation out;
    std::vector<std::size_t> offset_of(S.size(), 0);
    for (auto x = downset.find_first(); x != Subset::npos; x = downset.find_next(x)) {
        out.elements.push_back(x);
        out.offsets.push_back(out.generators);
        offset_of[x] = out.generators;
        out.generators += m.dim(e(x));
    }
    std::size_t relation_count = 0;
    for (auto [x, y] : S.covers())
        if (downset.test(x) && downset.test(y)) relation_count += m.dim(e(x));
    out.relations = Matrix(out.generators, relation_count, m.prime());
    std::size_t col = 0;
    for (auto [x, y] : S.covers()) {
        if (!downset.test(x) || !downset.test(y)) continue;
        const auto a = m.structure_map(e(x), e(y));
        for (std::size_t j = 0; j < a.cols(); ++j, ++col) {
            out.relations(offset_of[x] + j, col) = 1;
            for (std::size_t i = 0; i < a.rows(); ++i)
                if (a(i, j)) out.relations(offset_of[y] + i, col) = m.prime() - a(i, j);
        }
    }
    out.dimension = out.generators - rank(out.relations);
    return out;
}

std::vector<CounitVerdict> counit_check(const MonotoneMap& e, const PfdModule& m) { return counit_impl(e, m, true); }

// ---------------------------------------------------------------- JSON

nlohmann::json to_json(const PfdModule& m) {
    const auto& P = *m.base();
    nlohmann::json dims = nlohmann::json::object();
    for (std::size_t x = 0; x < P.size(); ++x) dims[P.id(x)] = m.dim(x);
    nlohmann::json covers = nlohmann::json::array();
    for (std::size_t e = 0; e < P.covers().size(); ++e) {
        const auto& c = m.cover_map(e);
        if (c.empty()) continue;
        covers.push_back({P.id(P.covers()[e].first), P.id(P.covers()[e].second), to_json(c)});
    }
    return {{"poset", to_json(P)}, {"dims", dims}, {"covers", covers}};
}

PfdModule module_from_json(const nlohmann::json& j, PosetPtr base, Prime p) {
    if (!j.is_object()) throw ParseError("module must be a JSON object");
    const auto& P = *base;
    std::vector<std::size_t> dims(P.size(), 0);
    if (j.contains("dims")) {
        if (!j["dims"].is_object()) throw ParseError("module dims must map element ids to integers");
        for (const auto& [id, n] : j["dims"].items()) {
            if (!n.is_number_unsigned() && !(n.is_number_integer() && n.get<long long>() >= 0))
                throw ParseError("dimension of " + id + " must be a nonnegative integer");
            dims[P.index_of(id)] = n.get<std::size_t>();
        }
    }
    std::vector<std::optional<Matrix>> maps(P.covers().size());
    if (j.contains("covers")) {
        if (!j["covers"].is_array()) throw ParseError("module covers must be an array of [from, to, matrix]");
        for (const auto& entry : j["covers"]) {
            if (!entry.is_array() || entry.size() != 3 || !entry[0].is_string() || !entry[1].is_string())
                throw ParseError("module cover entries are [from, to, matrix]");
            const auto a = P.index_of(entry[0].get<std::string>());
            const auto b = P.index_of(entry[1].get<std::string>());
            const auto e = P.cover_index(a, b);
            if (!e) throw ParseError(P.id(b) + " does not cover " + P.id(a));
            if (maps[*e]) throw ParseError("cover " + P.id(a) + " -> " + P.id(b) + " given twice");
            maps[*e] = matrix_from_json(entry[2], dims[b], dims[a], p);
        }
    }
    std::vector<Matrix> out;
    for (std::size_t e = 0; e < maps.size(); ++e) {
        const auto [a, b] = P.covers()[e];
        if (maps[e]) {
            out.push_back(std::move(*maps[e]));
        } else if (dims[a] == 0 || dims[b] == 0) {
            out.emplace_back(dims[b], dims[a], p);
        } else {
            throw ParseError("missing matrix for cover " + P.id(a) + " -> " + P.id(b));
        }
    }
    return PfdModule(std::move(base), std::move(dims), std::move(out), p);
}

nlohmann::json to_json(const Morphism& phi) {
    const auto& P = *phi.source.base();
    nlohmann::json out = nlohmann::json::object();
    for (std::size_t x = 0; x < P.size(); ++x)
        if (!phi.components[x].empty()) out[P.id(x)] = to_json(phi.components[x]);
    return out;
}

Morphism morphism_from_json(const nlohmann::json& j, const PfdModule& source, const PfdModule& target) {
    if (!j.is_object()) throw ParseError("morphism components must map element ids to matrices");
    auto phi = Morphism::zero(source, target);
    const auto& P = *source.base();
    for (const auto& [id, m] : j.items()) {
        const auto x = P.index_of(id);
        phi.components[x] = matrix_from_json(m, target.dim(x), source.dim(x), source.prime());
    }
    return phi;
}

nlohmann::json to_json(const std::vector<CounitVerdict>& verdicts, const FinitePoset& target) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& v : verdicts)
        out.push_back({{"element", target.id(v.element)},
                       {"colimit_dim", v.colimit_dim},
                       {"target_dim", v.target_dim},
                       {"rank", v.rank},
                       {"injective", v.injective},
                       {"surjective", v.surjective},
                       {"iso", v.iso()}});
    return out;
}

// ---------------------------------------------------------------- serial references

namespace serial {

void validate_module(const PfdModule& m) {
    const auto& P = *m.base();
    for (std::size_t source = 0; source < P.size(); ++source) {
        std::vector<std::optional<Matrix>> seen(P.size());
        // Depth-first walk over every cover path leaving source.
        std::vector<std::pair<std::size_t, Matrix>> stack{{source, Matrix::identity(m.dim(source), m.prime())}};
        while (!stack.empty()) {
            auto [x, composite] = std::move(stack.back());
            stack.pop_back();
            if (!seen[x]) {
                seen[x] = composite;
            } else if (!(*seen[x] == composite)) {
                throw NotCommutative("structure maps from " + P.id(source) + " to " + P.id(x) + " do not commute",
                                     {{"from", P.id(source)},
                                      {"to", P.id(x)},
                                      {"first", to_json(*seen[x])},
                                      {"second", to_json(composite)}});
            }
            for (auto e : P.covers_from(x)) stack.emplace_back(P.covers()[e].second, m.cover_map(e) * composite);
        }
    }
}

AbelianResult kernel(const Morphism& phi) { return kernel_impl(phi, false); }
AbelianResult image(const Morphism& phi) { return image_impl(phi, false); }
AbelianResult cokernel(const Morphism& phi) { return cokernel_impl(phi, false); }

std::vector<CounitVerdict> counit_check(const MonotoneMap& e, const PfdModule& m) { return counit_impl(e, m, false); }

}  // namespace serial

}  // namespace tame
