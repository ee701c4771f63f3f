#pragma once

#include <cstddef>
#include <vector>

#include <json.hpp>

#include "tame/matrix.hpp"
#include "tame/poset.hpp"

namespace tame {

/// A pointwise finite-dimensional module over a finite poset, given by a
/// vector space dimension per element and a matrix per Hasse edge. The matrix
/// of edge p -> q has shape dims(q) x dims(p). Other structure maps are
/// composites along cover paths.
class PfdModule {
public:
    /// Checks shapes only; commutativity is checked by validate_module.
    PfdModule(PosetPtr base, std::vector<std::size_t> dims, std::vector<Matrix> cover_maps, Prime p = kDefaultPrime);

    static PfdModule zero(PosetPtr base, Prime p = kDefaultPrime);
    /// F^n everywhere with identity structure maps.
    static PfdModule constant(PosetPtr base, std::size_t n, Prime p = kDefaultPrime);

    const PosetPtr& base() const noexcept { return base_; }
    Prime prime() const noexcept { return p_; }
    std::size_t dim(std::size_t x) const { return dims_.at(x); }
    const std::vector<std::size_t>& dims() const noexcept { return dims_; }
    std::size_t total_dim() const;

    /// Indexed like base()->covers().
    const Matrix& cover_map(std::size_t edge) const { return cover_maps_.at(edge); }
    const std::vector<Matrix>& cover_maps() const noexcept { return cover_maps_; }
    /// Throws InvalidArgument unless b covers a.
    const Matrix& cover_map(std::size_t a, std::size_t b) const;

    /// M(a <= b), composed along one cover path. Throws InvalidArgument
    /// unless a <= b.
    Matrix structure_map(std::size_t a, std::size_t b) const;

    friend bool operator==(const PfdModule& a, const PfdModule& b);

private:
    PosetPtr base_;
    std::vector<std::size_t> dims_;
    std::vector<Matrix> cover_maps_;
    Prime p_;
};

/// A natural transformation; components[x] has shape target.dim(x) x source.dim(x).
struct Morphism {
    PfdModule source;
    PfdModule target;
    std::vector<Matrix> components;

    static Morphism identity(const PfdModule& m);
    static Morphism zero(const PfdModule& source, const PfdModule& target);
};

/// g after f; throws DimensionMismatch when the middle modules differ.
Morphism compose(const Morphism& g, const Morphism& f);

/// Throws NotCommutative with the first element pair (by source, then
/// linear extension order) whose two path composites differ.
void validate_module(const PfdModule& m);

/// Checks shapes and N(e) phi_p == phi_q M(e) on every cover e = (p, q).
/// Throws DimensionMismatch, or NoSolution naming the failing cover.
void check_naturality(const Morphism& phi);

/// F on I with identity maps inside I. Throws NotInterval.
PfdModule interval_module(PosetPtr base, const Subset& interval, Prime p = kDefaultPrime);

/// The module x -> M(f(x)) over f.source.
PfdModule pullback(const MonotoneMap& f, const PfdModule& m);

/// phi_x = psi_{f(x)}, a morphism between the pulled-back modules.
Morphism pullback(const MonotoneMap& f, const Morphism& psi);

struct HomSpace {
    std::size_t dimension = 0;
    std::vector<Morphism> basis;
};

/// Natural transformations M -> N as the null space of the naturality
/// equations. Throws DimensionMismatch unless the bases agree.
HomSpace hom_space(const PfdModule& m, const PfdModule& n);

/// sum_i coefficients[i] * basis[i]; missing coefficients count as zero.
Morphism combine(const HomSpace& hom, const PfdModule& m, const PfdModule& n,
                 const std::vector<long long>& coefficients);

struct AbelianResult {
    PfdModule module;
    /// kernel: inclusion into the source; image: inclusion into the target;
    /// cokernel: projection from the target.
    Morphism map;
};

/// All three throw NoSolution when phi is not natural.
AbelianResult kernel(const Morphism& phi);
AbelianResult image(const Morphism& phi);
AbelianResult cokernel(const Morphism& phi);

struct ColimitPresentation {
    std::size_t dimension = 0;
    std::vector<std::size_t> elements;  ///< members of the downset, ascending
    std::vector<std::size_t> offsets;   ///< generator block of each member
    std::size_t generators = 0;
    Matrix relations;  ///< one column per relation, generators x relations
};

/// The colimit of pullback(e, M) over a downset D of e.source, as a quotient
/// of the direct sum of the spaces M(e(x)), x in D, by v - M(e(x) <= e(y)) v
/// for covers x -> y inside D. Throws InvalidArgument unless D is a downset.
ColimitPresentation colimit_over_downset(const MonotoneMap& e, const PfdModule& m, const Subset& downset);

struct CounitVerdict {
    std::size_t element = 0;
    std::size_t colimit_dim = 0;
    std::size_t target_dim = 0;
    std::size_t rank = 0;
    bool injective = false;
    bool surjective = false;
    bool iso() const noexcept { return injective && surjective; }
};

/// For every target element q, the canonical map from the colimit over
/// e^-1(down q) to M(q).
std::vector<CounitVerdict> counit_check(const MonotoneMap& e, const PfdModule& m);

/// {"poset": ..., "dims": {id: n}, "covers": [[p, q, matrix], ...]}; the
/// poset entry is written inline.
nlohmann::json to_json(const PfdModule& m);
/// Reads dims and covers against a known base. Unlisted dims are zero and
/// unlisted covers must have an empty matrix. Throws ParseError.
PfdModule module_from_json(const nlohmann::json& j, PosetPtr base, Prime p);

/// {id: matrix}
nlohmann::json to_json(const Morphism& phi);
/// Unlisted components are zero.
Morphism morphism_from_json(const nlohmann::json& j, const PfdModule& source, const PfdModule& target);

nlohmann::json to_json(const std::vector<CounitVerdict>& verdicts, const FinitePoset& target);

namespace serial {

/// Reference implementations: single-threaded, and validate_module compares
/// the composites of every pair of maximal cover paths explicitly
/// (exponential in general, fine for test-sized posets).
void validate_module(const PfdModule& m);
AbelianResult kernel(const Morphism& phi);
AbelianResult image(const Morphism& phi);
AbelianResult cokernel(const Morphism& phi);
std::vector<CounitVerdict> counit_check(const MonotoneMap& e, const PfdModule& m);

}  // namespace serial

}  // namespace tame
