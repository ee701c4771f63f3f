#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

#include <json.hpp>

namespace tame {

using Prime = std::uint32_t;

inline constexpr Prime kDefaultPrime = 101;

bool is_prime(std::uint64_t n);

/// Throws InvalidArgument unless p is a prime below 2^31.
void check_prime(Prime p);

/// Multiplicative inverse of a nonzero residue.
std::uint32_t inverse_mod(std::uint32_t a, Prime p);

/// Reduces an arbitrary signed integer into [0, p).
inline std::uint32_t reduce(long long v, Prime p) {
    long long r = v % static_cast<long long>(p);
    return static_cast<std::uint32_t>(r < 0 ? r + p : r);
}

/// Dense row-major matrix over the prime field F_p. Zero rows or columns are
/// legal and stand for maps to or from the zero space.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, Prime p = kDefaultPrime);

    static Matrix zero(std::size_t rows, std::size_t cols, Prime p = kDefaultPrime) {
        return Matrix(rows, cols, p);
    }
    static Matrix identity(std::size_t n, Prime p = kDefaultPrime);
    static Matrix from_rows(std::initializer_list<std::initializer_list<long long>> rows,
                            Prime p = kDefaultPrime);
    static Matrix from_rows(const std::vector<std::vector<long long>>& rows, std::size_t cols,
                            Prime p = kDefaultPrime);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    Prime prime() const noexcept { return p_; }
    bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }

    std::uint32_t operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    std::uint32_t& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    void set(std::size_t i, std::size_t j, long long v) { data_[i * cols_ + j] = reduce(v, p_); }

    std::span<const std::uint32_t> row(std::size_t i) const {
        return {data_.data() + i * cols_, cols_};
    }
    std::span<std::uint32_t> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const std::uint32_t> entries() const noexcept { return data_; }

    bool is_zero() const;
    bool is_identity() const;

    Matrix transpose() const;
    Matrix select_columns(std::span<const std::size_t> columns) const;
    Matrix block(std::size_t row0, std::size_t col0, std::size_t rows, std::size_t cols) const;
    Matrix hstack(const Matrix& right) const;
    Matrix scaled(std::uint32_t c) const;

    friend Matrix operator*(const Matrix& a, const Matrix& b);
    friend Matrix operator+(const Matrix& a, const Matrix& b);
    friend Matrix operator-(const Matrix& a, const Matrix& b);
    friend bool operator==(const Matrix& a, const Matrix& b) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    Prime p_ = kDefaultPrime;
    std::vector<std::uint32_t> data_;
};

struct RowEchelon {
    Matrix reduced;
    std::vector<std::size_t> pivots;

    std::size_t rank() const noexcept { return pivots.size(); }
};

/// Reduced row echelon form by Gauss-Jordan elimination. The pivot in each
/// column is the first nonzero entry at or below the current row, so the
/// output is canonical.
RowEchelon rref(const Matrix& m);

std::size_t rank(const Matrix& m);

/// Columns form the pivot-canonical basis of the null space: one column per
/// free variable, carrying a 1 in that variable's slot.
Matrix kernel_basis(const Matrix& m);

/// The pivot columns of m, a basis of its column space.
Matrix column_space_basis(const Matrix& m);

/// Returns X with basis * X == target. Throws NoSolution when some column of
/// target lies outside the column span of basis.
Matrix solve_in_span(const Matrix& basis, const Matrix& target);

/// A surjection q : F^rows -> F^(rows - rank m) with q * m == 0. Rows of q are
/// the transposed kernel basis of m^T.
Matrix cokernel_projection(const Matrix& m);

/// S with q * S == identity, for a matrix q of full row rank.
Matrix right_inverse(const Matrix& q);

/// JSON array of rows; entries are integers in [0, p).
nlohmann::json to_json(const Matrix& m);

/// Parses a JSON array of rows. The expected shape is needed because an
/// empty array cannot carry a column count. Entries must lie in [0, p).
Matrix matrix_from_json(const nlohmann::json& j, std::size_t rows, std::size_t cols,
                        Prime p);

}  // namespace tame
