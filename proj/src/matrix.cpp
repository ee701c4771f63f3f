#include "tame/matrix.hpp"

#include <algorithm>
#include <sstream>
#include <utility>

#include "tame/error.hpp"

namespace tame {

bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    if (n % 2 == 0) return n == 2;
    for (std::uint64_t d = 3; d * d <= n; d += 2) {
        if (n % d == 0) return false;
    }
    return true;
}

void check_prime(Prime p) {
    thread_local Prime last_checked = 0;
    if (p == last_checked) return;
    if (p >= (Prime{1} << 31) || !is_prime(p)) {
        throw InvalidArgument("field characteristic " + std::to_string(p) + " is not a prime below 2^31");
    }
    last_checked = p;
}

std::uint32_t inverse_mod(std::uint32_t a, Prime p) {
    if (a % p == 0) throw InvalidArgument("zero has no inverse");
    long long t = 0, new_t = 1;
    long long r = p, new_r = a % p;
    while (new_r != 0) {
        long long q = r / new_r;
        t = std::exchange(new_t, t - q * new_t);
        r = std::exchange(new_r, r - q * new_r);
    }
    return reduce(t, p);
}

namespace {

void require_same_field(const Matrix& a, const Matrix& b, const char* what) {
    if (a.prime() != b.prime()) {
        throw DimensionMismatch(std::string(what) + ": matrices over different fields");
    }
}

std::string shape(const Matrix& m) {
    std::ostringstream os;
    os << m.rows() << "x" << m.cols();
    return os.str();
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, Prime p)
    : rows_(rows), cols_(cols), p_(p), data_(rows * cols, 0) {
    check_prime(p);
}

Matrix Matrix::identity(std::size_t n, Prime p) {
    Matrix m(n, n, p);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<long long>> rows, Prime p) {
    std::vector<std::vector<long long>> v;
    for (const auto& r : rows) v.emplace_back(r);
    return from_rows(v, v.empty() ? 0 : v.front().size(), p);
}

Matrix Matrix::from_rows(const std::vector<std::vector<long long>>& rows, std::size_t cols, Prime p) {
    Matrix m(rows.size(), cols, p);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != cols) throw DimensionMismatch("ragged matrix rows");
        for (std::size_t j = 0; j < cols; ++j) m.set(i, j, rows[i][j]);
    }
    return m;
}

bool Matrix::is_zero() const {
    return std::all_of(data_.begin(), data_.end(), [](std::uint32_t v) { return v == 0; });
}

bool Matrix::is_identity() const {
    if (rows_ != cols_) return false;
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            if ((*this)(i, j) != (i == j ? 1u : 0u)) return false;
    return true;
}

Matrix Matrix::transpose() const {
    Matrix t(cols_, rows_, p_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

Matrix Matrix::select_columns(std::span<const std::size_t> columns) const {
    Matrix out(rows_, columns.size(), p_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t k = 0; k < columns.size(); ++k) out(i, k) = (*this)(i, columns[k]);
    return out;
}

Matrix Matrix::block(std::size_t row0, std::size_t col0, std::size_t rows, std::size_t cols) const {
    if (row0 + rows > rows_ || col0 + cols > cols_) throw DimensionMismatch("block out of range");
    Matrix out(rows, cols, p_);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) out(i, j) = (*this)(row0 + i, col0 + j);
    return out;
}

Matrix Matrix::hstack(const Matrix& right) const {
    require_same_field(*this, right, "hstack");
    if (rows_ != right.rows_) throw DimensionMismatch("hstack of " + shape(*this) + " and " + shape(right));
    Matrix out(rows_, cols_ + right.cols_, p_);
    for (std::size_t i = 0; i < rows_; ++i) {
        std::copy(row(i).begin(), row(i).end(), out.row(i).begin());
        std::copy(right.row(i).begin(), right.row(i).end(), out.row(i).begin() + cols_);
    }
    return out;
}

Matrix Matrix::scaled(std::uint32_t c) const {
    Matrix out = *this;
    for (auto& v : out.data_) v = static_cast<std::uint32_t>(std::uint64_t{v} * c % p_);
    return out;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
    require_same_field(a, b, "product");
    if (a.cols_ != b.rows_) throw DimensionMismatch("product of " + shape(a) + " and " + shape(b));
    const Prime p = a.p_;
    Matrix out(a.rows_, b.cols_, p);
    std::vector<std::uint64_t> acc(b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
        std::fill(acc.begin(), acc.end(), 0);
        for (std::size_t k = 0; k < a.cols_; ++k) {
            const std::uint64_t aik = a(i, k);
            if (aik == 0) continue;
            for (std::size_t j = 0; j < b.cols_; ++j) acc[j] = (acc[j] + aik * b(k, j)) % p;
        }
        for (std::size_t j = 0; j < b.cols_; ++j) out(i, j) = static_cast<std::uint32_t>(acc[j]);
    }
    return out;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
    require_same_field(a, b, "sum");
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_)
        throw DimensionMismatch("sum of " + shape(a) + " and " + shape(b));
    Matrix out = a;
    for (std::size_t k = 0; k < out.data_.size(); ++k)
        out.data_[k] = static_cast<std::uint32_t>((std::uint64_t{a.data_[k]} + b.data_[k]) % a.p_);
    return out;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
    require_same_field(a, b, "difference");
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_)
        throw DimensionMismatch("difference of " + shape(a) + " and " + shape(b));
    Matrix out = a;
    for (std::size_t k = 0; k < out.data_.size(); ++k)
        out.data_[k] = static_cast<std::uint32_t>((std::uint64_t{a.data_[k]} + a.p_ - b.data_[k]) % a.p_);
    return out;
}

RowEchelon rref(const Matrix& m) {
    RowEchelon result{m, {}};
    Matrix& r = result.reduced;
    const Prime p = r.prime();
    std::size_t lead = 0;
    for (std::size_t col = 0; col < r.cols() && lead < r.rows(); ++col) {
        std::size_t pivot = lead;
        while (pivot < r.rows() && r(pivot, col) == 0) ++pivot;
        if (pivot == r.rows()) continue;
        if (pivot != lead) {
            auto a = r.row(pivot);
            auto b = r.row(lead);
            std::swap_ranges(a.begin(), a.end(), b.begin());
        }
        const std::uint64_t inv = inverse_mod(r(lead, col), p);
        for (auto& v : r.row(lead)) v = static_cast<std::uint32_t>(v * inv % p);
        for (std::size_t i = 0; i < r.rows(); ++i) {
            if (i == lead || r(i, col) == 0) continue;
            const std::uint64_t factor = p - r(i, col);
            auto target = r.row(i);
            auto source = r.row(lead);
            for (std::size_t j = col; j < r.cols(); ++j)
                target[j] = static_cast<std::uint32_t>((target[j] + factor * source[j]) % p);
        }
        result.pivots.push_back(col);
        ++lead;
    }
    return result;
}

std::size_t rank(const Matrix& m) { return rref(m).rank(); }

Matrix kernel_basis(const Matrix& m) {
    const auto ech = rref(m);
    const Prime p = m.prime();
    std::vector<bool> is_pivot(m.cols(), false);
    for (auto c : ech.pivots) is_pivot[c] = true;
    Matrix basis(m.cols(), m.cols() - ech.rank(), p);
    std::size_t k = 0;
    for (std::size_t free = 0; free < m.cols(); ++free) {
        if (is_pivot[free]) continue;
        basis(free, k) = 1;
        for (std::size_t i = 0; i < ech.rank(); ++i) {
            const auto v = ech.reduced(i, free);
            basis(ech.pivots[i], k) = v == 0 ? 0 : p - v;
        }
        ++k;
    }
    return basis;
}

Matrix column_space_basis(const Matrix& m) {
    const auto ech = rref(m);
    return m.select_columns(ech.pivots);
}

Matrix solve_in_span(const Matrix& basis, const Matrix& target) {
    if (basis.rows() != target.rows())
        throw DimensionMismatch("solve_in_span: basis " + shape(basis) + " vs target " + shape(target));
    const std::size_t k = basis.cols();
    const auto ech = rref(basis.hstack(target));
    Matrix x(k, target.cols(), basis.prime());
    for (std::size_t i = 0; i < ech.rank(); ++i) {
        const auto pc = ech.pivots[i];
        if (pc >= k) {
            throw NoSolution("target column " + std::to_string(pc - k) + " is not in the span of the basis",
                             {{"column", pc - k}});
        }
        for (std::size_t j = 0; j < target.cols(); ++j) x(pc, j) = ech.reduced(i, k + j);
    }
    return x;
}

Matrix cokernel_projection(const Matrix& m) { return kernel_basis(m.transpose()).transpose(); }

Matrix right_inverse(const Matrix& q) {
    return solve_in_span(q, Matrix::identity(q.rows(), q.prime()));
}

nlohmann::json to_json(const Matrix& m) {
    auto out = nlohmann::json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        auto row = nlohmann::json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        out.push_back(std::move(row));
    }
    return out;
}

Matrix matrix_from_json(const nlohmann::json& j, std::size_t rows, std::size_t cols, Prime p) {
    Matrix m(rows, cols, p);
    if (!j.is_array()) throw ParseError("matrix must be a JSON array of rows");
    if (rows == 0 || cols == 0) {
        // Empty maps may be written as [] or as rows of empty arrays.
        for (const auto& r : j)
            if (!r.is_array() || !r.empty()) throw ParseError("expected an empty " + shape(m) + " matrix");
        if (j.size() != 0 && j.size() != rows) throw ParseError("expected an empty " + shape(m) + " matrix");
        return m;
    }
    if (j.size() != rows) throw ParseError("expected " + std::to_string(rows) + " matrix rows");
    for (std::size_t i = 0; i < rows; ++i) {
        const auto& r = j[i];
        if (!r.is_array() || r.size() != cols)
            throw ParseError("matrix row " + std::to_string(i) + " must have " + std::to_string(cols) + " entries");
        for (std::size_t c = 0; c < cols; ++c) {
            if (!r[c].is_number_integer()) throw ParseError("matrix entries must be integers");
            const auto v = r[c].get<long long>();
            if (v < 0 || v >= static_cast<long long>(p))
                throw ParseError("matrix entry " + std::to_string(v) + " outside [0, " + std::to_string(p) + ")");
            m(i, c) = static_cast<std::uint32_t>(v);
        }
    }
    return m;
}

}  // namespace tame
