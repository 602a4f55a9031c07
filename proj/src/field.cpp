#include "scmm/field.hpp"

#include <optional>
#include <string>
#include <utility>

namespace scmm {

bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    if (n < 4) return true;
    if (n % 2 == 0) return false;
    for (std::uint64_t d = 3; d * d <= n; d += 2)
        if (n % d == 0) return false;
    return true;
}

Field::Field(std::uint64_t q) : q_(q) {
    if (q >= (1ULL << 31)) throw Error(Errc::OutOfRange, "q must be below 2^31");
    if (!is_prime(q)) throw Error(Errc::NotPrime, "q = " + std::to_string(q) + " is not prime");
}

residue Field::pow(residue a, std::uint64_t e) const {
    residue r = 1 % q_, b = a % q_;
    while (e) {
        if (e & 1) r = mul(r, b);
        b = mul(b, b);
        e >>= 1;
    }
    return r;
}

residue Field::inv(residue a) const {
    if (a % q_ == 0) throw Error(Errc::InverseOfZero, "inverse of zero");
    return pow(a, q_ - 2);
}

residue Field::div2(residue a) const {
    if (q_ == 2) throw Error(Errc::EvenFieldDivision, "division by 2 in F_2");
    return mul(a, (q_ + 1) / 2);
}

residue Field::reduce(std::int64_t v) const {
    const auto q = static_cast<std::int64_t>(q_);
    std::int64_t r = v % q;
    return static_cast<residue>(r < 0 ? r + q : r);
}

residue field_arith(const Field& f, residue a, residue b, ArithOp op) {
    if (a >= f.q() || b >= f.q()) throw Error(Errc::OutOfRange, "operand not reduced");
    switch (op) {
    case ArithOp::add: return f.add(a, b);
    case ArithOp::sub: return f.sub(a, b);
    case ArithOp::mul: return f.mul(a, b);
    case ArithOp::inv: return f.inv(a);
    case ArithOp::div2: return f.div2(a);
    }
    return 0;
}

FqMatrix::FqMatrix(const Field& f, std::size_t rows, std::size_t cols)
    : field_(f), rows_(rows), cols_(cols), data_(rows * cols, 0) {}

FqMatrix::FqMatrix(const Field& f, std::size_t rows, std::size_t cols, std::vector<residue> entries)
    : field_(f), rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows * cols) throw Error(Errc::ShapeMismatch, "entry count does not match shape");
    for (residue v : data_)
        if (v >= f.q()) throw Error(Errc::OutOfRange, "entry not reduced mod q");
}

FqMatrix FqMatrix::identity(const Field& f, std::size_t n) {
    FqMatrix I(f, n, n);
    for (std::size_t i = 0; i < n; ++i) I(i, i) = 1 % f.q();
    return I;
}

FqMatrix FqMatrix::random(const Field& f, std::size_t rows, std::size_t cols, Rng& rng) {
    FqMatrix M(f, rows, cols);
    for (auto& v : M.data_) v = rng.below(f.q());
    return M;
}

FqMatrix FqMatrix::column(const Field& f, const std::vector<residue>& v) {
    return FqMatrix(f, v.size(), 1, v);
}

FqMatrix FqMatrix::transpose() const {
    FqMatrix T(field_, cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) T(c, r) = (*this)(r, c);
    return T;
}

FqMatrix FqMatrix::slice(std::size_t r0, std::size_t r1, std::size_t c0, std::size_t c1) const {
    if (r0 > r1 || r1 > rows_ || c0 > c1 || c1 > cols_) throw Error(Errc::ShapeMismatch, "slice out of range");
    FqMatrix S(field_, r1 - r0, c1 - c0);
    for (std::size_t r = r0; r < r1; ++r)
        for (std::size_t c = c0; c < c1; ++c) S(r - r0, c - c0) = (*this)(r, c);
    return S;
}

void FqMatrix::set_block(std::size_t r0, std::size_t c0, const FqMatrix& blk) {
    if (r0 + blk.rows_ > rows_ || c0 + blk.cols_ > cols_) throw Error(Errc::ShapeMismatch, "block out of range");
    for (std::size_t r = 0; r < blk.rows_; ++r)
        for (std::size_t c = 0; c < blk.cols_; ++c) (*this)(r0 + r, c0 + c) = blk(r, c);
}

bool FqMatrix::is_zero() const {
    for (residue v : data_)
        if (v) return false;
    return true;
}

bool FqMatrix::operator==(const FqMatrix& o) const {
    return field_ == o.field_ && rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
}

namespace {

void check_field(const FqMatrix& X, const FqMatrix& Y) {
    if (X.field() != Y.field()) throw Error(Errc::FieldMismatch, "operands over different fields");
}

void check_same_shape(const FqMatrix& X, const FqMatrix& Y) {
    check_field(X, Y);
    if (X.rows() != Y.rows() || X.cols() != Y.cols()) throw Error(Errc::ShapeMismatch, "shape mismatch");
}

} // namespace

FqMatrix mat_mul(const FqMatrix& X, const FqMatrix& Y, OpCount* ops) {
    check_field(X, Y);
    if (X.cols() != Y.rows()) throw Error(Errc::ShapeMismatch, "inner dimensions differ");
    const Field& f = X.field();
    const std::uint64_t q = f.q();
    FqMatrix Z(f, X.rows(), Y.cols());
    for (std::size_t i = 0; i < X.rows(); ++i)
        for (std::size_t j = 0; j < Y.cols(); ++j) {
            std::uint64_t acc = 0;
            for (std::size_t k = 0; k < X.cols(); ++k) acc = (acc + X(i, k) * Y(k, j)) % q;
            Z(i, j) = acc;
        }
    if (ops) *ops += X.rows() * X.cols() * Y.cols();
    return Z;
}

FqMatrix mat_tmul(const FqMatrix& X, const FqMatrix& Y, OpCount* ops) {
    check_field(X, Y);
    if (X.rows() != Y.rows()) throw Error(Errc::ShapeMismatch, "inner dimensions differ");
    const std::uint64_t q = X.field().q();
    FqMatrix Z(X.field(), X.cols(), Y.cols());
    for (std::size_t i = 0; i < X.cols(); ++i)
        for (std::size_t j = 0; j < Y.cols(); ++j) {
            std::uint64_t acc = 0;
            for (std::size_t k = 0; k < X.rows(); ++k) acc = (acc + X(k, i) * Y(k, j)) % q;
            Z(i, j) = acc;
        }
    if (ops) *ops += X.rows() * X.cols() * Y.cols();
    return Z;
}

FqMatrix mat_add(const FqMatrix& X, const FqMatrix& Y, OpCount* ops) {
    check_same_shape(X, Y);
    const Field& f = X.field();
    std::vector<residue> e(X.size());
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = f.add(X.entries()[i], Y.entries()[i]);
    if (ops) *ops += X.size();
    return FqMatrix(f, X.rows(), X.cols(), std::move(e));
}

FqMatrix mat_sub(const FqMatrix& X, const FqMatrix& Y, OpCount* ops) {
    check_same_shape(X, Y);
    const Field& f = X.field();
    std::vector<residue> e(X.size());
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = f.sub(X.entries()[i], Y.entries()[i]);
    if (ops) *ops += X.size();
    return FqMatrix(f, X.rows(), X.cols(), std::move(e));
}

FqMatrix mat_scale(const FqMatrix& X, residue c) {
    const Field& f = X.field();
    std::vector<residue> e(X.size());
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = f.mul(X.entries()[i], c % f.q());
    return FqMatrix(f, X.rows(), X.cols(), std::move(e));
}

void mat_axpy(FqMatrix& Y, residue c, const FqMatrix& X, OpCount* ops) {
    check_same_shape(X, Y);
    const Field& f = X.field();
    c %= f.q();
    for (std::size_t r = 0; r < X.rows(); ++r)
        for (std::size_t k = 0; k < X.cols(); ++k) Y(r, k) = f.add(Y(r, k), f.mul(c, X(r, k)));
    if (ops) *ops += X.size();
}

FqMatrix hstack(const FqMatrix& X, const FqMatrix& Y) {
    check_field(X, Y);
    if (X.rows() != Y.rows()) throw Error(Errc::ShapeMismatch, "hstack row counts differ");
    FqMatrix Z(X.field(), X.rows(), X.cols() + Y.cols());
    Z.set_block(0, 0, X);
    Z.set_block(0, X.cols(), Y);
    return Z;
}

FqMatrix vstack(const FqMatrix& X, const FqMatrix& Y) {
    check_field(X, Y);
    if (X.cols() != Y.cols()) throw Error(Errc::ShapeMismatch, "vstack column counts differ");
    FqMatrix Z(X.field(), X.rows() + Y.rows(), X.cols());
    Z.set_block(0, 0, X);
    Z.set_block(X.rows(), 0, Y);
    return Z;
}

namespace {

/// Row-reduces [M | R] in place to reduced echelon form; returns pivot columns of M.
std::vector<std::size_t> row_reduce(FqMatrix& M, FqMatrix* R) {
    const Field& f = M.field();
    std::vector<std::size_t> pivots;
    std::size_t row = 0;
    for (std::size_t col = 0; col < M.cols() && row < M.rows(); ++col) {
        std::size_t p = row;
        while (p < M.rows() && M(p, col) == 0) ++p;
        if (p == M.rows()) continue;
        if (p != row) {
            for (std::size_t c = 0; c < M.cols(); ++c) std::swap(M(p, c), M(row, c));
            if (R)
                for (std::size_t c = 0; c < R->cols(); ++c) std::swap((*R)(p, c), (*R)(row, c));
        }
        const residue iv = f.inv(M(row, col));
        for (std::size_t c = 0; c < M.cols(); ++c) M(row, c) = f.mul(M(row, c), iv);
        if (R)
            for (std::size_t c = 0; c < R->cols(); ++c) (*R)(row, c) = f.mul((*R)(row, c), iv);
        for (std::size_t r = 0; r < M.rows(); ++r) {
            if (r == row || M(r, col) == 0) continue;
            const residue factor = M(r, col);
            for (std::size_t c = 0; c < M.cols(); ++c) M(r, c) = f.sub(M(r, c), f.mul(factor, M(row, c)));
            if (R)
                for (std::size_t c = 0; c < R->cols(); ++c)
                    (*R)(r, c) = f.sub((*R)(r, c), f.mul(factor, (*R)(row, c)));
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

} // namespace

FqMatrix solve_linear(const FqMatrix& M, const FqMatrix& rhs) {
    check_field(M, rhs);
    if (M.rows() != M.cols()) throw Error(Errc::ShapeMismatch, "solve_linear needs a square matrix");
    if (rhs.rows() != M.rows()) throw Error(Errc::ShapeMismatch, "rhs row count differs");
    FqMatrix E = M;
    FqMatrix X = rhs;
    if (row_reduce(E, &X).size() != M.rows()) throw Error(Errc::SingularMatrix, "matrix is singular");
    return X;
}

std::optional<FqMatrix> solve_any(const FqMatrix& M, const FqMatrix& rhs) {
    check_field(M, rhs);
    if (rhs.rows() != M.rows()) throw Error(Errc::ShapeMismatch, "rhs row count differs");
    FqMatrix E = M;
    FqMatrix R = rhs;
    const auto pivots = row_reduce(E, &R);
    for (std::size_t r = pivots.size(); r < R.rows(); ++r)
        for (std::size_t c = 0; c < R.cols(); ++c)
            if (R(r, c)) return std::nullopt;
    FqMatrix X(M.field(), M.cols(), rhs.cols());
    for (std::size_t i = 0; i < pivots.size(); ++i)
        for (std::size_t c = 0; c < R.cols(); ++c) X(pivots[i], c) = R(i, c);
    return X;
}

FqMatrix null_space(const FqMatrix& M) {
    const Field& f = M.field();
    FqMatrix E = M;
    const auto pivots = row_reduce(E, nullptr);
    std::vector<bool> is_pivot(M.cols(), false);
    for (std::size_t p : pivots) is_pivot[p] = true;
    std::vector<std::size_t> free_cols;
    for (std::size_t c = 0; c < M.cols(); ++c)
        if (!is_pivot[c]) free_cols.push_back(c);
    FqMatrix K(f, M.cols(), free_cols.size());
    for (std::size_t k = 0; k < free_cols.size(); ++k) {
        K(free_cols[k], k) = 1;
        for (std::size_t i = 0; i < pivots.size(); ++i) K(pivots[i], k) = f.neg(E(i, free_cols[k]));
    }
    return K;
}

std::size_t rank(const FqMatrix& M) {
    FqMatrix E = M;
    return row_reduce(E, nullptr).size();
}

namespace {

void check_distinct(const Field& f, const std::vector<residue>& points) {
    const std::size_t n = points.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (points[i] % f.q() == points[j] % f.q()) throw Error(Errc::DuplicatePoint, "evaluation points repeat");
}

FqMatrix vandermonde(const Field& f, const std::vector<residue>& points) {
    const std::size_t n = points.size();
    FqMatrix V(f, n, n);
    for (std::size_t j = 0; j < n; ++j) {
        residue x = points[j] % f.q(), p = 1 % f.q();
        for (std::size_t e = 0; e < n; ++e) {
            V(j, e) = p;
            p = f.mul(p, x);
        }
    }
    return V;
}

} // namespace

std::vector<residue> lagrange_coeffs(const Field& f, const std::vector<residue>& points, std::size_t k) {
    const std::size_t n = points.size();
    if (k >= n) throw Error(Errc::OutOfRange, "coefficient index exceeds polynomial degree");
    check_distinct(f, points);
    // Row k of V^{-1}, where V(j, e) = x_j^e: solve V^T c = e_k.
    FqMatrix Vt = vandermonde(f, points).transpose();
    FqMatrix ek(f, n, 1);
    ek(k, 0) = 1 % f.q();
    FqMatrix c = solve_linear(Vt, ek);
    return c.entries();
}

FqMatrix vandermonde_inverse(const Field& f, const std::vector<residue>& points) {
    check_distinct(f, points);
    return solve_linear(vandermonde(f, points), FqMatrix::identity(f, points.size()));
}

} // namespace scmm
