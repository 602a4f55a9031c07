#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "scmm/error.hpp"
#include "scmm/rng.hpp"

namespace scmm {

using residue = std::uint64_t;

/// Prime field F_q with q < 2^31, validated by trial division.
class Field {
public:
    explicit Field(std::uint64_t q);

    std::uint64_t q() const { return q_; }
    bool odd() const { return q_ % 2 == 1; }

    residue add(residue a, residue b) const { return (a + b) % q_; }
    residue sub(residue a, residue b) const { return (a + q_ - b) % q_; }
    residue neg(residue a) const { return (q_ - a) % q_; }
    residue mul(residue a, residue b) const { return (a * b) % q_; }
    residue pow(residue a, std::uint64_t e) const;
    residue inv(residue a) const;
    /// a * 2^{-1}; requires q odd.
    residue div2(residue a) const;
    /// Reduces any signed integer into [0, q).
    residue reduce(std::int64_t v) const;

    bool operator==(const Field& o) const { return q_ == o.q_; }
    bool operator!=(const Field& o) const { return q_ != o.q_; }

private:
    std::uint64_t q_;
};

bool is_prime(std::uint64_t n);

enum class ArithOp { add, sub, mul, inv, div2 };

/// Single field operation; inv and div2 act on a and ignore b.
residue field_arith(const Field& f, residue a, residue b, ArithOp op);

/// Dense row-major matrix over F_q.
class FqMatrix {
public:
    FqMatrix(const Field& f, std::size_t rows, std::size_t cols);
    FqMatrix(const Field& f, std::size_t rows, std::size_t cols, std::vector<residue> entries);

    static FqMatrix identity(const Field& f, std::size_t n);
    static FqMatrix random(const Field& f, std::size_t rows, std::size_t cols, Rng& rng);
    /// Column vector from a list of residues.
    static FqMatrix column(const Field& f, const std::vector<residue>& v);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    const Field& field() const { return field_; }
    const std::vector<residue>& entries() const { return data_; }

    residue operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    residue& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }

    FqMatrix transpose() const;
    /// Rows [r0, r1) and columns [c0, c1).
    FqMatrix slice(std::size_t r0, std::size_t r1, std::size_t c0, std::size_t c1) const;
    void set_block(std::size_t r0, std::size_t c0, const FqMatrix& blk);
    bool is_zero() const;

    bool operator==(const FqMatrix& o) const;
    bool operator!=(const FqMatrix& o) const { return !(*this == o); }

private:
    Field field_;
    std::size_t rows_;
    std::size_t cols_;
    std::vector<residue> data_;
};

/// Optional operation counter: one unit per field multiply-add.
using OpCount = std::uint64_t;

FqMatrix mat_mul(const FqMatrix& X, const FqMatrix& Y, OpCount* ops = nullptr);
/// X^T Y without materializing the transpose.
FqMatrix mat_tmul(const FqMatrix& X, const FqMatrix& Y, OpCount* ops = nullptr);
FqMatrix mat_add(const FqMatrix& X, const FqMatrix& Y, OpCount* ops = nullptr);
FqMatrix mat_sub(const FqMatrix& X, const FqMatrix& Y, OpCount* ops = nullptr);
FqMatrix mat_scale(const FqMatrix& X, residue c);
/// Y += c * X, charged one unit per entry.
void mat_axpy(FqMatrix& Y, residue c, const FqMatrix& X, OpCount* ops = nullptr);
FqMatrix hstack(const FqMatrix& X, const FqMatrix& Y);
FqMatrix vstack(const FqMatrix& X, const FqMatrix& Y);

/// Unique X with M X = rhs by Gaussian elimination (first nonzero pivot).
FqMatrix solve_linear(const FqMatrix& M, const FqMatrix& rhs);
/// Some X with M X = rhs for any shape of M, or nullopt if inconsistent.
std::optional<FqMatrix> solve_any(const FqMatrix& M, const FqMatrix& rhs);
/// Basis of {x : M x = 0} as the columns of the result.
FqMatrix null_space(const FqMatrix& M);
/// Rank of M over F_q.
std::size_t rank(const FqMatrix& M);

/// Coefficients c_j with sum_j c_j p(x_j) = [x^k] p for every p of degree < |points|.
std::vector<residue> lagrange_coeffs(const Field& f, const std::vector<residue>& points,
                                     std::size_t k);
/// Inverse of V(j, e) = x_j^e; row k is lagrange_coeffs(points, k).
FqMatrix vandermonde_inverse(const Field& f, const std::vector<residue>& points);

} // namespace scmm
