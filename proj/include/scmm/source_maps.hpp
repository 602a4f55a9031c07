#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "scmm/field.hpp"

namespace scmm {

/// Row split of an m-row matrix into (top, bottom) halves. For odd m the top
/// half of A is padded with a zero row and the middle row of B is shared by
/// both halves of B, so A_1^T B_1 + A_2^T B_2 = A^T B still holds.
std::pair<FqMatrix, FqMatrix> split_rows_a(const FqMatrix& A);
std::pair<FqMatrix, FqMatrix> split_rows_b(const FqMatrix& B);

/// Dot-product messages U = A_2 + B_1, V = A_1 + B_2, W = A_2^T A_1 + B_1^T B_2.
struct DotMessages {
    FqMatrix U;
    FqMatrix V;
    residue W;
};

DotMessages dot_messages(const FqMatrix& A, const FqMatrix& B);
residue dot_decode(const DotMessages& msg);

/// Vector-wise embedding: per-entry integer sums a_i + b_i mod r and an auxiliary
/// symbol (sum of squares mod q for q > 2, sum of the embedded entries mod r for q = 2).
struct EmbedMessages {
    std::vector<std::uint64_t> sums;
    std::uint64_t aux;
    std::uint64_t r;
};

std::uint64_t embed_modulus(std::size_t m, std::uint64_t q);
EmbedMessages embed_dot_messages(const FqMatrix& A, const FqMatrix& B);
residue embed_dot_decode(const std::vector<std::uint64_t>& sums, std::uint64_t aux, std::size_t m,
                         std::uint64_t q);

enum class MatrixVariant { Prop3, Prop5, Thm1 };

/// Matrix-product messages. Prop3 carries U, V (m/2 x l) and W (l x l) for A^T b;
/// Prop5 carries W = A_2^T A_1 + B_1^T B_2; Thm1 carries the symmetrized W_S.
struct MatrixMessages {
    MatrixVariant variant;
    FqMatrix U;
    FqMatrix V;
    FqMatrix W;
};

MatrixMessages matvec_messages(const FqMatrix& A, const FqMatrix& b);
FqMatrix matvec_decode(const MatrixMessages& msg);

MatrixMessages symmetric_messages(const FqMatrix& A, const FqMatrix& B, MatrixVariant variant);
/// With debug set, AsymmetryDetected is raised when the unsymmetrized
/// Prop5 estimate is not symmetric; Thm1 messages carry no such witness.
FqMatrix symmetric_decode(const MatrixMessages& msg, bool debug = false);

/// Column-replicated embedding messages: sums[j] = A + B_j 1^T, AtA = A^T A,
/// BtB[j] = (B_j 1^T)^T (B_j 1^T).
struct SquareEmbedMessages {
    std::vector<FqMatrix> sums;
    FqMatrix AtA;
    std::vector<FqMatrix> BtB;
};

SquareEmbedMessages square_embed_messages(const FqMatrix& A, const FqMatrix& B);
FqMatrix square_embed_decode(const SquareEmbedMessages& msg);

/// Cross messages for general square products: the receiver holds A_1 and B_2
/// as side information plus Ucross = A_2 + B_1 and Wcross = A_1^T A_2 + B_1^T B_2.
struct CrossMessages {
    FqMatrix A1;
    FqMatrix B2;
    FqMatrix Ucross;
    FqMatrix Wcross;
};

CrossMessages cross_messages(const FqMatrix& A, const FqMatrix& B);
FqMatrix square_ah_decode(const FqMatrix& A1, const FqMatrix& B2, const FqMatrix& Ucross,
                          const FqMatrix& Wcross);

enum class RecursiveVariant { recursive, recursive_sym, nested };

/// Per-pair messages of the column-wise recursive construction. W is absent for
/// off-diagonal pairs of recursive_sym. Nested pairs carry items (i), (ii), (iii).
struct PairMessages {
    std::optional<FqMatrix> U;
    std::optional<FqMatrix> V;
    std::optional<residue> W;
    std::optional<FqMatrix> item_i;
    std::optional<FqMatrix> item_ii;
    std::optional<residue> item_iii;
};

struct RecursiveMessages {
    RecursiveVariant variant;
    std::size_t l;
    std::uint64_t q;
    std::map<std::pair<std::size_t, std::size_t>, PairMessages> pairs;
};

RecursiveMessages recursive_messages(const FqMatrix& A, const FqMatrix& B, RecursiveVariant variant);
FqMatrix recursive_decode(const RecursiveMessages& msgs);

} // namespace scmm
