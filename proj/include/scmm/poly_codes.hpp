#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "scmm/field.hpp"
#include "scmm/rng.hpp"

namespace scmm {

enum class Family { Poly, MatDot, PolyDot, StPoly, StMatDot, StPolyDotSym, StPolyDotGen };

const std::vector<Family>& all_families();
std::string family_name(Family f);
/// Accepts the names above, plus "StPolyDot" for StPolyDotSym (the tabulated variant).
Family parse_family(const std::string& name);
/// True for the structured families that ship half-height linear shares plus a parity block.
bool is_structured(Family f);

/// Receiver handling of StPolyDotSym outputs: symmetrize applies (p + p^T) / 2 (q odd),
/// raw uses the worker output as is.
enum class SymMode { symmetrize, raw };

struct CodeSpec {
    Family family = Family::StPolyDotGen;
    std::uint64_t q = 17;
    std::size_t m_A = 8;
    std::size_t m = 4;
    std::size_t m_B = 4;  // Poly and StPoly only
    std::size_t s_r = 1;
    std::size_t s_c = 1;
    std::size_t N = 1;
    std::vector<residue> eval_points;  // empty selects 1..N
    std::uint64_t seed = 0;
    SymMode sym_mode = SymMode::symmetrize;
};

/// Row and column block counts of the PolyDot-style split used by the family
/// (MatDot variants use s = s_r s_c row blocks, Poly variants use m column blocks).
std::pair<std::size_t, std::size_t> block_counts(const CodeSpec& spec);

std::size_t recovery_threshold(Family family, std::size_t s_r, std::size_t s_c, std::size_t m, std::size_t m_B);
std::size_t recovery_threshold(const CodeSpec& spec);

/// Raises SpecViolation (or NotPrime) naming the violated invariant.
void validate(const CodeSpec& spec);
std::vector<residue> evaluation_points(const CodeSpec& spec);

/// s_r x s_c grid of equal blocks, row-major.
struct BlockGrid {
    std::size_t s_r = 1;
    std::size_t s_c = 1;
    std::vector<FqMatrix> blocks;

    const FqMatrix& at(std::size_t j, std::size_t k) const { return blocks[j * s_c + k]; }
};

BlockGrid split_blocks(const FqMatrix& X, std::size_t s_r, std::size_t s_c);
FqMatrix join_blocks(const BlockGrid& g);

/// Exponent of x attached to block (j, k) of A and of B under the PolyDot layout.
std::size_t polydot_a_exponent(std::size_t j, std::size_t k, std::size_t s_r, std::size_t s_c);
std::size_t polydot_b_exponent(std::size_t j, std::size_t k, std::size_t s_r, std::size_t s_c);
/// Exponent carrying block (k, k') of A^T B.
std::size_t polydot_target_exponent(std::size_t k, std::size_t kp, std::size_t s_r, std::size_t s_c);

/// sum_idx blocks[idx] x^exps[idx]; one multiply-add per block entry.
FqMatrix evaluate_blocks(const std::vector<FqMatrix>& blocks, const std::vector<std::size_t>& exps, residue x,
                         OpCount* ops = nullptr);

struct ShareBundle {
    std::size_t worker = 0;
    residue x = 0;
    std::vector<FqMatrix> polys;
};

struct WorkerOutput {
    std::size_t worker = 0;
    residue x = 0;
    FqMatrix value{Field(2), 0, 0};
};

/// Shares for every worker. A is m_A x m; B is m_A x m (m_A x m_B for Poly variants).
std::vector<ShareBundle> master_encode(const CodeSpec& spec, const FqMatrix& A, const FqMatrix& B,
                                       OpCount* ops = nullptr);
/// Share polynomials of one worker from its evaluated A~_i, B~_i (row halves and parity
/// block for the structured families).
ShareBundle assemble_share(Family family, std::size_t worker, residue x, const FqMatrix& At, const FqMatrix& Bt,
                           OpCount* ops = nullptr);
WorkerOutput worker_compute(const ShareBundle& bundle, Family family, OpCount* ops = nullptr);

/// Decodes A^T B from the first N_r outputs (in the given order). Fewer outputs raise
/// InsufficientOutputs. The counter receives |I| * output size + |I|^3.
FqMatrix receiver_decode(const std::vector<WorkerOutput>& outputs, const CodeSpec& spec, OpCount* ops = nullptr);

/// Coefficients at the requested exponents of a matrix polynomial of degree < n, from the
/// first n (x, value) outputs.
std::vector<FqMatrix> interpolate_coefficients(const std::vector<WorkerOutput>& outputs, std::size_t n,
                                               const std::vector<std::size_t>& exps);

/// Whether the symmetric-family correctness condition holds for (A, B): every
/// A~_i^T B~_i is symmetric (symmetrize mode), or the top-half blocks satisfy
/// B_{j'1,k'}^T A_{j1,k} = A_{j1,k}^T B_{j'1,k'} (raw mode and StMatDot). Always true
/// for the other families.
bool structured_precondition(const CodeSpec& spec, const FqMatrix& A, const FqMatrix& B);

/// Random inputs of the right shapes. For StPolyDotSym and StMatDot the draws satisfy
/// structured_precondition: block halves are scalar multiples of one common matrix.
std::pair<FqMatrix, FqMatrix> sample_inputs(const CodeSpec& spec, Rng& rng);

/// Share envelope {version, family, q, i, x_i, polys: [{rows, cols, entries}]}.
std::string share_to_json(const ShareBundle& bundle, const CodeSpec& spec);
ShareBundle share_from_json(const std::string& text, const CodeSpec& spec);

/// Field elements held by one worker for the family.
std::size_t share_size(const CodeSpec& spec);
/// Entries of one worker output.
std::size_t output_size(const CodeSpec& spec);

} // namespace scmm
