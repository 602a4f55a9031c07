#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "scmm/field.hpp"
#include "scmm/poly_codes.hpp"

namespace scmm {

/// PolyDot or StPolyDotGen code padded against ell colluding workers. Pads occupy the
/// blocks (s_r + j, s_c + k), j, k < ell, of the (s_r + ell) x (s_c + ell) layout and are
/// drawn from key_seed (seeded for reproducibility, not for cryptographic use).
struct SecureSpec {
    CodeSpec base;
    std::size_t ell = 1;
    std::uint64_t key_seed = 0;
    bool zero_pads = false;  // debug override: every pad is the zero matrix
};

std::size_t padded_rows(const SecureSpec& spec);  // s_r + ell
std::size_t padded_cols(const SecureSpec& spec);  // s_c + ell

/// Published threshold s_c'(s_c'(2s_r'-1) - 2 ell s_r') - ell with s_r' = s_r + ell, s_c' = s_c + ell.
std::size_t secure_threshold(const SecureSpec& spec);
/// Outputs the decoder needs: degree + 1 of A~_i^T B~_i, s_c'(s_c'(2s_r'-1) - s_r) for
/// ell >= 1 and s_c^2(2s_r-1) for ell = 0.
std::size_t secure_decode_threshold(const SecureSpec& spec);

struct Rational {
    std::uint64_t num = 0;
    std::uint64_t den = 1;
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

/// secure_threshold / (s_c'(s_c'(2s_r'-1) - s_r)); needs ell >= 1.
Rational secure_rate(const SecureSpec& spec);

/// Raises SpecViolation naming the violated invariant.
void validate_secure(const SecureSpec& spec);

/// Exponents of data block (j, k) and pad block (j, k) in the padded layout.
std::size_t secure_a_exponent(std::size_t j, std::size_t k, const SecureSpec& spec, bool pad);
std::size_t secure_b_exponent(std::size_t j, std::size_t k, const SecureSpec& spec, bool pad);

/// Pad blocks K^A then K^B, each ell^2 matrices of size (m_A/s_r) x (m/s_c), row-major in (j, k).
std::pair<std::vector<FqMatrix>, std::vector<FqMatrix>> secure_pads(const SecureSpec& spec);

/// ell = 0 returns master_encode(base) unchanged.
std::vector<ShareBundle> secure_encode(const SecureSpec& spec, const FqMatrix& A, const FqMatrix& B,
                                       OpCount* ops = nullptr);
/// Decodes A^T B from the first secure_decode_threshold outputs of worker_compute.
FqMatrix secure_decode(const std::vector<WorkerOutput>& outputs, const SecureSpec& spec, OpCount* ops = nullptr);

struct CollusionLeak {
    std::vector<std::size_t> workers;
    double mi_bits_numerator = 0;  // T * I(A, B; shares), T = enumerated outcomes
    bool mi_bits_is_zero = true;   // decided by exact integer counts
    double mi_bits = 0;
};

struct LeakageReport {
    std::size_t ell = 0;
    std::size_t set_size = 0;
    std::uint64_t q = 0;
    std::size_t m_A = 0;
    std::size_t m = 0;
    std::uint64_t outcomes = 0;
    std::vector<CollusionLeak> sets;

    bool all_zero() const;
    double max_bits() const;
};

constexpr std::uint64_t leakage_enumeration_budget = 1ULL << 22;

/// Exact I(A, B; A~_L, B~_L) for every collusion set L of the given size, enumerating all
/// pads and every source pair (or the listed pairs, equally likely). Shares are the
/// padded PolyDot evaluations every family derives its share polynomials from.
LeakageReport leakage_audit(const SecureSpec& spec, std::size_t set_size,
                            std::uint64_t budget = leakage_enumeration_budget,
                            const std::vector<std::pair<FqMatrix, FqMatrix>>& sources = {});

std::string leakage_csv_header();
std::vector<std::string> leakage_csv_rows(const LeakageReport& report);

} // namespace scmm
