#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "scmm/field.hpp"
#include "scmm/rng.hpp"

namespace scmm {

double binary_entropy(double p);
/// Entropy in bits of a probability vector (zero entries ignored).
double entropy_bits(const std::vector<double>& pmf);

/// Joint PMF over (A, B), A in F_q^{m x la} and B in F_q^{m x lb}, written as a
/// product of independent factors. Variables 0..m*la-1 are A entries (row-major),
/// the rest are B entries.
struct SourceFactor {
    std::vector<std::size_t> vars;
    std::vector<std::pair<std::vector<residue>, double>> outcomes;
};

struct SourceModel {
    std::string kind;
    std::uint64_t q = 2;
    std::size_t m = 1;
    std::size_t la = 1;
    std::size_t lb = 1;
    std::vector<SourceFactor> factors;

    std::size_t a_index(std::size_t i, std::size_t j) const { return i * la + j; }
    std::size_t b_index(std::size_t i, std::size_t j) const { return m * la + i * lb + j; }
    /// Number of joint outcomes with nonzero probability.
    std::uint64_t support_size() const;
    /// Sum of all outcome probabilities.
    double total_mass() const;
};

/// Binary vectors with a_{(i + floor(m/2)) mod m} and b_i a DSBS(p) pair; for
/// even m these are the pairs (a_{m/2+i}, b_i) and (a_i, b_{m/2+i}).
SourceModel asym_cross_dsbs(double p, std::size_t m);
/// Binary m x l matrices with (a_ij, b_ij) ~ DSBS(p) independently.
SourceModel elementwise_dsbs(double p, std::size_t m, std::size_t l);
/// Ternary m x 2 matrices with b_i1 = b_i2 = -a_i2 and the tabulated (a_i1, b_i1) law.
SourceModel example2_pmf(double eps, double p, std::size_t m);
/// A and B independent and uniform over F_q^{m x l}.
SourceModel uniform_pair(std::uint64_t q, std::size_t m, std::size_t l);
/// Single factor over every entry; probabilities must sum to 1.
SourceModel explicit_table(std::uint64_t q, std::size_t m, std::size_t la, std::size_t lb,
                           std::vector<std::pair<std::vector<residue>, double>> outcomes);

/// Derived variable: maps (A, B) to a tuple of integers.
using Functional = std::function<std::vector<std::uint64_t>(const FqMatrix& A, const FqMatrix& B)>;

using Pmf = std::map<std::vector<std::uint64_t>, double>;
/// Exact distribution of f(A, B). Raises ScaleExceeded when the support exceeds max_outcomes.
Pmf pushforward(const SourceModel& model, const Functional& f, std::uint64_t max_outcomes = 1ULL << 24);
/// One draw of (A, B) from the model.
std::pair<FqMatrix, FqMatrix> sample_source(const SourceModel& model, Rng& rng);

/// Exact Shannon entropy (bits) of the pushforward of the model through f.
/// Raises ScaleExceeded when the support exceeds max_outcomes.
double entropy_exact(const SourceModel& model, const Functional& f, std::uint64_t max_outcomes = 1ULL << 24);
/// H(f | g) = H(f, g) - H(g).
double conditional_entropy(const SourceModel& model, const Functional& f, const Functional& g,
                           std::uint64_t max_outcomes = 1ULL << 24);

/// Flattens matrices into a functional tuple.
std::vector<std::uint64_t> flatten(std::initializer_list<const FqMatrix*> parts);

/// Common functionals.
Functional fn_identity();
Functional fn_a();
Functional fn_b();
Functional fn_product();          // A^T B
Functional fn_dot_uvw();          // (U, V, W) of the dot-product messages
Functional fn_sym_uv();           // (U, V) of the half split
Functional fn_embed();            // ({a_i +_r b_i}, aux)

/// A rate point; entries absent when not defined for the scheme. Units are bits.
struct RatePoint {
    std::string scheme;
    std::size_t m = 0;
    std::size_t l = 0;
    std::uint64_t q = 2;
    double p = 0;
    std::optional<double> epsilon;
    std::optional<double> R_SW, R_KM, R_SV, R_AH, R_HK, eta, gamma;
    std::optional<double> R1, R2;
    double sum_rate = 0;
};

struct RateParams {
    std::size_t m = 2;
    std::size_t l = 1;
    std::uint64_t q = 2;
    double p = 0.1;
    double epsilon = 0.2;
};

/// Schemes: cor1, cor2, example2, ah_dsbs, hk_dsbs.
RatePoint closed_form_rates(const std::string& scheme, const RateParams& params);

enum class ConverseRegime { HK, strong_qinf, trivial };
/// HK: H(A|B) + H(B|A) by enumeration; strong_qinf: R1, R2 >= min(l^2, lm) in q-ary units;
/// trivial: R1 + R2 >= H(A^T B) by enumeration. Enumerated values are in bits.
RatePoint converse_bounds(const SourceModel& model, ConverseRegime regime);
RatePoint strong_converse(std::size_t m, std::size_t l);

/// H_q(A^T B) limit as q grows: 2l min(m,l) - min(m,l)^2.
std::uint64_t lemma4_limit(std::size_t m, std::size_t l);
/// H_q(A^T B | A) limit: min(l^2, lm).
std::uint64_t lemma4_conditional_limit(std::size_t m, std::size_t l);
/// Exact H(A^T B) / log2 q for uniform A, B.
double lemma4_enumerated(std::uint64_t q, std::size_t m, std::size_t l);

enum class GapKind { symmetric, square, dot, outer };
double multiplicative_gap(GapKind kind, std::size_t m, std::size_t l, double p);

enum class RecursiveScheme { recursive, recursive_sym, nested };
struct SchemeCost {
    std::uint64_t rate_per_source;
    std::uint64_t complexity;
};
SchemeCost scheme_cost_tables(RecursiveScheme scheme, std::size_t m, std::size_t l);

struct EtaCondition {
    bool holds;
    double lhs;
    double rhs;
};
/// H(A^T B) + H(U, V | A^T B) < H(A | U, V, A^T B), exactly by enumeration.
EtaCondition eta_condition_check(const SourceModel& model);

/// Sum rate of the Korner-Marton scheme 2 H(U, V, W) for dot products by enumeration.
double km_dot_rate_enumerated(const SourceModel& model);
/// R_AH = H(A1, B2) + 2 max{H(U | A1, B2), H(W | A1, B2, U)} by enumeration.
double ah_rate_enumerated(const SourceModel& model);
/// R_SV = 2 H({a_i +_r b_i}, aux) by enumeration.
double sv_rate_enumerated(const SourceModel& model);

/// Sweep over p for one scheme. Closed-form schemes are cor1, cor2, example2, ah_dsbs,
/// gap_symmetric, gap_square, gap_dot, gap_outer.
std::vector<RatePoint> rate_sweep(const std::string& scheme, const RateParams& base, const std::vector<double>& ps);
std::string rate_csv_header();
std::string rate_csv_row(const RatePoint& r);

} // namespace scmm
