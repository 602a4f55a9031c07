#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "scmm/chain_codes.hpp"
#include "scmm/poly_codes.hpp"
#include "scmm/secure_codes.hpp"

namespace scmm {

enum class StragglerKind { none, random_erasure, adversarial_subset };

/// Stragglers are erasures. random_erasure drops each worker independently with
/// probability prob; adversarial_subset keeps exactly count workers, either the listed
/// subset or a seeded choice when subset is empty.
struct StragglerModel {
    StragglerKind kind = StragglerKind::none;
    double prob = 0;
    std::size_t count = 0;
    std::uint64_t seed = 0;
    std::vector<std::size_t> subset;

    static StragglerModel none() { return {}; }
    static StragglerModel random_erasure(double prob, std::uint64_t seed);
    static StragglerModel adversarial_subset(std::size_t count, std::uint64_t seed);
    static StragglerModel adversarial_subset(std::vector<std::size_t> survivors);
};

std::string straggler_kind_name(StragglerKind k);
StragglerKind parse_straggler_kind(const std::string& name);

/// Surviving worker indices in increasing order.
std::vector<std::size_t> draw_survivors(const StragglerModel& model, std::size_t N, std::uint64_t trial = 0);

/// Storage and communication in field elements, computation in multiply-adds. Worker
/// storage, master communication and worker computation are totals over all N workers;
/// worker communication counts the outputs the receiver consumes.
struct CostReport {
    std::uint64_t master_storage = 0;
    std::uint64_t worker_storage = 0;
    std::uint64_t master_comm = 0;
    std::uint64_t worker_comm = 0;
    std::uint64_t master_comp = 0;
    std::uint64_t worker_comp = 0;
    std::uint64_t receiver_comp = 0;
    std::size_t recovery_threshold = 0;
    bool success = false;

    bool operator==(const CostReport&) const = default;
};

struct ExperimentResult {
    std::optional<FqMatrix> product;  // set iff cost.success
    CostReport cost;
    std::vector<std::size_t> survivors;
    bool matches = true;  // product equals the direct product; set by run_config
};

/// Encodes, runs every worker, erases stragglers and decodes. Success iff the survivors
/// reach the decoding threshold; a shortfall is reported, never thrown. Master and worker
/// computation are spent whatever survives; a failed run has zero receiver computation.
ExperimentResult run_experiment(const CodeSpec& spec, const FqMatrix& A, const FqMatrix& B,
                                const StragglerModel& straggler, std::uint64_t trial = 0);
ExperimentResult run_experiment(const SecureSpec& spec, const FqMatrix& A, const FqMatrix& B,
                                const StragglerModel& straggler, std::uint64_t trial = 0);
ExperimentResult run_experiment(const ChainJob& job, const StragglerModel& straggler, std::uint64_t trial = 0);

/// Exact table cells for a successful run with no stragglers. Needs only the divisibility
/// constraints of the family, not a field.
CostReport cost_closed_forms(const CodeSpec& spec);
CostReport cost_closed_forms(const SecureSpec& spec);
CostReport cost_closed_forms(const ChainJob& job);

/// PolyDot against the symmetric StPolyDot on the same (m_A, m, s_r, s_c, N). Realized
/// ratios come from cost_closed_forms and are empty when the block split does not divide.
struct GainRatios {
    double eta_S = 0;      // 2 m_A / (m_A + m s_r / s_c)
    double chi_bound = 0;  // 1 + (s_c + 5m/2) / (2 s s_c + m)
    std::optional<double> eta_S_realized;
    std::optional<double> eta_comm;  // PolyDot over StPolyDot total communication
    std::optional<double> chi_comp;  // StPolyDot over PolyDot master plus worker computation
};

/// Raises DegenerateDenominator when a ratio has a zero denominator.
GainRatios gain_ratios(std::size_t m_A, std::size_t m, std::size_t s_r, std::size_t s_c, std::size_t N);

/// Experiment configuration {family, q, m_A, m, m_B, s_r, s_c, N, ell, straggler, seed,
/// trials}; straggler is {kind, prob, count}. An optional chain {N_c, method} object turns
/// the run into an m x m chain product.
struct ExperimentConfig {
    CodeSpec spec;
    std::size_t ell = 0;
    StragglerModel straggler;
    std::uint64_t seed = 0;
    std::size_t trials = 1;
    std::size_t chain_length = 0;
    ChainMethod chain_method = ChainMethod::recursive;
};

/// Raises ConfigError naming the offending field or violated invariant.
ExperimentConfig parse_config(const std::string& json_text);

std::string cost_csv_header();
std::string cost_csv_row(const ExperimentConfig& cfg, std::uint64_t trial, const ExperimentResult& r);

/// Runs every trial with inputs drawn from derive_seed(seed, trial) and compares each
/// decoded product with the direct product.
std::vector<ExperimentResult> run_config(const ExperimentConfig& cfg);

} // namespace scmm
