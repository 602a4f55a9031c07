#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scmm/field.hpp"
#include "scmm/rate_lab.hpp"

namespace scmm {

/// Shared kappa x n parity matrix used by both encoders.
struct ParityMatrix {
    FqMatrix C;
    std::uint64_t seed;
    std::size_t kappa;
    std::size_t n;
};

/// Uniform i.i.d. entries drawn from the seed, redrawn until the rank is kappa.
ParityMatrix make_parity_matrix(const Field& f, std::size_t kappa, std::size_t n, std::uint64_t seed);

std::vector<residue> km_encode(const ParityMatrix& C, const std::vector<residue>& x);

/// Largest q^n the ML decoder accepts.
inline constexpr std::uint64_t km_enumeration_budget = 1ULL << 22;

/// Most probable z with C z = syndrome under an i.i.d. prior over F_q. Ties go to the
/// lexicographically smallest z.
std::vector<residue> km_decode_ml(const ParityMatrix& C, const std::vector<residue>& syndrome,
                                  const std::vector<double>& prior);

struct KmTrialReport {
    std::size_t n;
    std::size_t kappa;
    std::uint64_t q;
    double p;
    std::size_t trials;
    double empirical_error;
    double rate_margin;
    std::uint64_t seed;
};

/// Per-symbol law of Z = X_1 + X_2; p is the reported source parameter.
struct KmSource {
    std::uint64_t q;
    std::vector<double> z_pmf;
    double p;
};

KmSource dsbs_source(double p);
KmSource custom_source(std::vector<double> z_pmf, double p = 0);

/// Monte-Carlo block error of syndrome coding for each kappa. Trial t uses the same
/// source draw for every kappa and a fresh parity matrix per (trial, kappa).
std::vector<KmTrialReport> km_simulate(const KmSource& source, std::size_t n, const std::vector<std::size_t>& kappas,
                                       std::size_t trials, std::uint64_t seed);

std::string km_csv_header();
std::string km_csv_row(const KmTrialReport& r);

struct KmPipelineResult {
    std::vector<residue> decoded;
    std::vector<residue> truth;
    std::vector<std::size_t> kappas;
    bool block_error;
};

/// Binary dot products of n i.i.d. draws of (A, B) through the message split
/// X_1 = (A_2, A_1, A_2^T A_1), X_2 = (B_1, B_2, B_1^T B_2). Each component is coded
/// with its own shared parity matrix and ML-decoded against the exact marginal of its Z.
/// An empty kappas selects ceil(n (H(Z_j) + margin)) per component, capped at n.
KmPipelineResult km_pipeline_dot(const SourceModel& model, std::size_t n, std::vector<std::size_t> kappas,
                                 std::uint64_t seed, double margin = 0.35);

} // namespace scmm
