#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scmm/field.hpp"

namespace scmm {

/// Outcome of one oracle sweep at one grid point.
struct OracleTally {
    std::string scheme;
    std::uint64_t q = 0;
    std::size_t m = 0;
    std::size_t l = 0;
    bool exhaustive = false;
    std::uint64_t checks = 0;
    std::uint64_t mismatches = 0;
};

/// Schoolbook X^T Y with integer accumulation; independent of mat_mul.
FqMatrix direct_tmul(const FqMatrix& X, const FqMatrix& Y);

/// Uniform B among the m x l matrices with A^T B symmetric.
FqMatrix sample_symmetric_partner(const FqMatrix& A, Rng& rng);

struct SourceOracleGrid {
    std::vector<std::uint64_t> qs{2, 3, 5, 7};
    std::size_t max_m = 8;
    std::size_t max_l = 3;
    std::uint64_t exhaustive_limit = 1ULL << 20;
    std::size_t random_trials = 1000;
};

/// Runs every source-mapping decoder against the direct product over the grid:
/// exhaustively when the joint input space fits the limit, else on seeded samples.
std::vector<OracleTally> source_maps_oracles(const SourceOracleGrid& grid, std::uint64_t seed);

} // namespace scmm
