#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scmm/field.hpp"
#include "scmm/poly_codes.hpp"

namespace scmm {

enum class ChainMethod { hierarchical, recursive };

std::string chain_method_name(ChainMethod m);
ChainMethod parse_chain_method(const std::string& name);

/// N_c square m x m matrices whose product X_0^T X_1 X_2^T X_3 ... is wanted.
/// spec supplies q, s_r, s_c, N and the evaluation points; the hierarchical method
/// also uses spec.family for every pairwise product. Matrix dimensions come from the inputs.
struct ChainJob {
    std::vector<FqMatrix> matrices;
    ChainMethod method = ChainMethod::recursive;
    CodeSpec spec;
};

/// Operation counts split by role.
struct RoleOps {
    OpCount master = 0;
    OpCount worker = 0;
    OpCount receiver = 0;

    RoleOps& operator+=(const RoleOps& o) {
        master += o.master;
        worker += o.worker;
        receiver += o.receiver;
        return *this;
    }
};

/// Direct product X_0^T X_1 X_2^T X_3 ... (transposes on even positions).
FqMatrix chain_direct(const std::vector<FqMatrix>& matrices);

/// Published thresholds. Recursive: N_c = 3 gives s_c^2(2s_r-1) + s_c(2s_r-1)s_r/2 (s_r even),
/// N_c = 4 gives 2s_c^2(2s_r-1). Hierarchical: the per-round PolyDot threshold s_c^2(2s_r-1).
std::size_t chain_thresholds(std::size_t N_c, std::size_t s_r, std::size_t s_c, ChainMethod method);

/// Number of outputs the recursive decoder needs: degree + 1 of the worker polynomial
/// under the exponent layout used here. Equals the hierarchical per-round threshold otherwise.
std::size_t chain_decode_threshold(std::size_t N_c, std::size_t s_r, std::size_t s_c, ChainMethod method);

/// Exponents of x attached to block (r, k) of C and D in the recursive layouts.
std::size_t chain_c_exponent(std::size_t r, std::size_t k, std::size_t s_r, std::size_t s_c);
std::size_t chain_d_exponent(std::size_t r, std::size_t k, std::size_t s_r, std::size_t s_c);
/// Exponent carrying result block (row block, column block) of the recursive product.
std::size_t chain_target_exponent(std::size_t a, std::size_t b, std::size_t s_r, std::size_t s_c, std::size_t N_c);

/// Raises SpecViolation or DivisibilityViolation naming the violated invariant.
void validate_chain(const ChainJob& job);

/// Recursive scheme stages. Shares carry only linear combinations and parity blocks;
/// no two-matrix product of the inputs leaves the master.
std::vector<ShareBundle> chain_encode(const ChainJob& job, OpCount* ops = nullptr);
WorkerOutput chain_worker(const ShareBundle& bundle, std::size_t N_c, OpCount* ops = nullptr);
/// Decodes from the first chain_decode_threshold outputs; fewer raise InsufficientOutputs.
FqMatrix chain_decode(const std::vector<WorkerOutput>& outputs, const ChainJob& job, OpCount* ops = nullptr);

/// End-to-end runs over the surviving workers (listed in arrival order; empty means all).
FqMatrix chain3_recursive(const ChainJob& job, RoleOps* ops = nullptr, const std::vector<std::size_t>& survivors = {});
FqMatrix chain4_recursive(const ChainJob& job, RoleOps* ops = nullptr, const std::vector<std::size_t>& survivors = {});
/// Pairwise products through poly_codes, rounds applied until one matrix remains (N_c = 2^b).
/// The same survivor list applies in every round.
FqMatrix chain_hierarchical(const ChainJob& job, RoleOps* ops = nullptr, const std::vector<std::size_t>& survivors = {});
/// Dispatches on job.method and N_c.
FqMatrix chain_run(const ChainJob& job, RoleOps* ops = nullptr, const std::vector<std::size_t>& survivors = {});

/// Recursive-scheme counts under the counting used by chain_encode/chain_worker: master and
/// worker totals over N workers, receiver for n = chain_decode_threshold outputs.
RoleOps chain_closed_forms(std::size_t N_c, std::size_t m, std::size_t s_r, std::size_t s_c, std::size_t N);
/// Field elements in one recursive share and one worker output.
std::size_t chain_share_size(std::size_t N_c, std::size_t m, std::size_t s_r, std::size_t s_c);
std::size_t chain_output_size(std::size_t N_c, std::size_t m, std::size_t s_c);

/// Share envelope with a chain-stage tag: {version, stage, q, i, x_i, polys}.
std::string chain_share_to_json(const ShareBundle& bundle, std::uint64_t q, std::size_t N_c);
ShareBundle chain_share_from_json(const std::string& text, std::uint64_t q, std::size_t N_c);

} // namespace scmm
