#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include "scmm/chain_codes.hpp"
#include "support.hpp"

using namespace scmm;
using scmm::testing::naive_mul;
using scmm::testing::naive_tmul;

namespace {

/// Chain product by schoolbook arithmetic, independent of chain_direct.
FqMatrix oracle_chain(const std::vector<FqMatrix>& ms) {
    FqMatrix P = naive_tmul(ms[0], ms[1]);
    for (std::size_t i = 2; i < ms.size(); ++i) P = naive_mul(P, i % 2 ? ms[i] : ms[i].transpose());
    return P;
}

ChainJob make_job(std::vector<FqMatrix> ms, ChainMethod method, std::uint64_t q, std::size_t s_r, std::size_t s_c,
                  std::size_t N, Family family = Family::StPolyDotGen) {
    ChainJob job;
    job.matrices = std::move(ms);
    job.method = method;
    job.spec.family = family;
    job.spec.q = q;
    job.spec.s_r = s_r;
    job.spec.s_c = s_c;
    job.spec.N = N;
    return job;
}

std::vector<FqMatrix> random_chain(const Field& f, std::size_t n, std::size_t m, Rng& rng) {
    std::vector<FqMatrix> ms;
    for (std::size_t i = 0; i < n; ++i) ms.push_back(FqMatrix::random(f, m, m, rng));
    return ms;
}

template <typename Fn>
Errc code_of(Fn&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error raised";
    return Errc::ConfigError;
}

} // namespace

TEST(ChainThresholdTest, PublishedValues) {
    EXPECT_EQ(chain_thresholds(4, 2, 2, ChainMethod::recursive), 24u);
    EXPECT_EQ(chain_thresholds(3, 2, 2, ChainMethod::recursive), 18u);
    EXPECT_EQ(chain_thresholds(4, 1, 1, ChainMethod::recursive), 2u);
    EXPECT_EQ(chain_thresholds(3, 2, 1, ChainMethod::recursive), 6u);
    EXPECT_EQ(chain_thresholds(4, 2, 1, ChainMethod::recursive), 6u);
    EXPECT_EQ(chain_thresholds(4, 3, 2, ChainMethod::hierarchical), 20u);
    EXPECT_EQ(code_of([] { chain_thresholds(3, 3, 1, ChainMethod::recursive); }), Errc::SpecViolation);
}

TEST(ChainThresholdTest, DecodeThresholdsAtSmallInstances) {
    // Three matrices: the layout needs fewer points than published; four need one more.
    EXPECT_EQ(chain_decode_threshold(3, 2, 1, ChainMethod::recursive), 5u);
    EXPECT_EQ(chain_decode_threshold(4, 2, 1, ChainMethod::recursive), 7u);
    EXPECT_EQ(chain_decode_threshold(4, 1, 1, ChainMethod::recursive), 1u);
}

/// Every term of the worker polynomial lands either on its own target exponent or off all targets.
TEST(ChainLayoutTest, TargetsAreCollisionFree) {
    for (std::size_t s_r = 1; s_r <= 3; ++s_r)
        for (std::size_t s_c = 1; s_c <= 3; ++s_c)
            for (std::size_t N_c : {3u, 4u}) {
                std::map<std::size_t, std::set<std::pair<std::size_t, std::size_t>>> aligned;
                std::vector<std::size_t> stray;
                std::size_t max_exp = 0;
                const std::size_t dn = N_c == 4 ? s_r * s_c : 1;
                for (std::size_t j = 0; j < s_r; ++j)
                    for (std::size_t k = 0; k < s_c; ++k)
                        for (std::size_t jp = 0; jp < s_r; ++jp)
                            for (std::size_t kp = 0; kp < s_c; ++kp)
                                for (std::size_t r = 0; r < s_r; ++r)
                                    for (std::size_t kc = 0; kc < s_c; ++kc)
                                        for (std::size_t d = 0; d < dn; ++d) {
                                            const std::size_t rd = d / s_c, kd = d % s_c;
                                            std::size_t e = polydot_a_exponent(j, k, s_r, s_c) +
                                                            polydot_b_exponent(jp, kp, s_r, s_c) +
                                                            chain_c_exponent(r, kc, s_r, s_c);
                                            if (N_c == 4) e += chain_d_exponent(rd, kd, s_r, s_c);
                                            max_exp = std::max(max_exp, e);
                                            const bool ok = j == jp && kp == kc && (N_c == 3 || r == rd);
                                            if (!ok) {
                                                stray.push_back(e);
                                                continue;
                                            }
                                            const auto block = N_c == 3 ? std::make_pair(k, r) : std::make_pair(k, kd);
                                            aligned[e].insert(block);
                                            EXPECT_EQ(e, chain_target_exponent(block.first, block.second, s_r, s_c, N_c));
                                        }
                for (const auto& [e, blocks] : aligned) EXPECT_EQ(blocks.size(), 1u);
                EXPECT_EQ(aligned.size(), N_c == 3 ? s_c * s_r : s_c * s_c);
                for (std::size_t e : stray) EXPECT_EQ(aligned.count(e), 0u) << s_r << ' ' << s_c << ' ' << N_c;
                EXPECT_EQ(max_exp + 1, chain_decode_threshold(N_c, s_r, s_c, ChainMethod::recursive));
            }
}

TEST(ChainRecursiveTest, IdentityChain) {
    const Field f(29);
    const FqMatrix I = FqMatrix::identity(f, 4);
    EXPECT_EQ(chain3_recursive(make_job({I, I, I}, ChainMethod::recursive, 29, 2, 1, 6)), I);
    EXPECT_EQ(chain4_recursive(make_job({I, I, I, I}, ChainMethod::recursive, 29, 2, 1, 7)), I);
    EXPECT_EQ(chain_hierarchical(make_job({I, I, I, I}, ChainMethod::hierarchical, 29, 1, 1, 3)), I);
}

TEST(ChainRecursiveTest, ThreeMatricesFromPublishedThreshold) {
    const Field f(29);
    Rng rng(31);
    for (int t = 0; t < 100; ++t) {
        auto ms = random_chain(f, 3, 4, rng);
        const FqMatrix want = oracle_chain(ms);
        EXPECT_EQ(chain_direct(ms), want);
        // Six workers, the published threshold, all respond.
        EXPECT_EQ(chain3_recursive(make_job(ms, ChainMethod::recursive, 29, 2, 1, 6)), want);
    }
}

TEST(ChainRecursiveTest, AnyDecodeThresholdSurvivors) {
    const Field f(29);
    Rng rng(5);
    const auto ms = random_chain(f, 3, 4, rng);
    const FqMatrix want = oracle_chain(ms);
    const ChainJob job = make_job(ms, ChainMethod::recursive, 29, 2, 1, 8);
    std::vector<bool> mask(8, false);
    std::fill(mask.begin(), mask.begin() + 5, true);
    std::size_t subsets = 0;
    do {
        std::vector<std::size_t> alive;
        for (std::size_t i = 0; i < 8; ++i)
            if (mask[i]) alive.push_back(i);
        EXPECT_EQ(chain_run(job, nullptr, alive), want);
        ++subsets;
    } while (std::prev_permutation(mask.begin(), mask.end()));
    EXPECT_EQ(subsets, 56u);
    EXPECT_EQ(code_of([&] { chain_run(job, nullptr, {0, 1, 2, 3}); }), Errc::InsufficientOutputs);
}

TEST(ChainRecursiveTest, FourMatricesRandomized) {
    Rng rng(8);
    for (const auto& [q, m, s_r, s_c] : std::vector<std::tuple<std::uint64_t, std::size_t, std::size_t, std::size_t>>{
             {17, 4, 1, 1}, {17, 4, 2, 1}, {17, 4, 1, 2}, {59, 4, 2, 2}, {19, 6, 3, 1}}) {
        const Field f(q);
        const std::size_t n = chain_decode_threshold(4, s_r, s_c, ChainMethod::recursive);
        for (int t = 0; t < 20; ++t) {
            auto ms = random_chain(f, 4, m, rng);
            EXPECT_EQ(chain4_recursive(make_job(ms, ChainMethod::recursive, q, s_r, s_c, n)), oracle_chain(ms));
        }
    }
    const Field f(17);
    auto ms = random_chain(f, 4, 4, rng);
    const ChainJob job = make_job(ms, ChainMethod::recursive, 17, 2, 1, 7);
    EXPECT_EQ(code_of([&] { chain_run(job, nullptr, {0, 1, 2, 3, 4, 5}); }), Errc::InsufficientOutputs);
}

TEST(ChainRecursiveTest, ThreeMatricesWiderSplits) {
    Rng rng(12);
    for (const auto& [q, m, s_r, s_c] : std::vector<std::tuple<std::uint64_t, std::size_t, std::size_t, std::size_t>>{
             {29, 4, 2, 2}, {11, 8, 2, 1}, {131, 8, 2, 4}}) {
        const Field f(q);
        const std::size_t n = chain_decode_threshold(3, s_r, s_c, ChainMethod::recursive);
        for (int t = 0; t < 10; ++t) {
            auto ms = random_chain(f, 3, m, rng);
            EXPECT_EQ(chain3_recursive(make_job(ms, ChainMethod::recursive, q, s_r, s_c, n)), oracle_chain(ms));
        }
    }
}

TEST(ChainRecursiveTest, ExhaustiveFirstPairAtUnitSplit) {
    const Field f(5);
    Rng rng(3);
    for (int t = 0; t < 2; ++t) {
        const FqMatrix C = FqMatrix::random(f, 2, 2, rng), D = FqMatrix::random(f, 2, 2, rng);
        std::size_t mismatches = 0;
        scmm::testing::for_all_pairs(f, 2, 2, 2, 2, [&](const FqMatrix& A, const FqMatrix& B) {
            const std::vector<FqMatrix> ms{A, B, C, D};
            mismatches += chain4_recursive(make_job(ms, ChainMethod::recursive, 5, 1, 1, 1)) != oracle_chain(ms);
        });
        EXPECT_EQ(mismatches, 0u);
    }
}

TEST(ChainRecursiveTest, CountersMatchClosedForms) {
    Rng rng(21);
    for (const auto& [N_c, q, m, s_r, s_c] :
         std::vector<std::tuple<std::size_t, std::uint64_t, std::size_t, std::size_t, std::size_t>>{
             {3, 29, 4, 2, 1}, {3, 31, 4, 2, 2}, {3, 11, 8, 2, 1}, {4, 17, 4, 1, 1}, {4, 17, 4, 2, 1}, {4, 61, 4, 2, 2}}) {
        const Field f(q);
        const std::size_t N = chain_decode_threshold(N_c, s_r, s_c, ChainMethod::recursive) + 1;
        RoleOps ops;
        chain_run(make_job(random_chain(f, N_c, m, rng), ChainMethod::recursive, q, s_r, s_c, N), &ops);
        const RoleOps want = chain_closed_forms(N_c, m, s_r, s_c, N);
        EXPECT_EQ(ops.master, want.master) << N_c << ' ' << s_r << ' ' << s_c;
        EXPECT_EQ(ops.worker, want.worker);
        EXPECT_EQ(ops.receiver, want.receiver);
    }
}

TEST(ChainRecursiveTest, CountersMatchPublishedPerWorkerTerms) {
    // Per-worker master and worker terms of the three- and four-matrix propositions.
    for (std::size_t s_r : {2u, 4u})
        for (std::size_t s_c : {1u, 2u}) {
            const std::size_t m = 16;
            const RoleOps r3 = chain_closed_forms(3, m, s_r, s_c, 1);
            EXPECT_EQ(r3.master, m * m * m / (2 * s_r * s_c * s_c) + m * m * m / (s_r * s_r * s_c) +
                                     m * m * m / (4 * s_r * s_r * s_r) + 2 * m * m / (s_r * s_c) + 2 * m * m / (s_c * s_c));
            EXPECT_EQ(r3.worker, 2 * m * m * m / (s_r * s_c * s_c) + 4 * m * m / (s_c * s_c));
            const RoleOps r4 = chain_closed_forms(4, m, s_r, s_c, 1);
            EXPECT_EQ(r4.master, 3 * m * m * m / (s_r * s_c * s_c) + 5 * m * m / (2 * s_r * s_c) + 2 * m * m / (s_c * s_c));
            EXPECT_EQ(r4.worker, m * m * m / (s_r * s_c * s_c) + 2 * m * m / (s_c * s_c));
        }
}

TEST(ChainRecursiveTest, SharesNeverCarryTheTwoMatrixProduct) {
    const Field f(17);
    Rng rng(44);
    for (int t = 0; t < 20; ++t) {
        auto ms = random_chain(f, 4, 4, rng);
        const ChainJob job = make_job(ms, ChainMethod::recursive, 17, 1, 1, 3);
        const FqMatrix AB = mat_tmul(ms[0], ms[1]);
        for (const auto& s : chain_encode(job)) {
            for (const FqMatrix& p : s.polys) EXPECT_NE(p, AB);
            EXPECT_NE(chain_worker(s, 4).value, AB);
        }
    }
}

TEST(ChainHierarchicalTest, FourMatricesMatchDirect) {
    const Field f(17);
    Rng rng(2);
    for (Family fam : {Family::StPolyDotGen, Family::PolyDot, Family::MatDot}) {
        for (int t = 0; t < 20; ++t) {
            auto ms = random_chain(f, 4, 4, rng);
            EXPECT_EQ(chain_hierarchical(make_job(ms, ChainMethod::hierarchical, 17, 1, 1, 1, fam)), oracle_chain(ms));
        }
    }
    for (int t = 0; t < 5; ++t) {
        auto ms = random_chain(f, 8, 4, rng);
        EXPECT_EQ(chain_hierarchical(make_job(ms, ChainMethod::hierarchical, 17, 2, 2, 12)), oracle_chain(ms));
    }
}

TEST(ChainHierarchicalTest, TwoMatricesReduceToPolyCodes) {
    const Field f(17);
    Rng rng(6);
    auto ms = random_chain(f, 2, 8, rng);
    ChainJob job = make_job(ms, ChainMethod::hierarchical, 17, 2, 2, 12);
    RoleOps ops;
    const FqMatrix got = chain_hierarchical(job, &ops);
    CodeSpec spec = job.spec;
    spec.m_A = spec.m = spec.m_B = 8;
    OpCount master = 0, worker = 0, receiver = 0;
    std::vector<WorkerOutput> outs;
    for (const auto& s : master_encode(spec, ms[0], ms[1], &master)) outs.push_back(worker_compute(s, spec.family, &worker));
    EXPECT_EQ(got, receiver_decode(outs, spec, &receiver));
    EXPECT_EQ(got, naive_tmul(ms[0], ms[1]));
    EXPECT_EQ(ops.master, master);
    EXPECT_EQ(ops.worker, worker);
    EXPECT_EQ(ops.receiver, receiver);
}

TEST(ChainHierarchicalTest, AnySurvivorSubsetEveryRound) {
    const Field f(17);
    Rng rng(17);
    auto ms = random_chain(f, 4, 4, rng);
    const ChainJob job = make_job(ms, ChainMethod::hierarchical, 17, 2, 1, 5);
    const FqMatrix want = oracle_chain(ms);
    std::vector<bool> mask(5, false);
    std::fill(mask.begin(), mask.begin() + 3, true);
    do {
        std::vector<std::size_t> alive;
        for (std::size_t i = 0; i < 5; ++i)
            if (mask[i]) alive.push_back(i);
        EXPECT_EQ(chain_run(job, nullptr, alive), want);
    } while (std::prev_permutation(mask.begin(), mask.end()));
    EXPECT_EQ(code_of([&] { chain_run(job, nullptr, {4, 0}); }), Errc::InsufficientOutputs);
}

TEST(ChainValidationTest, Errors) {
    const Field f(29);
    Rng rng(1);
    EXPECT_EQ(code_of([&] { chain_run(make_job(random_chain(f, 3, 6, rng), ChainMethod::recursive, 29, 2, 1, 6)); }),
              Errc::DivisibilityViolation);
    EXPECT_EQ(code_of([&] { chain_run(make_job(random_chain(f, 3, 6, rng), ChainMethod::recursive, 29, 3, 1, 12)); }),
              Errc::SpecViolation);
    EXPECT_EQ(code_of([&] { chain_run(make_job(random_chain(f, 5, 4, rng), ChainMethod::recursive, 29, 1, 1, 3)); }),
              Errc::SpecViolation);
    EXPECT_EQ(code_of([&] { chain_run(make_job(random_chain(f, 3, 4, rng), ChainMethod::hierarchical, 29, 1, 1, 3)); }),
              Errc::SpecViolation);
    EXPECT_EQ(code_of([&] { chain_run(make_job(random_chain(f, 4, 4, rng), ChainMethod::recursive, 29, 2, 1, 6)); }),
              Errc::SpecViolation);
    auto ms = random_chain(f, 3, 4, rng);
    ms[2] = FqMatrix::random(f, 4, 2, rng);
    EXPECT_EQ(code_of([&] { chain_run(make_job(ms, ChainMethod::recursive, 29, 2, 1, 6)); }), Errc::SpecViolation);
    EXPECT_EQ(code_of([] { parse_chain_method("sideways"); }), Errc::UnknownScheme);
}

TEST(ChainShareTest, JsonRoundTrip) {
    const Field f(29);
    Rng rng(9);
    const ChainJob job = make_job(random_chain(f, 3, 4, rng), ChainMethod::recursive, 29, 2, 1, 6);
    for (const auto& s : chain_encode(job)) {
        const ShareBundle back = chain_share_from_json(chain_share_to_json(s, 29, 3), 29, 3);
        EXPECT_EQ(back.worker, s.worker);
        EXPECT_EQ(back.x, s.x);
        EXPECT_EQ(back.polys, s.polys);
        std::size_t size = 0;
        for (const auto& p : s.polys) size += p.size();
        EXPECT_EQ(size, chain_share_size(3, 4, 2, 1));
    }
    const std::string text = chain_share_to_json(chain_encode(job)[0], 29, 3);
    EXPECT_EQ(code_of([&] { chain_share_from_json(text, 29, 4); }), Errc::MalformedBundle);
    EXPECT_EQ(code_of([&] { chain_share_from_json("{\"version\":1}", 29, 3); }), Errc::MalformedBundle);
}
