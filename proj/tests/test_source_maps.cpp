#include <gtest/gtest.h>

#include "scmm/oracles.hpp"
#include "scmm/source_maps.hpp"
#include "support.hpp"

using namespace scmm;
using scmm::testing::for_all_pairs;
using scmm::testing::naive_tmul;

namespace {

FqMatrix vec(const Field& f, std::vector<residue> v) {
    return FqMatrix::column(f, v);
}

} // namespace

TEST(DotMessagesTest, ZeroInputs) {
    Field f(2);
    DotMessages d = dot_messages(FqMatrix(f, 2, 1), FqMatrix(f, 2, 1));
    EXPECT_TRUE(d.U.is_zero());
    EXPECT_TRUE(d.V.is_zero());
    EXPECT_EQ(d.W, 0u);
    EXPECT_EQ(dot_decode(d), 0u);
}

TEST(DotMessagesTest, HandEvaluatedBinary) {
    Field f(2);
    DotMessages d = dot_messages(vec(f, {1, 0}), vec(f, {0, 1}));
    EXPECT_EQ(d.U, vec(f, {0}));
    EXPECT_EQ(d.V, vec(f, {0}));
    EXPECT_EQ(d.W, 0u);
}

TEST(DotMessagesTest, OddLengthSplit) {
    Field f(5);
    const FqMatrix A = vec(f, {1, 2, 3}), B = vec(f, {4, 0, 1});
    auto [A1, A2] = split_rows_a(A);
    auto [B1, B2] = split_rows_b(B);
    EXPECT_EQ(A1, vec(f, {1, 0}));
    EXPECT_EQ(A2, vec(f, {2, 3}));
    EXPECT_EQ(B1, vec(f, {4, 0}));
    EXPECT_EQ(B2, vec(f, {0, 1}));
    DotMessages d = dot_messages(A, B);
    EXPECT_EQ(d.U, vec(f, {1, 3}));
    EXPECT_EQ(d.V, vec(f, {1, 1}));
    EXPECT_EQ(d.W, (2 * 1 + 3 * 0 + 4 * 0 + 0 * 1) % 5u);
    EXPECT_EQ(dot_decode(d), (1 * 4 + 2 * 0 + 3 * 1) % 5u);
}

TEST(DotMessagesTest, ExhaustiveBinaryPairs) {
    Field f(2);
    int n = 0;
    for_all_pairs(f, 2, 1, 2, 1, [&](const FqMatrix& A, const FqMatrix& B) {
        EXPECT_EQ(dot_decode(dot_messages(A, B)), naive_tmul(A, B)(0, 0));
        ++n;
    });
    EXPECT_EQ(n, 16);
}

TEST(DotMessagesTest, RandomLengthSix) {
    Field f(7);
    Rng rng(11);
    for (int t = 0; t < 1000; ++t) {
        FqMatrix A = FqMatrix::random(f, 6, 1, rng), B = FqMatrix::random(f, 6, 1, rng);
        ASSERT_EQ(dot_decode(dot_messages(A, B)), naive_tmul(A, B)(0, 0));
    }
}

TEST(DotMessagesTest, ComponentsAreSplitSums) {
    // U and V are entrywise sums of one function of A and one of B.
    Field f(7);
    Rng rng(12);
    FqMatrix A = FqMatrix::random(f, 6, 1, rng), B = FqMatrix::random(f, 6, 1, rng);
    FqMatrix Z(f, 6, 1);
    DotMessages ab = dot_messages(A, B), a0 = dot_messages(A, Z), b0 = dot_messages(Z, B);
    EXPECT_EQ(ab.U, mat_add(a0.U, b0.U));
    EXPECT_EQ(ab.V, mat_add(a0.V, b0.V));
    EXPECT_EQ(ab.W, f.add(a0.W, b0.W));
}

TEST(EmbedDotTest, SingleBinaryEntry) {
    EXPECT_EQ(embed_modulus(1, 2), 3u);
    EXPECT_EQ(embed_dot_decode({2}, 2, 1, 2), 1u);
    EXPECT_EQ(embed_dot_decode({0}, 0, 1, 2), 0u);
    EXPECT_EQ(embed_dot_decode({0, 0, 0}, 0, 3, 5), 0u);
}

TEST(EmbedDotTest, ExhaustiveTernaryLengthTwo) {
    Field f(3);
    int n = 0;
    for_all_pairs(f, 2, 1, 2, 1, [&](const FqMatrix& A, const FqMatrix& B) {
        EmbedMessages e = embed_dot_messages(A, B);
        EXPECT_EQ(embed_dot_decode(e.sums, e.aux, 2, 3), naive_tmul(A, B)(0, 0));
        ++n;
    });
    EXPECT_EQ(n, 81);
}

TEST(EmbedDotTest, CorruptedMessages) {
    try {
        embed_dot_decode({0, 0}, 1, 2, 3);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::NoConsistentK);
    }
    EXPECT_THROW(embed_dot_decode({5}, 0, 1, 3), Error);
    EXPECT_THROW(embed_dot_decode({1, 1}, 1, 2, 2), Error);
}

TEST(MatvecTest, ZeroAndExhaustiveBinary) {
    Field f(2);
    EXPECT_TRUE(matvec_decode(matvec_messages(FqMatrix(f, 2, 2), FqMatrix(f, 2, 1))).is_zero());
    int n = 0;
    for_all_pairs(f, 2, 2, 2, 1, [&](const FqMatrix& A, const FqMatrix& b) {
        EXPECT_EQ(matvec_decode(matvec_messages(A, b)), naive_tmul(A, b));
        ++n;
    });
    EXPECT_EQ(n, 64);
}

TEST(MatvecTest, RandomF5) {
    Field f(5);
    Rng rng(13);
    for (int t = 0; t < 200; ++t) {
        FqMatrix A = FqMatrix::random(f, 4, 3, rng), b = FqMatrix::random(f, 4, 1, rng);
        ASSERT_EQ(matvec_decode(matvec_messages(A, b)), naive_tmul(A, b));
    }
}

TEST(SymmetricTest, EqualSources) {
    Field f(7);
    Rng rng(14);
    FqMatrix A = FqMatrix::random(f, 4, 3, rng);
    for (auto v : {MatrixVariant::Prop5, MatrixVariant::Thm1})
        EXPECT_EQ(symmetric_decode(symmetric_messages(A, A, v)), naive_tmul(A, A));
}

TEST(SymmetricTest, SampledSymmetricProducts) {
    Field f(5);
    Rng rng(15);
    for (int t = 0; t < 300; ++t) {
        FqMatrix A = FqMatrix::random(f, 2, 2, rng);
        FqMatrix B = sample_symmetric_partner(A, rng);
        const FqMatrix D = naive_tmul(A, B);
        ASSERT_EQ(D, D.transpose());
        for (auto v : {MatrixVariant::Prop5, MatrixVariant::Thm1})
            ASSERT_EQ(symmetric_decode(symmetric_messages(A, B, v)), D);
    }
}

TEST(SymmetricTest, ExhaustiveScalarProducts) {
    Field f(3);
    for_all_pairs(f, 2, 1, 2, 1, [&](const FqMatrix& A, const FqMatrix& B) {
        EXPECT_EQ(symmetric_decode(symmetric_messages(A, B, MatrixVariant::Prop5)), naive_tmul(A, B));
        EXPECT_EQ(symmetric_decode(symmetric_messages(A, B, MatrixVariant::Thm1)), naive_tmul(A, B));
    });
}

TEST(SymmetricTest, EvenFieldRejected) {
    Field f(2);
    try {
        symmetric_decode(symmetric_messages(FqMatrix(f, 2, 1), FqMatrix(f, 2, 1), MatrixVariant::Prop5));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::EvenFieldDivision);
    }
}

TEST(SymmetricTest, DebugFlagsAsymmetry) {
    Field f(7);
    FqMatrix A(f, 2, 2, {1, 0, 0, 0}), B(f, 2, 2, {0, 1, 0, 0});
    try {
        symmetric_decode(symmetric_messages(A, B, MatrixVariant::Prop5), true);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::AsymmetryDetected);
    }
}

TEST(SquareEmbedTest, ZeroAndSamples) {
    Field f(3);
    EXPECT_TRUE(square_embed_decode(square_embed_messages(FqMatrix(f, 2, 2), FqMatrix(f, 2, 2))).is_zero());
    Rng rng(16);
    for (int t = 0; t < 500; ++t) {
        FqMatrix A = FqMatrix::random(f, 2, 2, rng), B = FqMatrix::random(f, 2, 2, rng);
        const SquareEmbedMessages msg = square_embed_messages(A, B);
        const FqMatrix D = naive_tmul(A, B);
        ASSERT_EQ(square_embed_decode(msg), D);
        for (std::size_t j = 0; j < 2; ++j) {
            FqMatrix Mj = mat_sub(mat_tmul(msg.sums[j], msg.sums[j]), mat_add(msg.AtA, msg.BtB[j]));
            for (std::size_t i = 0; i < 2; ++i)
                for (std::size_t i2 = 0; i2 < 2; ++i2) EXPECT_EQ(Mj(i, i2), f.add(D(i, j), D(i2, j)));
        }
    }
}

TEST(SquareEmbedTest, DetectsTampering) {
    Field f(7);
    Rng rng(17);
    FqMatrix A = FqMatrix::random(f, 3, 2, rng), B = FqMatrix::random(f, 3, 2, rng);
    SquareEmbedMessages msg = square_embed_messages(A, B);
    msg.AtA(0, 1) = f.add(msg.AtA(0, 1), 1);
    try {
        square_embed_decode(msg);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::InconsistentOffDiagonals);
    }
}

TEST(SquareAhTest, ZeroAndExhaustiveBinary) {
    Field f(2);
    FqMatrix Z(f, 1, 2);
    EXPECT_TRUE(square_ah_decode(Z, Z, Z, FqMatrix(f, 2, 2)).is_zero());
    int n = 0;
    for_all_pairs(f, 2, 2, 2, 2, [&](const FqMatrix& A, const FqMatrix& B) {
        const CrossMessages c = cross_messages(A, B);
        EXPECT_EQ(square_ah_decode(c.A1, c.B2, c.Ucross, c.Wcross), naive_tmul(A, B));
        ++n;
    });
    EXPECT_EQ(n, 256);
}

TEST(SquareAhTest, RandomF7) {
    Field f(7);
    Rng rng(18);
    for (int t = 0; t < 200; ++t) {
        FqMatrix A = FqMatrix::random(f, 6, 3, rng), B = FqMatrix::random(f, 6, 3, rng);
        const CrossMessages c = cross_messages(A, B);
        ASSERT_EQ(square_ah_decode(c.A1, c.B2, c.Ucross, c.Wcross), naive_tmul(A, B));
    }
}

TEST(RecursiveTest, EqualSourcesAllVariants) {
    Field f(5);
    Rng rng(19);
    FqMatrix A = FqMatrix::random(f, 8, 3, rng);
    for (auto v : {RecursiveVariant::recursive, RecursiveVariant::recursive_sym, RecursiveVariant::nested})
        EXPECT_EQ(recursive_decode(recursive_messages(A, A, v)), naive_tmul(A, A));
}

TEST(RecursiveTest, ExhaustiveBinary) {
    Field f(2);
    for_all_pairs(f, 2, 2, 2, 2, [&](const FqMatrix& A, const FqMatrix& B) {
        EXPECT_EQ(recursive_decode(recursive_messages(A, B, RecursiveVariant::recursive)), naive_tmul(A, B));
    });
}

TEST(RecursiveTest, NestedSymmetricSamples) {
    Field f(5);
    Rng rng(20);
    for (int t = 0; t < 300; ++t) {
        FqMatrix A = FqMatrix::random(f, 8, 2, rng);
        FqMatrix B = sample_symmetric_partner(A, rng);
        ASSERT_EQ(recursive_decode(recursive_messages(A, B, RecursiveVariant::nested)), naive_tmul(A, B));
        ASSERT_EQ(recursive_decode(recursive_messages(A, B, RecursiveVariant::recursive_sym)), naive_tmul(A, B));
    }
}

TEST(RecursiveTest, LowerTriangleRelations) {
    Field f(7);
    Rng rng(21);
    FqMatrix A = FqMatrix::random(f, 4, 3, rng), B = FqMatrix::random(f, 4, 3, rng);
    const RecursiveMessages msgs = recursive_messages(A, B, RecursiveVariant::recursive);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < i; ++j) {
            // Direct definition: U_ij = A_{2i} + B_{1j}.
            const FqMatrix Uij = mat_add(A.slice(2, 4, i, i + 1), B.slice(0, 2, j, j + 1));
            const auto& ii = msgs.pairs.at({i, i});
            const auto& jj = msgs.pairs.at({j, j});
            const auto& ji = msgs.pairs.at({j, i});
            EXPECT_EQ(Uij, mat_sub(mat_add(*ii.U, *jj.U), *ji.U));
        }
}

TEST(RecursiveTest, Preconditions) {
    Field f5(5), f2(2);
    try {
        recursive_messages(FqMatrix(f5, 6, 2), FqMatrix(f5, 6, 2), RecursiveVariant::nested);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::DivisibilityViolation);
    }
    try {
        recursive_messages(FqMatrix(f5, 3, 2), FqMatrix(f5, 3, 2), RecursiveVariant::recursive);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::DivisibilityViolation);
    }
    try {
        recursive_messages(FqMatrix(f2, 4, 2), FqMatrix(f2, 4, 2), RecursiveVariant::nested);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::EvenFieldDivision);
    }
}

TEST(OracleSuiteTest, ReducedGridHasNoMismatches) {
    SourceOracleGrid grid;
    grid.max_m = 4;
    grid.max_l = 2;
    grid.exhaustive_limit = 1 << 12;
    grid.random_trials = 100;
    const auto tallies = source_maps_oracles(grid, 7);
    EXPECT_FALSE(tallies.empty());
    for (const auto& t : tallies) {
        EXPECT_EQ(t.mismatches, 0u) << t.scheme << " q=" << t.q << " m=" << t.m << " l=" << t.l;
        EXPECT_GT(t.checks, 0u);
    }
}
