#include "scmm/oracles.hpp"

#include <functional>

#include "scmm/source_maps.hpp"

namespace scmm {

FqMatrix direct_tmul(const FqMatrix& X, const FqMatrix& Y) {
    const std::uint64_t q = X.field().q();
    FqMatrix Z(X.field(), X.cols(), Y.cols());
    for (std::size_t i = 0; i < X.cols(); ++i)
        for (std::size_t j = 0; j < Y.cols(); ++j) {
            unsigned __int128 acc = 0;
            for (std::size_t k = 0; k < X.rows(); ++k) acc += static_cast<unsigned __int128>(X(k, i)) * Y(k, j);
            Z(i, j) = static_cast<std::uint64_t>(acc % q);
        }
    return Z;
}

FqMatrix sample_symmetric_partner(const FqMatrix& A, Rng& rng) {
    const Field& f = A.field();
    const std::size_t m = A.rows(), l = A.cols();
    const std::size_t eqs = l * (l - 1) / 2;
    if (eqs == 0) return FqMatrix::random(f, m, l, rng);
    // Row (i, j) of L encodes (A^T B)_ij - (A^T B)_ji on vec(B), index k * l + c.
    FqMatrix L(f, eqs, m * l);
    std::size_t row = 0;
    for (std::size_t i = 0; i < l; ++i)
        for (std::size_t j = i + 1; j < l; ++j, ++row)
            for (std::size_t k = 0; k < m; ++k) {
                L(row, k * l + j) = f.add(L(row, k * l + j), A(k, i));
                L(row, k * l + i) = f.sub(L(row, k * l + i), A(k, j));
            }
    const FqMatrix K = null_space(L);
    const FqMatrix v = mat_mul(K, FqMatrix::random(f, K.cols(), 1, rng));
    return FqMatrix(f, m, l, v.entries());
}

namespace {

struct Scheme {
    const char* name;
    bool needs_odd_q;
    bool needs_symmetric;
    bool vector_only;   // dot products: l is fixed to 1
    bool b_is_vector;   // matrix-vector: B is m x 1
    std::size_t m_divisor;
    std::function<bool(const FqMatrix&, const FqMatrix&)> check;
};

bool is_symmetric(const FqMatrix& D) {
    return D == D.transpose();
}

std::vector<Scheme> schemes() {
    std::vector<Scheme> s;
    s.push_back({"dot", false, false, true, false, 1, [](const FqMatrix& A, const FqMatrix& B) {
                     return dot_decode(dot_messages(A, B)) == direct_tmul(A, B)(0, 0);
                 }});
    s.push_back({"embed_dot", false, false, true, false, 1, [](const FqMatrix& A, const FqMatrix& B) {
                     const EmbedMessages e = embed_dot_messages(A, B);
                     return embed_dot_decode(e.sums, e.aux, A.rows(), A.field().q()) == direct_tmul(A, B)(0, 0);
                 }});
    s.push_back({"matvec", false, false, false, true, 1, [](const FqMatrix& A, const FqMatrix& b) {
                     return matvec_decode(matvec_messages(A, b)) == direct_tmul(A, b);
                 }});
    s.push_back({"sym_prop5", true, true, false, false, 1, [](const FqMatrix& A, const FqMatrix& B) {
                     return symmetric_decode(symmetric_messages(A, B, MatrixVariant::Prop5)) == direct_tmul(A, B);
                 }});
    s.push_back({"sym_thm1", true, true, false, false, 1, [](const FqMatrix& A, const FqMatrix& B) {
                     return symmetric_decode(symmetric_messages(A, B, MatrixVariant::Thm1)) == direct_tmul(A, B);
                 }});
    s.push_back({"square_embed", true, false, false, false, 1, [](const FqMatrix& A, const FqMatrix& B) {
                     return square_embed_decode(square_embed_messages(A, B)) == direct_tmul(A, B);
                 }});
    s.push_back({"square_ah", false, false, false, false, 1, [](const FqMatrix& A, const FqMatrix& B) {
                     const CrossMessages c = cross_messages(A, B);
                     return square_ah_decode(c.A1, c.B2, c.Ucross, c.Wcross) == direct_tmul(A, B);
                 }});
    s.push_back({"recursive", false, false, false, false, 2, [](const FqMatrix& A, const FqMatrix& B) {
                     return recursive_decode(recursive_messages(A, B, RecursiveVariant::recursive)) ==
                            direct_tmul(A, B);
                 }});
    s.push_back({"recursive_sym", true, true, false, false, 2, [](const FqMatrix& A, const FqMatrix& B) {
                     return recursive_decode(recursive_messages(A, B, RecursiveVariant::recursive_sym)) ==
                            direct_tmul(A, B);
                 }});
    s.push_back({"nested", true, true, false, false, 4, [](const FqMatrix& A, const FqMatrix& B) {
                     return recursive_decode(recursive_messages(A, B, RecursiveVariant::nested)) ==
                            direct_tmul(A, B);
                 }});
    return s;
}

/// q^n, saturating at limit + 1.
std::uint64_t capped_pow(std::uint64_t q, std::size_t n, std::uint64_t limit) {
    std::uint64_t r = 1;
    for (std::size_t i = 0; i < n; ++i) {
        r *= q;
        if (r > limit) return limit + 1;
    }
    return r;
}

bool safe_check(const Scheme& s, const FqMatrix& A, const FqMatrix& B) {
    try {
        return s.check(A, B);
    } catch (const Error&) {
        return false;
    }
}

} // namespace

std::vector<OracleTally> source_maps_oracles(const SourceOracleGrid& grid, std::uint64_t seed) {
    std::vector<OracleTally> out;
    std::uint64_t stream = 0;
    for (const Scheme& s : schemes())
        for (std::uint64_t q : grid.qs) {
            if (s.needs_odd_q && q == 2) continue;
            const Field f(q);
            for (std::size_t m = 1; m <= grid.max_m; ++m) {
                if (m % s.m_divisor) continue;
                for (std::size_t l = 1; l <= (s.vector_only ? 1 : grid.max_l); ++l) {
                    const std::size_t bcols = s.b_is_vector ? 1 : l;
                    OracleTally t{s.name, q, m, l, false, 0, 0};
                    const std::size_t na = m * l, nb = m * bcols;
                    const std::uint64_t space = capped_pow(q, na + nb, grid.exhaustive_limit);
                    ++stream;
                    if (space <= grid.exhaustive_limit) {
                        t.exhaustive = true;
                        std::vector<residue> digits(na + nb, 0);
                        for (std::uint64_t code = 0; code < space; ++code) {
                            FqMatrix A(f, m, l, std::vector<residue>(digits.begin(), digits.begin() + na));
                            FqMatrix B(f, m, bcols, std::vector<residue>(digits.begin() + na, digits.end()));
                            if (!s.needs_symmetric || is_symmetric(direct_tmul(A, B))) {
                                ++t.checks;
                                if (!safe_check(s, A, B)) ++t.mismatches;
                            }
                            for (std::size_t d = 0; d < digits.size() && ++digits[d] == q; ++d) digits[d] = 0;
                        }
                    } else {
                        Rng rng(derive_seed(seed, stream));
                        for (std::size_t trial = 0; trial < grid.random_trials; ++trial) {
                            const FqMatrix A = FqMatrix::random(f, m, l, rng);
                            const FqMatrix B = s.needs_symmetric ? sample_symmetric_partner(A, rng)
                                                                 : FqMatrix::random(f, m, bcols, rng);
                            ++t.checks;
                            if (!safe_check(s, A, B)) ++t.mismatches;
                        }
                    }
                    out.push_back(t);
                }
            }
        }
    return out;
}

} // namespace scmm
