#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "scmm/field.hpp"

namespace scmm::testing {

/// Schoolbook X^T Y over the integers, reduced mod q at the end.
inline FqMatrix naive_tmul(const FqMatrix& X, const FqMatrix& Y) {
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

inline FqMatrix naive_mul(const FqMatrix& X, const FqMatrix& Y) {
    return naive_tmul(X.transpose(), Y);
}

/// Matrix whose entries are the base-q digits of code.
inline FqMatrix from_code(const Field& f, std::size_t rows, std::size_t cols, std::uint64_t code) {
    FqMatrix M(f, rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) {
            M(i, j) = code % f.q();
            code /= f.q();
        }
    return M;
}

inline std::uint64_t ipow(std::uint64_t b, std::uint64_t e) {
    std::uint64_t r = 1;
    while (e--) r *= b;
    return r;
}

/// Calls fn on every pair (A, B) of the given shapes over f.
inline void for_all_pairs(const Field& f, std::size_t ra, std::size_t ca, std::size_t rb, std::size_t cb,
                          const std::function<void(const FqMatrix&, const FqMatrix&)>& fn) {
    const std::uint64_t na = ipow(f.q(), ra * ca), nb = ipow(f.q(), rb * cb);
    for (std::uint64_t a = 0; a < na; ++a) {
        const FqMatrix A = from_code(f, ra, ca, a);
        for (std::uint64_t b = 0; b < nb; ++b) fn(A, from_code(f, rb, cb, b));
    }
}

} // namespace scmm::testing
