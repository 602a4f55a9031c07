#include "scmm/secure_codes.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <numeric>
#include <sstream>

namespace scmm {

std::size_t padded_rows(const SecureSpec& spec) {
    return spec.base.s_r + spec.ell;
}

std::size_t padded_cols(const SecureSpec& spec) {
    return spec.base.s_c + spec.ell;
}

std::size_t secure_threshold(const SecureSpec& spec) {
    const std::size_t r = padded_rows(spec), c = padded_cols(spec), l = spec.ell;
    return c * (c * (2 * r - 1) - 2 * l * r) - l;
}

std::size_t secure_decode_threshold(const SecureSpec& spec) {
    const std::size_t r = padded_rows(spec), c = padded_cols(spec);
    if (spec.ell == 0) return c * c * (2 * r - 1);
    return c * (c * (2 * r - 1) - spec.base.s_r);
}

Rational secure_rate(const SecureSpec& spec) {
    if (spec.ell == 0) throw Error(Errc::SpecViolation, "the secure rate formula needs ell >= 1");
    std::uint64_t num = secure_threshold(spec), den = secure_decode_threshold(spec);
    const std::uint64_t g = std::gcd(num, den);
    return {num / g, den / g};
}

namespace {

void check_family(const SecureSpec& spec) {
    if (spec.ell > 0 && spec.base.family != Family::PolyDot && spec.base.family != Family::StPolyDotGen)
        throw Error(Errc::SpecViolation, "pads are supported for PolyDot and StPolyDotGen shares");
}

void check_field_points(const SecureSpec& spec) {
    const CodeSpec& b = spec.base;
    if (b.s_r == 0 || b.s_c == 0 || b.m_A % b.s_r || b.m % b.s_c)
        throw Error(Errc::SpecViolation, "s_r must divide m_A and s_c must divide m");
    if (b.eval_points.empty() && b.q <= b.N) throw Error(Errc::SpecViolation, "q must exceed N to host N distinct nonzero points");
}

/// Data blocks followed by pad blocks, with their exponents.
struct PaddedLayout {
    std::vector<FqMatrix> a_blocks, b_blocks;
    std::vector<std::size_t> a_exps, b_exps;
};

PaddedLayout padded_layout(const SecureSpec& spec, const FqMatrix& A, const FqMatrix& B,
                           const std::vector<FqMatrix>& KA, const std::vector<FqMatrix>& KB) {
    const CodeSpec& s = spec.base;
    PaddedLayout L;
    const BlockGrid ga = split_blocks(A, s.s_r, s.s_c), gb = split_blocks(B, s.s_r, s.s_c);
    for (std::size_t j = 0; j < s.s_r; ++j)
        for (std::size_t k = 0; k < s.s_c; ++k) {
            L.a_blocks.push_back(ga.at(j, k));
            L.b_blocks.push_back(gb.at(j, k));
            L.a_exps.push_back(secure_a_exponent(j, k, spec, false));
            L.b_exps.push_back(secure_b_exponent(j, k, spec, false));
        }
    for (std::size_t j = 0; j < spec.ell; ++j)
        for (std::size_t k = 0; k < spec.ell; ++k) {
            L.a_blocks.push_back(KA[j * spec.ell + k]);
            L.b_blocks.push_back(KB[j * spec.ell + k]);
            L.a_exps.push_back(secure_a_exponent(j, k, spec, true));
            L.b_exps.push_back(secure_b_exponent(j, k, spec, true));
        }
    return L;
}

void check_inputs(const SecureSpec& spec, const FqMatrix& A, const FqMatrix& B) {
    const CodeSpec& s = spec.base;
    if (A.field().q() != s.q || B.field().q() != s.q) throw Error(Errc::FieldMismatch, "inputs not over F_q of the spec");
    if (A.rows() != s.m_A || A.cols() != s.m || B.rows() != s.m_A || B.cols() != s.m)
        throw Error(Errc::ShapeMismatch, "A and B must be m_A x m");
}

} // namespace

void validate_secure(const SecureSpec& spec) {
    check_family(spec);
    if (spec.ell == 0) {
        validate(spec.base);
        return;
    }
    validate(spec.base);
    if (spec.base.N < secure_decode_threshold(spec)) throw Error(Errc::SpecViolation, "N is below the secure decoding threshold");
}

std::size_t secure_a_exponent(std::size_t j, std::size_t k, const SecureSpec& spec, bool pad) {
    const std::size_t r = padded_rows(spec), c = padded_cols(spec);
    return pad ? polydot_a_exponent(j + spec.base.s_r, k + spec.base.s_c, r, c) : polydot_a_exponent(j, k, r, c);
}

std::size_t secure_b_exponent(std::size_t j, std::size_t k, const SecureSpec& spec, bool pad) {
    const std::size_t r = padded_rows(spec), c = padded_cols(spec);
    return pad ? polydot_b_exponent(j + spec.base.s_r, k + spec.base.s_c, r, c) : polydot_b_exponent(j, k, r, c);
}

std::pair<std::vector<FqMatrix>, std::vector<FqMatrix>> secure_pads(const SecureSpec& spec) {
    const CodeSpec& s = spec.base;
    const Field f(s.q);
    const std::size_t h = s.m_A / s.s_r, w = s.m / s.s_c, n = spec.ell * spec.ell;
    Rng rng(spec.key_seed);
    std::vector<FqMatrix> KA, KB;
    for (std::size_t i = 0; i < n; ++i) KA.push_back(spec.zero_pads ? FqMatrix(f, h, w) : FqMatrix::random(f, h, w, rng));
    for (std::size_t i = 0; i < n; ++i) KB.push_back(spec.zero_pads ? FqMatrix(f, h, w) : FqMatrix::random(f, h, w, rng));
    return {std::move(KA), std::move(KB)};
}

std::vector<ShareBundle> secure_encode(const SecureSpec& spec, const FqMatrix& A, const FqMatrix& B, OpCount* ops) {
    if (spec.ell == 0) {
        check_family(spec);
        return master_encode(spec.base, A, B, ops);
    }
    validate_secure(spec);
    check_inputs(spec, A, B);
    const auto [KA, KB] = secure_pads(spec);
    const PaddedLayout L = padded_layout(spec, A, B, KA, KB);
    const auto xs = evaluation_points(spec.base);
    std::vector<ShareBundle> out;
    for (std::size_t i = 0; i < spec.base.N; ++i) {
        const FqMatrix At = evaluate_blocks(L.a_blocks, L.a_exps, xs[i], ops);
        const FqMatrix Bt = evaluate_blocks(L.b_blocks, L.b_exps, xs[i], ops);
        out.push_back(assemble_share(spec.base.family, i, xs[i], At, Bt, ops));
    }
    return out;
}

FqMatrix secure_decode(const std::vector<WorkerOutput>& outputs, const SecureSpec& spec, OpCount* ops) {
    if (spec.ell == 0) {
        check_family(spec);
        return receiver_decode(outputs, spec.base, ops);
    }
    validate_secure(spec);
    const CodeSpec& s = spec.base;
    const std::size_t n = secure_decode_threshold(spec);
    if (outputs.size() < n) throw Error(Errc::InsufficientOutputs, "fewer outputs than the secure decoding threshold");
    const std::size_t w = s.m / s.s_c;
    const Field f(s.q);
    for (std::size_t i = 0; i < n; ++i) {
        if (outputs[i].value.rows() != w || outputs[i].value.cols() != w)
            throw Error(Errc::MalformedBundle, "worker output has the wrong shape");
        if (outputs[i].value.field() != f) throw Error(Errc::FieldMismatch, "worker output over another field");
    }
    std::vector<std::size_t> targets;
    for (std::size_t k = 0; k < s.s_c; ++k)
        for (std::size_t kp = 0; kp < s.s_c; ++kp)
            targets.push_back(polydot_target_exponent(k, kp, padded_rows(spec), padded_cols(spec)));
    const auto coeffs = interpolate_coefficients(outputs, n, targets);
    FqMatrix D(f, s.m, s.m);
    for (std::size_t k = 0; k < s.s_c; ++k)
        for (std::size_t kp = 0; kp < s.s_c; ++kp) D.set_block(k * w, kp * w, coeffs[k * s.s_c + kp]);
    if (ops) *ops += n * w * w + n * n * n;
    return D;
}

bool LeakageReport::all_zero() const {
    return std::all_of(sets.begin(), sets.end(), [](const CollusionLeak& c) { return c.mi_bits_is_zero; });
}

double LeakageReport::max_bits() const {
    double m = 0;
    for (const auto& c : sets) m = std::max(m, c.mi_bits);
    return m;
}

LeakageReport leakage_audit(const SecureSpec& spec, std::size_t set_size, std::uint64_t budget,
                            const std::vector<std::pair<FqMatrix, FqMatrix>>& sources) {
    check_family(spec);
    check_field_points(spec);
    const CodeSpec& s = spec.base;
    const Field f(s.q);
    const std::size_t N = s.N;
    if (set_size == 0 || set_size > N) throw Error(Errc::OutOfRange, "collusion set size must be in [1, N]");
    const std::size_t h = s.m_A / s.s_r, w = s.m / s.s_c;
    const std::size_t pad_entries = 2 * spec.ell * spec.ell * h * w;
    const std::size_t src_entries = sources.empty() ? 2 * s.m_A * s.m : 0;

    // Outcome count, checked against the budget before any enumeration.
    std::uint64_t source_total = sources.empty() ? 1 : sources.size(), pad_total = 1;
    for (std::size_t i = 0; i < src_entries; ++i) {
        source_total *= s.q;
        if (source_total > budget) throw Error(Errc::ScaleExceeded, "audit enumeration exceeds the budget");
    }
    for (std::size_t i = 0; i < pad_entries; ++i) {
        pad_total *= s.q;
        if (pad_total > budget) throw Error(Errc::ScaleExceeded, "audit enumeration exceeds the budget");
    }
    const std::uint64_t T = source_total * pad_total;
    if (T > budget) throw Error(Errc::ScaleExceeded, "audit enumeration exceeds the budget");

    std::vector<std::vector<std::size_t>> sets;
    std::vector<bool> mask(N, false);
    std::fill(mask.begin(), mask.begin() + set_size, true);
    do {
        std::vector<std::size_t> L;
        for (std::size_t i = 0; i < N; ++i)
            if (mask[i]) L.push_back(i);
        sets.push_back(L);
    } while (std::prev_permutation(mask.begin(), mask.end()));

    using Key = std::vector<residue>;
    std::vector<std::map<std::pair<Key, Key>, std::uint64_t>> joint(sets.size());
    std::vector<std::map<Key, std::uint64_t>> share_counts(sets.size());
    std::map<Key, std::uint64_t> source_counts;
    const auto xs = evaluation_points(s);

    auto digits = [&](std::uint64_t code, std::size_t n) {
        std::vector<residue> d(n);
        for (std::size_t i = 0; i < n; ++i) {
            d[i] = code % s.q;
            code /= s.q;
        }
        return d;
    };
    auto block_list = [&](const std::vector<residue>& d, std::size_t offset) {
        std::vector<FqMatrix> out;
        for (std::size_t b = 0; b < spec.ell * spec.ell; ++b)
            out.emplace_back(f, h, w, std::vector<residue>(d.begin() + offset + b * h * w, d.begin() + offset + (b + 1) * h * w));
        return out;
    };

    for (std::uint64_t si = 0; si < source_total; ++si) {
        FqMatrix A(f, s.m_A, s.m), B(f, s.m_A, s.m);
        if (sources.empty()) {
            const auto d = digits(si, src_entries);
            A = FqMatrix(f, s.m_A, s.m, Key(d.begin(), d.begin() + s.m_A * s.m));
            B = FqMatrix(f, s.m_A, s.m, Key(d.begin() + s.m_A * s.m, d.end()));
        } else {
            A = sources[si].first;
            B = sources[si].second;
            check_inputs(spec, A, B);
        }
        Key ab = A.entries();
        ab.insert(ab.end(), B.entries().begin(), B.entries().end());
        source_counts[ab] += pad_total;
        for (std::uint64_t pi = 0; pi < pad_total; ++pi) {
            const auto d = digits(pi, pad_entries);
            const std::size_t half = pad_entries / 2;
            const PaddedLayout lay = padded_layout(spec, A, B, block_list(d, 0), block_list(d, half));
            std::vector<Key> per_worker(N);
            for (std::size_t i = 0; i < N; ++i) {
                per_worker[i] = evaluate_blocks(lay.a_blocks, lay.a_exps, xs[i]).entries();
                const auto bt = evaluate_blocks(lay.b_blocks, lay.b_exps, xs[i]).entries();
                per_worker[i].insert(per_worker[i].end(), bt.begin(), bt.end());
            }
            for (std::size_t li = 0; li < sets.size(); ++li) {
                Key key;
                for (std::size_t i : sets[li]) key.insert(key.end(), per_worker[i].begin(), per_worker[i].end());
                ++share_counts[li][key];
                ++joint[li][{ab, key}];
            }
        }
    }

    LeakageReport rep{spec.ell, set_size, s.q, s.m_A, s.m, T, {}};
    for (std::size_t li = 0; li < sets.size(); ++li) {
        CollusionLeak leak{sets[li], 0.0, true, 0.0};
        for (const auto& [cell, c] : joint[li]) {
            const std::uint64_t ca = source_counts.at(cell.first), cs = share_counts[li].at(cell.second);
            const unsigned __int128 lhs = static_cast<unsigned __int128>(c) * T;
            const unsigned __int128 rhs = static_cast<unsigned __int128>(ca) * cs;
            if (lhs != rhs) leak.mi_bits_is_zero = false;
            leak.mi_bits_numerator += static_cast<double>(c) *
                                      std::log2(static_cast<double>(c) * static_cast<double>(T) /
                                                (static_cast<double>(ca) * static_cast<double>(cs)));
        }
        if (leak.mi_bits_is_zero) leak.mi_bits_numerator = 0;
        leak.mi_bits = leak.mi_bits_numerator / static_cast<double>(T);
        rep.sets.push_back(std::move(leak));
    }
    return rep;
}

std::string leakage_csv_header() {
    return "ell,set,q,m_A,m,mi_bits_numerator,mi_bits_is_zero";
}

std::vector<std::string> leakage_csv_rows(const LeakageReport& r) {
    std::vector<std::string> rows;
    for (const auto& c : r.sets) {
        std::ostringstream os;
        os << std::setprecision(12) << r.ell << ',';
        for (std::size_t i = 0; i < c.workers.size(); ++i) os << (i ? ";" : "") << c.workers[i];
        os << ',' << r.q << ',' << r.m_A << ',' << r.m << ',' << c.mi_bits_numerator << ','
           << (c.mi_bits_is_zero ? "true" : "false");
        rows.push_back(os.str());
    }
    return rows;
}

} // namespace scmm
