#include "scmm/km_code.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "scmm/rng.hpp"
#include "scmm/source_maps.hpp"

namespace scmm {

namespace {

void check_budget(std::uint64_t q, std::size_t n) {
    std::uint64_t space = 1;
    for (std::size_t i = 0; i < n; ++i) {
        space *= q;
        if (space > km_enumeration_budget) throw Error(Errc::ScaleExceeded, "q^n exceeds the ML enumeration budget");
    }
}

residue draw(const std::vector<double>& pmf, Rng& rng) {
    double u = rng.uniform();
    for (std::size_t s = 0; s < pmf.size(); ++s) {
        if (u < pmf[s]) return s;
        u -= pmf[s];
    }
    std::size_t s = pmf.size() - 1;
    while (s > 0 && pmf[s] <= 0) --s;
    return s;
}

std::vector<residue> add_vec(const Field& f, const std::vector<residue>& x, const std::vector<residue>& y) {
    std::vector<residue> z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = f.add(x[i], y[i]);
    return z;
}

} // namespace

ParityMatrix make_parity_matrix(const Field& f, std::size_t kappa, std::size_t n, std::uint64_t seed) {
    if (kappa > n || n == 0) throw Error(Errc::OutOfRange, "need 0 <= kappa <= n and n >= 1");
    for (std::uint64_t attempt = 0;; ++attempt) {
        Rng rng(derive_seed(seed, attempt));
        FqMatrix C = FqMatrix::random(f, kappa, n, rng);
        if (kappa == 0 || rank(C) == kappa) return {std::move(C), seed, kappa, n};
    }
}

std::vector<residue> km_encode(const ParityMatrix& C, const std::vector<residue>& x) {
    if (x.size() != C.n) throw Error(Errc::LengthMismatch, "sequence length differs from n");
    if (C.kappa == 0) return {};
    return mat_mul(C.C, FqMatrix::column(C.C.field(), x)).entries();
}

std::vector<residue> km_decode_ml(const ParityMatrix& C, const std::vector<residue>& syndrome,
                                  const std::vector<double>& prior) {
    const Field& f = C.C.field();
    const std::uint64_t q = f.q();
    check_budget(q, C.n);
    if (syndrome.size() != C.kappa) throw Error(Errc::LengthMismatch, "syndrome length differs from kappa");
    if (prior.size() != q) throw Error(Errc::LengthMismatch, "prior must have q entries");

    std::vector<residue> z(C.n, 0);
    FqMatrix K = FqMatrix::identity(f, C.n);
    if (C.kappa > 0) {
        const auto z0 = solve_any(C.C, FqMatrix::column(f, syndrome));
        if (!z0) throw Error(Errc::NoSolution, "syndrome is not in the column space of C");
        z = z0->entries();
        K = null_space(C.C);
    }
    const std::size_t d = K.cols();

    std::vector<double> logp(q);
    for (std::size_t s = 0; s < q; ++s)
        logp[s] = prior[s] > 0 ? std::log(prior[s]) : -std::numeric_limits<double>::infinity();
    // Scores depend only on symbol counts, so equal-count candidates tie exactly.
    auto score = [&](const std::vector<residue>& v) {
        std::vector<std::size_t> counts(q, 0);
        for (residue x : v) ++counts[x];
        double s = 0;
        for (std::size_t k = 0; k < q; ++k)
            if (counts[k]) s += static_cast<double>(counts[k]) * logp[k];
        return s;
    };

    std::vector<residue> best = z;
    double best_score = score(z);
    std::vector<residue> digits(d, 0);
    while (true) {
        std::size_t pos = 0;
        for (; pos < d; ++pos) {
            for (std::size_t i = 0; i < C.n; ++i) z[i] = f.add(z[i], K(i, pos));
            if (++digits[pos] < q) break;
            digits[pos] = 0;
        }
        if (pos == d) break;
        const double s = score(z);
        if (s > best_score || (s == best_score && z < best)) {
            best = z;
            best_score = s;
        }
    }
    return best;
}

KmSource dsbs_source(double p) {
    if (!(p >= 0 && p <= 1)) throw Error(Errc::OutOfRange, "p outside [0, 1]");
    return {2, {1 - p, p}, p};
}

KmSource custom_source(std::vector<double> z_pmf, double p) {
    if (!is_prime(z_pmf.size())) throw Error(Errc::NotPrime, "Z alphabet size must be prime");
    double total = 0;
    for (double x : z_pmf) {
        if (x < 0) throw Error(Errc::OutOfRange, "negative probability");
        total += x;
    }
    if (std::abs(total - 1) > 1e-12) throw Error(Errc::OutOfRange, "Z probabilities do not sum to 1");
    const std::uint64_t q = z_pmf.size();
    return {q, std::move(z_pmf), p};
}

std::vector<KmTrialReport> km_simulate(const KmSource& source, std::size_t n, const std::vector<std::size_t>& kappas,
                                       std::size_t trials, std::uint64_t seed) {
    const Field f(source.q);
    check_budget(source.q, n);
    for (std::size_t k : kappas)
        if (k > n) throw Error(Errc::OutOfRange, "kappa exceeds n");
    std::vector<std::size_t> errors(kappas.size(), 0);
    for (std::size_t t = 0; t < trials; ++t) {
        const std::uint64_t trial_seed = derive_seed(seed, t);
        Rng rng(trial_seed);
        std::vector<residue> x1(n), z(n), x2(n);
        for (std::size_t i = 0; i < n; ++i) {
            x1[i] = rng.below(source.q);
            z[i] = draw(source.z_pmf, rng);
            x2[i] = f.sub(z[i], x1[i]);
        }
        for (std::size_t k = 0; k < kappas.size(); ++k) {
            const ParityMatrix C = make_parity_matrix(f, kappas[k], n, derive_seed(trial_seed, 1 + kappas[k]));
            const auto zhat = km_decode_ml(C, add_vec(f, km_encode(C, x1), km_encode(C, x2)), source.z_pmf);
            errors[k] += zhat != z;
        }
    }
    const double hz = entropy_bits(source.z_pmf) / std::log2(static_cast<double>(source.q));
    std::vector<KmTrialReport> out;
    for (std::size_t k = 0; k < kappas.size(); ++k) {
        const double err = trials ? static_cast<double>(errors[k]) / static_cast<double>(trials) : 0.0;
        out.push_back({n, kappas[k], source.q, source.p, trials, err,
                       static_cast<double>(kappas[k]) / static_cast<double>(n) - hz, seed});
    }
    return out;
}

std::string km_csv_header() {
    return "n,kappa,q,p,trials,empirical_error,rate_margin,seed";
}

std::string km_csv_row(const KmTrialReport& r) {
    std::ostringstream os;
    os << std::setprecision(12) << r.n << ',' << r.kappa << ',' << r.q << ',' << r.p << ',' << r.trials << ','
       << r.empirical_error << ',' << r.rate_margin << ',' << r.seed;
    return os.str();
}

namespace {

/// Source-side component sequences for one realization.
std::vector<residue> side_one(const FqMatrix& A) {
    auto [A1, A2] = split_rows_a(A);
    std::vector<residue> x = A2.entries();
    x.insert(x.end(), A1.entries().begin(), A1.entries().end());
    x.push_back(mat_tmul(A2, A1)(0, 0));
    return x;
}

std::vector<residue> side_two(const FqMatrix& B) {
    auto [B1, B2] = split_rows_b(B);
    std::vector<residue> x = B1.entries();
    x.insert(x.end(), B2.entries().begin(), B2.entries().end());
    x.push_back(mat_tmul(B1, B2)(0, 0));
    return x;
}

} // namespace

KmPipelineResult km_pipeline_dot(const SourceModel& model, std::size_t n, std::vector<std::size_t> kappas,
                                 std::uint64_t seed, double margin) {
    if (model.q != 2) throw Error(Errc::OutOfRange, "the dot-product pipeline is binary");
    if (model.la != 1 || model.lb != 1) throw Error(Errc::ShapeMismatch, "dot product needs column vectors");
    if (model.m > 4) throw Error(Errc::OutOfRange, "the dot-product pipeline supports m <= 4");
    check_budget(2, n);
    const Field f(2);

    const Pmf zlaw = pushforward(model, [](const FqMatrix& A, const FqMatrix& B) {
        const Field& g = A.field();
        return add_vec(g, side_one(A), side_two(B));
    });
    const std::size_t comps = zlaw.begin()->first.size();
    std::vector<std::vector<double>> priors(comps, std::vector<double>(2, 0.0));
    for (const auto& [z, pr] : zlaw)
        for (std::size_t j = 0; j < comps; ++j) priors[j][z[j]] += pr;
    if (kappas.empty())
        for (std::size_t j = 0; j < comps; ++j) {
            const double want = std::ceil(static_cast<double>(n) * (entropy_bits(priors[j]) + margin) - 1e-9);
            kappas.push_back(std::min<std::size_t>(n, static_cast<std::size_t>(std::max(0.0, want))));
        }
    if (kappas.size() != comps) throw Error(Errc::LengthMismatch, "one kappa per message component is required");

    Rng rng(derive_seed(seed, 0));
    std::vector<FqMatrix> As, Bs;
    std::vector<std::vector<residue>> x1(comps, std::vector<residue>(n)), x2(comps, std::vector<residue>(n));
    for (std::size_t r = 0; r < n; ++r) {
        auto [A, B] = sample_source(model, rng);
        const auto s1 = side_one(A), s2 = side_two(B);
        for (std::size_t j = 0; j < comps; ++j) {
            x1[j][r] = s1[j];
            x2[j][r] = s2[j];
        }
        As.push_back(std::move(A));
        Bs.push_back(std::move(B));
    }

    std::vector<std::vector<residue>> zhat(comps);
    for (std::size_t j = 0; j < comps; ++j) {
        const ParityMatrix C = make_parity_matrix(f, kappas[j], n, derive_seed(seed, 1 + j));
        zhat[j] = km_decode_ml(C, add_vec(f, km_encode(C, x1[j]), km_encode(C, x2[j])), priors[j]);
    }

    KmPipelineResult out{{}, {}, kappas, false};
    const std::size_t half = (comps - 1) / 2;
    for (std::size_t r = 0; r < n; ++r) {
        std::vector<residue> u(half), v(half);
        for (std::size_t j = 0; j < half; ++j) {
            u[j] = zhat[j][r];
            v[j] = zhat[half + j][r];
        }
        const residue d = dot_decode({FqMatrix::column(f, u), FqMatrix::column(f, v), zhat[comps - 1][r]});
        const residue truth = mat_tmul(As[r], Bs[r])(0, 0);
        out.decoded.push_back(d);
        out.truth.push_back(truth);
        out.block_error = out.block_error || d != truth;
    }
    return out;
}

} // namespace scmm
