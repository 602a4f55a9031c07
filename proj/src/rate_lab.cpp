#include "scmm/rate_lab.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>

#include "scmm/source_maps.hpp"

namespace scmm {

double binary_entropy(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw Error(Errc::OutOfRange, "probability outside [0, 1]");
    return entropy_bits({p, 1.0 - p});
}

double entropy_bits(const std::vector<double>& pmf) {
    double h = 0;
    for (double x : pmf)
        if (x > 0) h -= x * std::log2(x);
    return h;
}

std::uint64_t SourceModel::support_size() const {
    std::uint64_t n = 1;
    for (const auto& f : factors) {
        std::uint64_t k = 0;
        for (const auto& o : f.outcomes) k += o.second > 0;
        if (k && n > UINT64_MAX / k) return UINT64_MAX;
        n *= k;
    }
    return n;
}

double SourceModel::total_mass() const {
    double t = 1;
    for (const auto& f : factors) {
        double s = 0;
        for (const auto& o : f.outcomes) s += o.second;
        t *= s;
    }
    return t;
}

namespace {

SourceFactor dsbs_factor(std::size_t x, std::size_t y, double p) {
    const double same = (1 - p) / 2, diff = p / 2;
    return {{x, y}, {{{0, 0}, same}, {{0, 1}, diff}, {{1, 0}, diff}, {{1, 1}, same}}};
}

} // namespace

SourceModel asym_cross_dsbs(double p, std::size_t m) {
    if (!(p >= 0 && p <= 1)) throw Error(Errc::OutOfRange, "p outside [0, 1]");
    SourceModel s{"AsymCrossDSBS", 2, m, 1, 1, {}};
    for (std::size_t i = 0; i < m; ++i) s.factors.push_back(dsbs_factor(s.a_index((i + m / 2) % m, 0), s.b_index(i, 0), p));
    return s;
}

SourceModel elementwise_dsbs(double p, std::size_t m, std::size_t l) {
    if (!(p >= 0 && p <= 1)) throw Error(Errc::OutOfRange, "p outside [0, 1]");
    SourceModel s{"ElementwiseDSBS", 2, m, l, l, {}};
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < l; ++j) s.factors.push_back(dsbs_factor(s.a_index(i, j), s.b_index(i, j), p));
    return s;
}

SourceModel example2_pmf(double eps, double p, std::size_t m) {
    if (!(eps >= 0 && eps <= 0.5) || !(p >= 0 && p <= 1)) throw Error(Errc::OutOfRange, "epsilon or p out of range");
    SourceModel s{"Example2PMF", 3, m, 2, 2, {}};
    const double h = 0.5 - eps;
    // Rows index a_i1, columns index b_i1.
    const double table[3][3] = {{h * (1 - p), h * p, 0}, {2 * eps * p, 0, 2 * eps * (1 - p)}, {0, h * (1 - p), h * p}};
    for (std::size_t i = 0; i < m; ++i) {
        SourceFactor f{{s.a_index(i, 0), s.a_index(i, 1), s.b_index(i, 0), s.b_index(i, 1)}, {}};
        for (residue a1 = 0; a1 < 3; ++a1)
            for (residue b1 = 0; b1 < 3; ++b1)
                if (table[a1][b1] > 0) f.outcomes.push_back({{a1, (3 - b1) % 3, b1, b1}, table[a1][b1]});
        s.factors.push_back(f);
    }
    return s;
}

SourceModel uniform_pair(std::uint64_t q, std::size_t m, std::size_t l) {
    SourceModel s{"Uniform", q, m, l, l, {}};
    for (std::size_t v = 0; v < 2 * m * l; ++v) {
        SourceFactor f{{v}, {}};
        for (residue x = 0; x < q; ++x) f.outcomes.push_back({{x}, 1.0 / static_cast<double>(q)});
        s.factors.push_back(f);
    }
    return s;
}

SourceModel explicit_table(std::uint64_t q, std::size_t m, std::size_t la, std::size_t lb,
                           std::vector<std::pair<std::vector<residue>, double>> outcomes) {
    SourceModel s{"ExplicitTable", q, m, la, lb, {}};
    SourceFactor f;
    for (std::size_t v = 0; v < m * (la + lb); ++v) f.vars.push_back(v);
    double total = 0;
    for (const auto& o : outcomes) {
        if (o.first.size() != f.vars.size()) throw Error(Errc::ShapeMismatch, "outcome length differs from entry count");
        for (residue x : o.first)
            if (x >= q) throw Error(Errc::OutOfRange, "outcome entry not reduced mod q");
        total += o.second;
    }
    if (std::abs(total - 1.0) > 1e-12) throw Error(Errc::OutOfRange, "table probabilities do not sum to 1");
    f.outcomes = std::move(outcomes);
    s.factors.push_back(std::move(f));
    return s;
}

Pmf pushforward(const SourceModel& model, const Functional& fn, std::uint64_t max_outcomes) {
    if (model.support_size() > max_outcomes) throw Error(Errc::ScaleExceeded, "source support exceeds enumeration budget");
    const Field f(model.q);
    const std::size_t na = model.m * model.la;
    std::vector<residue> values(model.m * (model.la + model.lb), 0);
    Pmf pmf;
    std::function<void(std::size_t, double)> rec = [&](std::size_t k, double prob) {
        if (k == model.factors.size()) {
            FqMatrix A(f, model.m, model.la, std::vector<residue>(values.begin(), values.begin() + na));
            FqMatrix B(f, model.m, model.lb, std::vector<residue>(values.begin() + na, values.end()));
            pmf[fn(A, B)] += prob;
            return;
        }
        const SourceFactor& fac = model.factors[k];
        for (const auto& [vals, pr] : fac.outcomes) {
            if (pr <= 0) continue;
            for (std::size_t i = 0; i < fac.vars.size(); ++i) values[fac.vars[i]] = vals[i];
            rec(k + 1, prob * pr);
        }
    };
    rec(0, 1.0);
    return pmf;
}

std::pair<FqMatrix, FqMatrix> sample_source(const SourceModel& model, Rng& rng) {
    const Field f(model.q);
    const std::size_t na = model.m * model.la;
    std::vector<residue> values(model.m * (model.la + model.lb), 0);
    for (const SourceFactor& fac : model.factors) {
        double u = rng.uniform();
        std::size_t pick = fac.outcomes.size() - 1;
        for (std::size_t k = 0; k < fac.outcomes.size(); ++k) {
            if (u < fac.outcomes[k].second) {
                pick = k;
                break;
            }
            u -= fac.outcomes[k].second;
        }
        while (fac.outcomes[pick].second <= 0) --pick;
        for (std::size_t i = 0; i < fac.vars.size(); ++i) values[fac.vars[i]] = fac.outcomes[pick].first[i];
    }
    return {FqMatrix(f, model.m, model.la, std::vector<residue>(values.begin(), values.begin() + na)),
            FqMatrix(f, model.m, model.lb, std::vector<residue>(values.begin() + na, values.end()))};
}

namespace {

double pmf_entropy(const Pmf& pmf) {
    double h = 0;
    for (const auto& kv : pmf)
        if (kv.second > 0) h -= kv.second * std::log2(kv.second);
    return h;
}

Functional concat(const Functional& f, const Functional& g) {
    return [f, g](const FqMatrix& A, const FqMatrix& B) {
        auto x = f(A, B);
        auto y = g(A, B);
        x.push_back(UINT64_MAX);  // separator keeps the tuple boundary unambiguous
        x.insert(x.end(), y.begin(), y.end());
        return x;
    };
}

} // namespace

double entropy_exact(const SourceModel& model, const Functional& f, std::uint64_t max_outcomes) {
    return pmf_entropy(pushforward(model, f, max_outcomes));
}

double conditional_entropy(const SourceModel& model, const Functional& f, const Functional& g,
                           std::uint64_t max_outcomes) {
    return entropy_exact(model, concat(f, g), max_outcomes) - entropy_exact(model, g, max_outcomes);
}

std::vector<std::uint64_t> flatten(std::initializer_list<const FqMatrix*> parts) {
    std::vector<std::uint64_t> out;
    for (const FqMatrix* p : parts) out.insert(out.end(), p->entries().begin(), p->entries().end());
    return out;
}

Functional fn_identity() {
    return [](const FqMatrix& A, const FqMatrix& B) { return flatten({&A, &B}); };
}

Functional fn_a() {
    return [](const FqMatrix& A, const FqMatrix&) { return flatten({&A}); };
}

Functional fn_b() {
    return [](const FqMatrix&, const FqMatrix& B) { return flatten({&B}); };
}

Functional fn_product() {
    return [](const FqMatrix& A, const FqMatrix& B) {
        const FqMatrix D = mat_tmul(A, B);
        return flatten({&D});
    };
}

Functional fn_dot_uvw() {
    return [](const FqMatrix& A, const FqMatrix& B) {
        const DotMessages d = dot_messages(A, B);
        auto v = flatten({&d.U, &d.V});
        v.push_back(d.W);
        return v;
    };
}

Functional fn_sym_uv() {
    return [](const FqMatrix& A, const FqMatrix& B) {
        auto [A1, A2] = split_rows_a(A);
        auto [B1, B2] = split_rows_b(B);
        const FqMatrix U = mat_add(A2, B1), V = mat_add(A1, B2);
        return flatten({&U, &V});
    };
}

Functional fn_embed() {
    return [](const FqMatrix& A, const FqMatrix& B) {
        const EmbedMessages e = embed_dot_messages(A, B);
        auto v = e.sums;
        v.push_back(e.aux);
        return v;
    };
}

RatePoint closed_form_rates(const std::string& scheme, const RateParams& prm) {
    RatePoint r;
    r.scheme = scheme;
    r.m = prm.m;
    r.l = prm.l;
    r.q = prm.q;
    r.p = prm.p;
    const double m = static_cast<double>(prm.m), l = static_cast<double>(prm.l);
    const double h = binary_entropy(prm.p);
    const double h2 = binary_entropy(2 * prm.p * (1 - prm.p));
    if (scheme == "cor1") {
        r.R_SW = m * (1 + h);
        r.R_KM = 2 * m * h + 2 * (1 - std::pow(1 - prm.p, m));
        r.R_HK = 2 * m * h;
        r.eta = *r.R_SW / *r.R_KM;
        r.sum_rate = *r.R_KM;
    } else if (scheme == "cor2") {
        r.R_SW = m * (1 + h);
        r.R_KM = m * (1 + h2) + 2;
        r.R_HK = 2 * m * h;
        r.eta = *r.R_SW / *r.R_KM;
        if (h > 0) r.gamma = multiplicative_gap(GapKind::dot, prm.m, 1, prm.p);
        r.sum_rate = *r.R_KM;
    } else if (scheme == "example2") {
        const double e = prm.epsilon;
        r.q = 3;
        r.epsilon = e;
        r.R_SW = m * (binary_entropy(2 * e) + (1 - 2 * e) + h);
        const double x = 2 * (0.5 - e) * (1 - prm.p) + 2 * e * (1 - prm.p);
        const double y = 2 * (0.5 - e) * prm.p + 2 * e * prm.p;
        r.R_KM = 2 * m * entropy_bits({x, y, std::max(0.0, 1 - x - y)}) + 2 * std::log2(3.0);
        r.eta = *r.R_SW / *r.R_KM;
        r.sum_rate = *r.R_KM;
    } else if (scheme == "ah_dsbs") {
        r.R_SW = m * l * (1 + h);
        r.R_AH = m * l * (1 + h2);
        r.R_HK = 2 * m * l * h;
        r.eta = *r.R_SW / *r.R_AH;
        if (h > 0) r.gamma = multiplicative_gap(GapKind::square, prm.m, prm.l, prm.p);
        r.sum_rate = *r.R_AH;
    } else if (scheme == "hk_dsbs") {
        r.R_HK = 2 * m * l * h;
        r.R1 = r.R2 = m * l * h;
        r.sum_rate = *r.R_HK;
    } else {
        throw Error(Errc::UnknownScheme, "unknown rate scheme '" + scheme + "'");
    }
    return r;
}

RatePoint converse_bounds(const SourceModel& model, ConverseRegime regime) {
    RatePoint r;
    r.m = model.m;
    r.l = model.la;
    r.q = model.q;
    switch (regime) {
    case ConverseRegime::HK:
        r.scheme = "converse_hk";
        r.R1 = conditional_entropy(model, fn_a(), fn_b());
        r.R2 = conditional_entropy(model, fn_b(), fn_a());
        r.R_HK = *r.R1 + *r.R2;
        r.sum_rate = *r.R_HK;
        break;
    case ConverseRegime::trivial:
        r.scheme = "converse_trivial";
        r.sum_rate = entropy_exact(model, fn_product());
        break;
    case ConverseRegime::strong_qinf:
        return strong_converse(model.m, model.la);
    }
    return r;
}

RatePoint strong_converse(std::size_t m, std::size_t l) {
    RatePoint r;
    r.scheme = "converse_strong_qinf";
    r.m = m;
    r.l = l;
    r.q = 0;
    const double bound = static_cast<double>(lemma4_conditional_limit(m, l));
    r.R1 = r.R2 = bound;
    r.sum_rate = 2 * bound;
    return r;
}

std::uint64_t lemma4_limit(std::size_t m, std::size_t l) {
    const std::uint64_t k = std::min(m, l);
    return 2 * l * k - k * k;
}

std::uint64_t lemma4_conditional_limit(std::size_t m, std::size_t l) {
    return std::min<std::uint64_t>(l * l, l * m);
}

double lemma4_enumerated(std::uint64_t q, std::size_t m, std::size_t l) {
    return entropy_exact(uniform_pair(q, m, l), fn_product()) / std::log2(static_cast<double>(q));
}

double multiplicative_gap(GapKind kind, std::size_t m, std::size_t l, double p) {
    const double h = binary_entropy(p);
    if (h <= 0) throw Error(Errc::DegenerateDenominator, "h(p) = 0");
    const double md = static_cast<double>(m), ld = static_cast<double>(l);
    switch (kind) {
    case GapKind::symmetric:
        if (md - ld + 1 <= 0) throw Error(Errc::DegenerateDenominator, "m - l + 1 <= 0");
        return std::max(2 * md * h, ld + 1) / (2 * (md - ld + 1) * h);
    case GapKind::square:
        return (1 + binary_entropy(2 * p * (1 - p))) / (2 * h);
    case GapKind::dot:
        return std::max(md * h, 1.0) / (md * h);
    case GapKind::outer:
        return 1 / h;
    }
    return 0;
}

SchemeCost scheme_cost_tables(RecursiveScheme scheme, std::size_t m, std::size_t l) {
    if (m % 2) throw Error(Errc::DivisibilityViolation, "recursive schemes need even m");
    switch (scheme) {
    case RecursiveScheme::recursive:
        return {(m + 1) * (l * l + l) / 2, m * (l * l + l) / 4};
    case RecursiveScheme::recursive_sym:
        return {m * l * (1 + l) / 2 + l, m * l * (2 * l - 1) / 2};
    case RecursiveScheme::nested:
        if (m % 4) throw Error(Errc::DivisibilityViolation, "nested scheme needs 4 | m");
        return {m * l * (l + 3) / 4 + l * (l + 1) / 2, m * l * (7 * l - 3) / 8};
    }
    return {0, 0};
}

EtaCondition eta_condition_check(const SourceModel& model) {
    const Functional d = fn_product();
    const Functional uv = fn_sym_uv();
    const double h_d = entropy_exact(model, d);
    const double h_uv_given_d = conditional_entropy(model, uv, d);
    const double h_a_given = conditional_entropy(model, fn_a(), concat(uv, d));
    const double lhs = h_d + h_uv_given_d;
    // Entropies come from floating sums; differences below 1e-12 are ties.
    return {lhs < h_a_given - 1e-12, lhs, h_a_given};
}

double km_dot_rate_enumerated(const SourceModel& model) {
    return 2 * entropy_exact(model, fn_dot_uvw());
}

double ah_rate_enumerated(const SourceModel& model) {
    const Functional a1b2 = [](const FqMatrix& A, const FqMatrix& B) {
        const FqMatrix A1 = split_rows_a(A).first, B2 = split_rows_b(B).second;
        return flatten({&A1, &B2});
    };
    const Functional u = [](const FqMatrix& A, const FqMatrix& B) {
        const CrossMessages c = cross_messages(A, B);
        return flatten({&c.Ucross});
    };
    const Functional w = [](const FqMatrix& A, const FqMatrix& B) {
        const CrossMessages c = cross_messages(A, B);
        return flatten({&c.Wcross});
    };
    const double h_side = entropy_exact(model, a1b2);
    const double h_u = conditional_entropy(model, u, a1b2);
    const double h_w = conditional_entropy(model, w, concat(a1b2, u));
    return h_side + 2 * std::max(h_u, h_w);
}

double sv_rate_enumerated(const SourceModel& model) {
    return 2 * entropy_exact(model, fn_embed());
}

namespace {

RatePoint gap_point(const std::string& scheme, GapKind kind, const RateParams& prm) {
    RatePoint r;
    r.scheme = scheme;
    r.m = prm.m;
    r.l = prm.l;
    r.q = 2;
    r.p = prm.p;
    r.gamma = multiplicative_gap(kind, prm.m, prm.l, prm.p);
    const double h = binary_entropy(prm.p);
    const double ml = static_cast<double>(kind == GapKind::outer ? prm.l : prm.m * prm.l);
    r.R_HK = 2 * ml * h;
    r.sum_rate = *r.gamma * *r.R_HK;
    return r;
}

} // namespace

std::vector<RatePoint> rate_sweep(const std::string& scheme, const RateParams& base, const std::vector<double>& ps) {
    std::vector<RatePoint> out;
    for (double p : ps) {
        RateParams prm = base;
        prm.p = p;
        if (scheme == "gap_symmetric")
            out.push_back(gap_point(scheme, GapKind::symmetric, prm));
        else if (scheme == "gap_square")
            out.push_back(gap_point(scheme, GapKind::square, prm));
        else if (scheme == "gap_dot")
            out.push_back(gap_point(scheme, GapKind::dot, prm));
        else if (scheme == "gap_outer")
            out.push_back(gap_point(scheme, GapKind::outer, prm));
        else
            out.push_back(closed_form_rates(scheme, prm));
    }
    return out;
}

std::string rate_csv_header() {
    return "scheme,m,l,q,p,epsilon,R_SW,R_KM,R_SV,R_AH,R_HK,eta,gamma";
}

std::string rate_csv_row(const RatePoint& r) {
    std::ostringstream os;
    os << std::setprecision(12);
    auto opt = [&](const std::optional<double>& v) {
        os << ',';
        if (v) os << *v;
    };
    os << r.scheme << ',' << r.m << ',' << r.l << ',' << r.q << ',' << r.p;
    opt(r.epsilon);
    opt(r.R_SW);
    opt(r.R_KM);
    opt(r.R_SV);
    opt(r.R_AH);
    opt(r.R_HK);
    opt(r.eta);
    opt(r.gamma);
    return os.str();
}

} // namespace scmm
