#include "scmm/cluster_sim.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace scmm {

StragglerModel StragglerModel::random_erasure(double prob, std::uint64_t seed) {
    StragglerModel m;
    m.kind = StragglerKind::random_erasure;
    m.prob = prob;
    m.seed = seed;
    return m;
}

StragglerModel StragglerModel::adversarial_subset(std::size_t count, std::uint64_t seed) {
    StragglerModel m;
    m.kind = StragglerKind::adversarial_subset;
    m.count = count;
    m.seed = seed;
    return m;
}

StragglerModel StragglerModel::adversarial_subset(std::vector<std::size_t> survivors) {
    StragglerModel m;
    m.kind = StragglerKind::adversarial_subset;
    m.count = survivors.size();
    m.subset = std::move(survivors);
    return m;
}

std::string straggler_kind_name(StragglerKind k) {
    switch (k) {
    case StragglerKind::none: return "none";
    case StragglerKind::random_erasure: return "random_erasure";
    case StragglerKind::adversarial_subset: return "adversarial_subset";
    }
    return "none";
}

StragglerKind parse_straggler_kind(const std::string& name) {
    for (StragglerKind k : {StragglerKind::none, StragglerKind::random_erasure, StragglerKind::adversarial_subset})
        if (straggler_kind_name(k) == name) return k;
    throw Error(Errc::UnknownScheme, "unknown straggler model: " + name);
}

std::vector<std::size_t> draw_survivors(const StragglerModel& model, std::size_t N, std::uint64_t trial) {
    std::vector<std::size_t> all(N);
    std::iota(all.begin(), all.end(), 0);
    switch (model.kind) {
    case StragglerKind::none: return all;
    case StragglerKind::random_erasure: {
        if (model.prob < 0 || model.prob > 1) throw Error(Errc::OutOfRange, "erasure probability must be in [0, 1]");
        Rng rng(derive_seed(model.seed, trial));
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < N; ++i)
            if (!rng.bernoulli(model.prob)) out.push_back(i);
        return out;
    }
    case StragglerKind::adversarial_subset: {
        if (!model.subset.empty()) {
            std::vector<std::size_t> out = model.subset;
            std::sort(out.begin(), out.end());
            if (std::adjacent_find(out.begin(), out.end()) != out.end() || out.back() >= N)
                throw Error(Errc::OutOfRange, "survivor subset must list distinct workers below N");
            return out;
        }
        if (model.count > N) throw Error(Errc::OutOfRange, "survivor count exceeds N");
        Rng rng(derive_seed(model.seed, trial));
        for (std::size_t i = N; i > 1; --i) std::swap(all[i - 1], all[rng.below(i)]);
        all.resize(model.count);
        std::sort(all.begin(), all.end());
        return all;
    }
    }
    return all;
}

namespace {

bool is_poly_family(Family f) {
    return f == Family::Poly || f == Family::StPoly;
}

std::uint64_t input_size(const CodeSpec& s) {
    return is_poly_family(s.family) ? s.m_A * (s.m + s.m_B) : 2 * s.m_A * s.m;
}

void require_divides(std::size_t d, std::size_t n, const char* what) {
    if (d == 0 || n % d) throw Error(Errc::DivisibilityViolation, what);
}

CodeSpec chain_pair_spec(const ChainJob& job) {
    if (job.matrices.empty()) throw Error(Errc::SpecViolation, "chain needs matrices");
    CodeSpec s = job.spec;
    s.m_A = s.m = s.m_B = job.matrices.front().rows();
    return s;
}

/// Entries of one worker output for the outputs the receiver consumes.
void finish_report(CostReport& c, std::size_t delivered, std::uint64_t out_size) {
    c.worker_comm = std::min<std::uint64_t>(delivered, c.recovery_threshold) * out_size;
    c.success = delivered >= c.recovery_threshold;
}

} // namespace

CostReport cost_closed_forms(const CodeSpec& s) {
    CostReport c;
    const std::uint64_t N = s.N, a = s.m_A, m = s.m;
    c.recovery_threshold = recovery_threshold(s);
    c.master_storage = input_size(s);
    std::uint64_t share = 0, out = 0;
    if (is_poly_family(s.family)) {
        const std::uint64_t mb = s.m_B;
        out = 1;
        if (s.family == Family::Poly) {
            c.master_comp = N * a * (m + mb);
            c.worker_comp = N * a;
            share = 2 * a;
        } else {
            require_divides(2, a, "2 must divide m_A for StPoly");
            c.master_comp = N * (a * (m + mb) + 2 * a + 1);
            c.worker_comp = N * (a / 2 + 1);
            share = a + 1;
        }
    } else {
        const auto [r, cc] = block_counts(s);
        require_divides(r, a, "row blocks must divide m_A");
        require_divides(cc, m, "column blocks must divide m");
        const std::uint64_t h = a / r, w = m / cc;
        out = w * w;
        switch (s.family) {
        case Family::MatDot:
        case Family::PolyDot:
            c.master_comp = N * 2 * a * m;
            c.worker_comp = N * h * w * w;
            share = 2 * h * w;
            break;
        case Family::StMatDot:
        case Family::StPolyDotSym:
            require_divides(2, h, "row blocks must have even height");
            c.master_comp = N * (2 * a * m + h * w + h * w * w + w * w);
            c.worker_comp = N * (h * w * w / 2 + w * w);
            share = h * w + w * w;
            break;
        default:
            require_divides(2, h, "row blocks must have even height");
            c.master_comp = N * (2 * a * m + h * w / 2 + h * w * w + w * w);
            c.worker_comp = N * (h * w * w + 2 * w * w);
            share = 3 * h * w / 2 + w * w;
            break;
        }
    }
    const std::uint64_t n = c.recovery_threshold;
    c.worker_storage = N * share;
    c.master_comm = c.worker_storage;
    c.worker_comm = n * out;
    c.receiver_comp = n * out + n * n * n;
    c.success = true;
    return c;
}

CostReport cost_closed_forms(const SecureSpec& spec) {
    if (spec.ell == 0) return cost_closed_forms(spec.base);
    const CodeSpec& s = spec.base;
    CostReport c = cost_closed_forms(s);
    const std::uint64_t N = s.N, l = spec.ell;
    const std::uint64_t h = s.m_A / s.s_r, w = s.m / s.s_c;
    const std::uint64_t blocks = s.s_r * s.s_c + l * l;
    const std::uint64_t extra = s.family == Family::StPolyDotGen ? h * w / 2 + h * w * w + w * w : 0;
    c.master_storage += 2 * l * l * h * w;
    c.master_comp = N * (2 * blocks * h * w + extra);
    const std::uint64_t n = secure_decode_threshold(spec);
    c.recovery_threshold = n;
    c.worker_comm = n * w * w;
    c.receiver_comp = n * w * w + n * n * n;
    return c;
}

CostReport cost_closed_forms(const ChainJob& job) {
    const CodeSpec pair = chain_pair_spec(job);
    const std::uint64_t Nc = job.matrices.size(), m = pair.m;
    CostReport c;
    if (job.method == ChainMethod::hierarchical) {
        c = cost_closed_forms(pair);
        const std::uint64_t rounds = Nc - 1;
        c.worker_storage *= rounds;
        c.master_comm *= rounds;
        c.worker_comm *= rounds;
        c.master_comp *= rounds;
        c.worker_comp *= rounds;
        c.receiver_comp *= rounds;
    } else {
        const RoleOps r = chain_closed_forms(Nc, m, pair.s_r, pair.s_c, pair.N);
        c.recovery_threshold = chain_decode_threshold(Nc, pair.s_r, pair.s_c, job.method);
        c.worker_storage = pair.N * chain_share_size(Nc, m, pair.s_r, pair.s_c);
        c.master_comm = c.worker_storage;
        c.worker_comm = c.recovery_threshold * chain_output_size(Nc, m, pair.s_c);
        c.master_comp = r.master;
        c.worker_comp = r.worker;
        c.receiver_comp = r.receiver;
        c.success = true;
    }
    c.master_storage = Nc * m * m;
    return c;
}

ExperimentResult run_experiment(const CodeSpec& spec, const FqMatrix& A, const FqMatrix& B,
                                const StragglerModel& straggler, std::uint64_t trial) {
    validate(spec);
    ExperimentResult res;
    CostReport& c = res.cost;
    const auto shares = master_encode(spec, A, B, &c.master_comp);
    std::vector<WorkerOutput> outs;
    for (const auto& b : shares) outs.push_back(worker_compute(b, spec.family, &c.worker_comp));
    res.survivors = draw_survivors(straggler, spec.N, trial);
    std::vector<WorkerOutput> got;
    for (std::size_t i : res.survivors) got.push_back(outs[i]);
    c.recovery_threshold = recovery_threshold(spec);
    c.master_storage = A.size() + B.size();
    c.worker_storage = spec.N * share_size(spec);
    c.master_comm = c.worker_storage;
    finish_report(c, got.size(), output_size(spec));
    if (c.success) res.product = receiver_decode(got, spec, &c.receiver_comp);
    return res;
}

ExperimentResult run_experiment(const SecureSpec& spec, const FqMatrix& A, const FqMatrix& B,
                                const StragglerModel& straggler, std::uint64_t trial) {
    if (spec.ell == 0) return run_experiment(spec.base, A, B, straggler, trial);
    validate_secure(spec);
    const CodeSpec& s = spec.base;
    ExperimentResult res;
    CostReport& c = res.cost;
    const auto shares = secure_encode(spec, A, B, &c.master_comp);
    std::vector<WorkerOutput> outs;
    for (const auto& b : shares) outs.push_back(worker_compute(b, s.family, &c.worker_comp));
    res.survivors = draw_survivors(straggler, s.N, trial);
    std::vector<WorkerOutput> got;
    for (std::size_t i : res.survivors) got.push_back(outs[i]);
    const std::uint64_t h = s.m_A / s.s_r, w = s.m / s.s_c;
    c.recovery_threshold = secure_decode_threshold(spec);
    c.master_storage = A.size() + B.size() + 2 * spec.ell * spec.ell * h * w;
    c.worker_storage = s.N * share_size(s);
    c.master_comm = c.worker_storage;
    finish_report(c, got.size(), w * w);
    if (c.success) res.product = secure_decode(got, spec, &c.receiver_comp);
    return res;
}

ExperimentResult run_experiment(const ChainJob& job, const StragglerModel& straggler, std::uint64_t trial) {
    validate_chain(job);
    const CodeSpec pair = chain_pair_spec(job);
    const std::size_t Nc = job.matrices.size();
    ExperimentResult res;
    CostReport& c = res.cost;
    res.survivors = draw_survivors(straggler, pair.N, trial);
    c.recovery_threshold = chain_decode_threshold(Nc, pair.s_r, pair.s_c, job.method);
    c.master_storage = 0;
    for (const auto& X : job.matrices) c.master_storage += X.size();
    if (job.method == ChainMethod::hierarchical) {
        const std::uint64_t rounds = Nc - 1;
        c.worker_storage = rounds * pair.N * share_size(pair);
        c.master_comm = c.worker_storage;
        c.success = res.survivors.size() >= c.recovery_threshold;
        RoleOps ops;
        // Stragglers only erase outputs, so master and worker work is that of a full run.
        const FqMatrix P = chain_run(job, &ops, c.success ? res.survivors : std::vector<std::size_t>{});
        c.master_comp = ops.master;
        c.worker_comp = ops.worker;
        c.worker_comm = rounds * std::min<std::uint64_t>(res.survivors.size(), c.recovery_threshold) * output_size(pair);
        if (c.success) {
            c.receiver_comp = ops.receiver;
            res.product = P;
        }
        return res;
    }
    const auto shares = chain_encode(job, &c.master_comp);
    std::vector<WorkerOutput> outs;
    for (const auto& b : shares) outs.push_back(chain_worker(b, Nc, &c.worker_comp));
    std::vector<WorkerOutput> got;
    for (std::size_t i : res.survivors) got.push_back(outs[i]);
    c.worker_storage = pair.N * chain_share_size(Nc, pair.m, pair.s_r, pair.s_c);
    c.master_comm = c.worker_storage;
    finish_report(c, got.size(), chain_output_size(Nc, pair.m, pair.s_c));
    if (c.success) res.product = chain_decode(got, job, &c.receiver_comp);
    return res;
}

GainRatios gain_ratios(std::size_t m_A, std::size_t m, std::size_t s_r, std::size_t s_c, std::size_t N) {
    const double den_s = s_c ? m_A + static_cast<double>(m) * s_r / s_c : 0;
    if (den_s == 0 || s_c == 0 || N == 0)
        throw Error(Errc::DegenerateDenominator, "storage ratio denominator is zero");
    const double chi_den = 2.0 * s_r * s_c * s_c + m;
    GainRatios g;
    g.eta_S = 2.0 * m_A / den_s;
    g.chi_bound = 1.0 + (s_c + 2.5 * m) / chi_den;
    CodeSpec s;
    s.m_A = m_A;
    s.m = s.m_B = m;
    s.s_r = s_r;
    s.s_c = s_c;
    s.N = N;
    CostReport p, t;
    try {
        s.family = Family::PolyDot;
        p = cost_closed_forms(s);
        s.family = Family::StPolyDotSym;
        t = cost_closed_forms(s);
    } catch (const Error& e) {
        if (e.code() != Errc::DivisibilityViolation) throw;
        return g;
    }
    const double st_comm = static_cast<double>(t.master_comm + t.worker_comm);
    const double pd_comp = static_cast<double>(p.master_comp + p.worker_comp);
    if (t.worker_storage == 0 || st_comm == 0 || pd_comp == 0)
        throw Error(Errc::DegenerateDenominator, "gain ratio denominator is zero");
    g.eta_S_realized = static_cast<double>(p.worker_storage) / static_cast<double>(t.worker_storage);
    g.eta_comm = static_cast<double>(p.master_comm + p.worker_comm) / st_comm;
    g.chi_comp = static_cast<double>(t.master_comp + t.worker_comp) / pd_comp;
    return g;
}

namespace {

using nlohmann::json;

[[noreturn]] void config_fail(const std::string& msg) {
    throw Error(Errc::ConfigError, msg);
}

template <class T>
T field_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        config_fail(std::string("config field '") + key + "' has the wrong type");
    }
}

template <class T>
T required(const json& j, const char* key) {
    if (!j.contains(key)) config_fail(std::string("config field '") + key + "' is missing");
    return field_or<T>(j, key, T{});
}

ChainJob chain_job(const ExperimentConfig& cfg, std::vector<FqMatrix> matrices) {
    ChainJob job;
    job.matrices = std::move(matrices);
    job.method = cfg.chain_method;
    job.spec = cfg.spec;
    return job;
}

SecureSpec secure_spec(const ExperimentConfig& cfg, std::uint64_t trial) {
    SecureSpec s;
    s.base = cfg.spec;
    s.ell = cfg.ell;
    s.key_seed = derive_seed(derive_seed(cfg.seed, trial), 1);
    return s;
}

} // namespace

ExperimentConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        config_fail(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) config_fail("config must be a JSON object");
    ExperimentConfig cfg;
    CodeSpec& s = cfg.spec;
    try {
        s.family = parse_family(required<std::string>(j, "family"));
    } catch (const Error& e) {
        if (e.code() == Errc::ConfigError) throw;
        config_fail(e.what());
    }
    s.q = required<std::uint64_t>(j, "q");
    s.m_A = required<std::size_t>(j, "m_A");
    s.m = required<std::size_t>(j, "m");
    s.m_B = field_or<std::size_t>(j, "m_B", s.m);
    s.s_r = field_or<std::size_t>(j, "s_r", 1);
    s.s_c = field_or<std::size_t>(j, "s_c", 1);
    s.N = required<std::size_t>(j, "N");
    cfg.ell = field_or<std::size_t>(j, "ell", 0);
    cfg.seed = field_or<std::uint64_t>(j, "seed", 0);
    s.seed = cfg.seed;
    cfg.trials = field_or<std::size_t>(j, "trials", 1);
    if (cfg.trials == 0) config_fail("trials must be positive");
    cfg.straggler.seed = cfg.seed;
    if (j.contains("straggler")) {
        const json& st = j.at("straggler");
        if (st.is_string()) {
            try {
                cfg.straggler.kind = parse_straggler_kind(st.get<std::string>());
            } catch (const Error& e) {
                config_fail(e.what());
            }
        } else if (st.is_object()) {
            try {
                cfg.straggler.kind = parse_straggler_kind(field_or<std::string>(st, "kind", "none"));
            } catch (const Error& e) {
                if (e.code() == Errc::ConfigError) throw;
                config_fail(e.what());
            }
            cfg.straggler.prob = field_or<double>(st, "prob", 0.0);
            cfg.straggler.count = field_or<std::size_t>(st, "count", 0);
            cfg.straggler.seed = field_or<std::uint64_t>(st, "seed", cfg.seed);
        } else {
            config_fail("config field 'straggler' must be a string or an object");
        }
        if (cfg.straggler.prob < 0 || cfg.straggler.prob > 1) config_fail("straggler prob must be in [0, 1]");
        if (cfg.straggler.count > s.N) config_fail("straggler count exceeds N");
    }
    if (j.contains("chain")) {
        const json& ch = j.at("chain");
        if (!ch.is_object()) config_fail("config field 'chain' must be an object");
        cfg.chain_length = required<std::size_t>(ch, "N_c");
        try {
            cfg.chain_method = parse_chain_method(field_or<std::string>(ch, "method", "recursive"));
        } catch (const Error& e) {
            if (e.code() == Errc::ConfigError) throw;
            config_fail(e.what());
        }
        if (cfg.ell) config_fail("chain runs do not take ell");
    }
    try {
        if (cfg.chain_length) {
            const Field f(s.q);
            validate_chain(chain_job(cfg, std::vector<FqMatrix>(cfg.chain_length, FqMatrix(f, s.m, s.m))));
        } else if (cfg.ell) {
            validate_secure(secure_spec(cfg, 0));
        } else {
            validate(s);
        }
    } catch (const Error& e) {
        config_fail(std::string("invalid experiment: ") + e.what());
    }
    return cfg;
}

std::string cost_csv_header() {
    return "family,q,m_A,m,m_B,s_r,s_c,N,ell,chain_length,chain_method,trial,survivors,recovery_threshold,success,"
           "matches,master_storage,worker_storage,master_comm,worker_comm,master_comp,worker_comp,receiver_comp";
}

std::string cost_csv_row(const ExperimentConfig& cfg, std::uint64_t trial, const ExperimentResult& r) {
    const CodeSpec& s = cfg.spec;
    const CostReport& c = r.cost;
    std::ostringstream os;
    os << family_name(s.family) << ',' << s.q << ',' << s.m_A << ',' << s.m << ',' << s.m_B << ',' << s.s_r << ','
       << s.s_c << ',' << s.N << ',' << cfg.ell << ',' << cfg.chain_length << ','
       << (cfg.chain_length ? chain_method_name(cfg.chain_method) : "") << ',' << trial << ','
       << r.survivors.size() << ',' << c.recovery_threshold << ',' << (c.success ? "true" : "false") << ','
       << (r.matches ? "true" : "false") << ',' << c.master_storage << ',' << c.worker_storage << ','
       << c.master_comm << ',' << c.worker_comm << ',' << c.master_comp << ',' << c.worker_comp << ','
       << c.receiver_comp;
    return os.str();
}

std::vector<ExperimentResult> run_config(const ExperimentConfig& cfg) {
    std::vector<ExperimentResult> out;
    const Field f(cfg.spec.q);
    for (std::uint64_t t = 0; t < cfg.trials; ++t) {
        Rng rng(derive_seed(cfg.seed, t));
        ExperimentResult r;
        FqMatrix direct(f, 0, 0);
        if (cfg.chain_length) {
            std::vector<FqMatrix> mats;
            for (std::size_t i = 0; i < cfg.chain_length; ++i) mats.push_back(FqMatrix::random(f, cfg.spec.m, cfg.spec.m, rng));
            const ChainJob job = chain_job(cfg, std::move(mats));
            direct = chain_direct(job.matrices);
            r = run_experiment(job, cfg.straggler, t);
        } else {
            const auto [A, B] = sample_inputs(cfg.spec, rng);
            direct = mat_tmul(A, B);
            r = cfg.ell ? run_experiment(secure_spec(cfg, t), A, B, cfg.straggler, t)
                        : run_experiment(cfg.spec, A, B, cfg.straggler, t);
        }
        r.matches = !r.product || *r.product == direct;
        out.push_back(std::move(r));
    }
    return out;
}

} // namespace scmm
