#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "scmm/chain_codes.hpp"
#include "scmm/cluster_sim.hpp"
#include "scmm/km_code.hpp"
#include "scmm/oracles.hpp"
#include "scmm/poly_codes.hpp"
#include "scmm/rate_lab.hpp"
#include "scmm/secure_codes.hpp"

using namespace scmm;

namespace {

constexpr std::uint64_t default_seed = 7;
constexpr const char* seed_env = "SCMM_SEED";

std::uint64_t env_seed() {
    const char* v = std::getenv(seed_env);
    if (!v || !*v) return default_seed;
    try {
        std::size_t pos = 0;
        const std::uint64_t s = std::stoull(v, &pos);
        if (pos != std::string(v).size()) throw std::invalid_argument(v);
        return s;
    } catch (const std::exception&) {
        throw Error(Errc::ConfigError, std::string(seed_env) + " must be an unsigned integer");
    }
}

/// Parses a:b:n into n evenly spaced points from a to b inclusive.
std::vector<double> parse_grid(const std::string& text) {
    const auto c1 = text.find(':'), c2 = text.find(':', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
        throw Error(Errc::ConfigError, "p grid must look like start:stop:count");
    try {
        const double a = std::stod(text.substr(0, c1)), b = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
        const long n = std::stol(text.substr(c2 + 1));
        if (n < 1) throw Error(Errc::ConfigError, "p grid count must be positive");
        if (n == 1 && a != b) throw Error(Errc::ConfigError, "a one-point p grid needs start == stop");
        std::vector<double> ps;
        for (long i = 0; i < n; ++i) ps.push_back(n == 1 ? a : a + (b - a) * static_cast<double>(i) / (n - 1));
        return ps;
    } catch (const std::logic_error&) {
        throw Error(Errc::ConfigError, "p grid must look like start:stop:count");
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::ConfigError, "cannot read " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

/// Writes the buffered output in one step, so a failed run leaves no partial file.
void emit(const std::string& text, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    const std::string tmp = path + ".partial";
    {
        std::ofstream out(tmp, std::ios::trunc);
        out << text;
        if (!out) {
            std::filesystem::remove(tmp);
            throw Error(Errc::ConfigError, "cannot write " + path);
        }
    }
    std::filesystem::rename(tmp, path);
}

struct VerifySummary {
    std::uint64_t checks = 0;
    std::uint64_t mismatches = 0;
    std::vector<std::string> lines;

    void add(const std::string& name, std::uint64_t c, std::uint64_t bad) {
        checks += c;
        mismatches += bad;
        lines.push_back(name + ": " + std::to_string(c) + " checks, " + std::to_string(bad) + " mismatches");
    }
};

void verify_source_maps(VerifySummary& sum, bool desk, std::uint64_t seed) {
    SourceOracleGrid grid;
    if (!desk) {
        grid.qs = {2, 3};
        grid.max_m = 4;
        grid.max_l = 2;
        grid.exhaustive_limit = 1ULL << 12;
        grid.random_trials = 100;
    }
    std::uint64_t c = 0, bad = 0;
    for (const auto& t : source_maps_oracles(grid, seed)) {
        c += t.checks;
        bad += t.mismatches;
    }
    sum.add("source maps", c, bad);
}

void verify_poly(VerifySummary& sum, std::uint64_t seed) {
    Rng rng(derive_seed(seed, 2));
    std::uint64_t c = 0, bad = 0;
    for (Family fam : all_families())
        for (std::size_t sr : {1, 2})
            for (std::size_t sc : {1, 2}) {
                CodeSpec s;
                s.family = fam;
                s.q = 17;
                s.m_A = 8;
                s.m = 4;
                s.m_B = (fam == Family::Poly || fam == Family::StPoly) ? 3 : 4;
                s.s_r = sr;
                s.s_c = sc;
                s.N = recovery_threshold(s) + 2;
                const auto [A, B] = sample_inputs(s, rng);
                const FqMatrix want = direct_tmul(A, B);
                for (std::uint64_t t = 0; t < 8; ++t) {
                    const auto ok = run_experiment(s, A, B, StragglerModel::adversarial_subset(recovery_threshold(s), seed), t);
                    ++c;
                    if (!ok.cost.success || *ok.product != want || ok.cost != cost_closed_forms(s)) ++bad;
                    const auto no = run_experiment(s, A, B, StragglerModel::adversarial_subset(recovery_threshold(s) - 1, seed), t);
                    ++c;
                    if (no.cost.success || no.product) ++bad;
                }
            }
    sum.add("poly codes", c, bad);
}

void verify_chain(VerifySummary& sum, std::uint64_t seed) {
    Rng rng(derive_seed(seed, 3));
    std::uint64_t c = 0, bad = 0;
    const Field f(61);
    for (ChainMethod method : {ChainMethod::recursive, ChainMethod::hierarchical})
        for (std::size_t Nc : {3, 4}) {
            if (method == ChainMethod::hierarchical && Nc == 3) continue;
            ChainJob job;
            job.method = method;
            job.spec.family = Family::PolyDot;
            job.spec.q = 61;
            job.spec.s_r = 2;
            job.spec.s_c = 1;
            job.spec.N = chain_decode_threshold(Nc, 2, 1, method) + 2;
            for (std::size_t i = 0; i < Nc; ++i) job.matrices.push_back(FqMatrix::random(f, 4, 4, rng));
            const auto r = run_experiment(job, StragglerModel::adversarial_subset(job.spec.N - 2, seed));
            ++c;
            if (!r.cost.success || *r.product != chain_direct(job.matrices)) ++bad;
        }
    sum.add("chain products", c, bad);
}

void verify_secure(VerifySummary& sum, std::uint64_t seed) {
    Rng rng(derive_seed(seed, 4));
    std::uint64_t c = 0, bad = 0;
    for (Family fam : {Family::PolyDot, Family::StPolyDotGen})
        for (std::size_t ell : {0, 1, 2}) {
            SecureSpec s;
            s.base.family = fam;
            s.base.q = 257;
            s.base.m_A = 4;
            s.base.m = s.base.m_B = 4;
            s.base.s_r = s.base.s_c = 2;
            s.ell = ell;
            s.key_seed = derive_seed(seed, 5 + ell);
            s.base.N = (ell ? secure_decode_threshold(s) : recovery_threshold(s.base)) + 1;
            const auto [A, B] = sample_inputs(s.base, rng);
            const auto r = run_experiment(s, A, B, StragglerModel::adversarial_subset(s.base.N - 1, seed));
            ++c;
            if (!r.cost.success || *r.product != direct_tmul(A, B)) ++bad;
        }
    for (std::uint64_t q : {3, 5}) {
        SecureSpec s;
        s.base.family = Family::PolyDot;
        s.base.q = q;
        s.base.m_A = s.base.m = s.base.m_B = 1;
        s.base.N = q - 1;
        const auto rep = leakage_audit(s, 1);
        c += rep.sets.size();
        for (const auto& set : rep.sets) bad += set.mi_bits_is_zero ? 0 : 1;
    }
    sum.add("secure codes", c, bad);
}

std::string costs_header() {
    return "family,m_A,m,m_B,s_r,s_c,N,ell,recovery_threshold,master_storage,worker_storage,master_comm,worker_comm,"
           "master_comp,worker_comp,receiver_comp,eta_S,eta_S_realized,eta_comm,chi_comp,chi_bound";
}

std::string opt(const std::optional<double>& v) {
    if (!v) return "";
    std::ostringstream os;
    os << std::setprecision(12) << *v;
    return os.str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Structured coded matrix multiplication toolkit"};
    app.require_subcommand(1);
    std::string output;
    std::optional<std::uint64_t> seed_flag;
    app.add_option("-o,--output", output, "Output file (default stdout)");
    app.add_option("--seed", seed_flag, "Seed (default $SCMM_SEED, else 7)");

    auto* run = app.add_subcommand("run", "Run an experiment config and emit cost CSV rows");
    std::string config_path;
    run->add_option("--config", config_path, "Experiment JSON")->required();
    run->add_option("-o,--output", output, "Output file (default stdout)");
    run->add_option("--seed", seed_flag, "Overrides the config seed");

    auto* rates = app.add_subcommand("rates", "Sweep closed-form rates over p");
    std::string scheme = "cor1", p_grid = "0.01:0.99:50";
    RateParams rp;
    rates->add_option("--scheme", scheme, "cor1, cor2, example2, ah_dsbs, hk_dsbs, gap_symmetric, gap_square, gap_dot, gap_outer");
    rates->add_option("--m", rp.m, "Rows");
    rates->add_option("--l", rp.l, "Columns");
    rates->add_option("--q", rp.q, "Field size");
    rates->add_option("--epsilon", rp.epsilon, "Example-2 epsilon");
    rates->add_option("--p-grid", p_grid, "start:stop:count");
    rates->add_option("-o,--output", output, "Output file (default stdout)");

    auto* costs = app.add_subcommand("costs", "Evaluate the cost table cells and gain ratios");
    std::string family = "StPolyDot";
    std::size_t mA = 8, m = 4, mB = 0, sr = 1, sc = 1, N = 0, ell = 0;
    costs->add_option("--family", family, "Code family");
    costs->add_option("--mA", mA, "Rows of A and B");
    costs->add_option("--m", m, "Columns of A");
    costs->add_option("--mB", mB, "Columns of B for Poly and StPoly (default m)");
    costs->add_option("--sr", sr, "Row blocks");
    costs->add_option("--sc", sc, "Column blocks");
    costs->add_option("--N", N, "Workers (default the recovery threshold)");
    costs->add_option("--ell", ell, "Colluding workers tolerated");
    costs->add_option("-o,--output", output, "Output file (default stdout)");

    auto* audit = app.add_subcommand("security-audit", "Exact leakage of padded shares per collusion set");
    std::uint64_t aq = 3, budget = leakage_enumeration_budget;
    std::size_t amA = 1, am = 1, asr = 1, asc = 1, aN = 0, aell = 1, set_size = 1;
    audit->add_option("--q", aq, "Field size");
    audit->add_option("--mA", amA, "Rows of A and B");
    audit->add_option("--m", am, "Columns");
    audit->add_option("--sr", asr, "Row blocks");
    audit->add_option("--sc", asc, "Column blocks");
    audit->add_option("--N", aN, "Workers (default q - 1)");
    audit->add_option("--ell", aell, "Pad size");
    audit->add_option("--set-size", set_size, "Colluding workers per set");
    audit->add_option("--budget", budget, "Largest enumeration");
    audit->add_option("-o,--output", output, "Output file (default stdout)");

    auto* km = app.add_subcommand("km-sim", "Monte-Carlo block error of syndrome coding on DSBS sources");
    std::size_t kn = 14, trials = 500;
    double kp = 0.05;
    std::vector<std::size_t> kappas{6, 9, 12, 14};
    km->add_option("--n", kn, "Block length");
    km->add_option("--p", kp, "DSBS crossover");
    km->add_option("--kappa", kappas, "Syndrome lengths")->delimiter(',');
    km->add_option("--trials", trials, "Trials per kappa");
    km->add_option("--seed", seed_flag, "Seed");
    km->add_option("-o,--output", output, "Output file (default stdout)");

    auto* verify = app.add_subcommand("verify", "Run the oracle suite; nonzero exit on any mismatch");
    std::string grid = "desk";
    verify->add_option("--grid", grid, "desk or quick")->check(CLI::IsMember({"desk", "quick"}));
    verify->add_option("--seed", seed_flag, "Seed");
    verify->add_option("-o,--output", output, "Summary file (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        const std::uint64_t seed = seed_flag ? *seed_flag : env_seed();
        std::ostringstream out;
        int status = 0;
        if (*run) {
            ExperimentConfig cfg = parse_config(read_file(config_path));
            if (seed_flag) {
                cfg.seed = cfg.straggler.seed = cfg.spec.seed = *seed_flag;
            }
            out << cost_csv_header() << '\n';
            const auto results = run_config(cfg);
            for (std::size_t t = 0; t < results.size(); ++t) {
                out << cost_csv_row(cfg, t, results[t]) << '\n';
                if (!results[t].matches) status = 1;
            }
            if (status) {
                std::cerr << "error: a decoded product differs from the direct product\n";
                return status;
            }
        } else if (*rates) {
            const auto points = rate_sweep(scheme, rp, parse_grid(p_grid));
            out << rate_csv_header() << '\n';
            for (const auto& r : points) out << rate_csv_row(r) << '\n';
        } else if (*costs) {
            CodeSpec s;
            try {
                s.family = parse_family(family);
            } catch (const Error& e) {
                throw Error(Errc::ConfigError, e.what());
            }
            s.m_A = mA;
            s.m = m;
            s.m_B = mB ? mB : m;
            s.s_r = sr;
            s.s_c = sc;
            s.N = N ? N : recovery_threshold(s);
            SecureSpec sec{s, ell, seed, false};
            if (ell) s.N = N ? N : secure_decode_threshold(sec);
            sec.base = s;
            if (s.N < recovery_threshold(s)) throw Error(Errc::ConfigError, "N is below the recovery threshold");
            const CostReport c = ell ? cost_closed_forms(sec) : cost_closed_forms(s);
            std::optional<GainRatios> g;
            try {
                g = gain_ratios(mA, m, sr, sc, s.N);
            } catch (const Error&) {
            }
            out << costs_header() << '\n';
            out << family_name(s.family) << ',' << mA << ',' << m << ',' << s.m_B << ',' << sr << ',' << sc << ','
                << s.N << ',' << ell << ',' << c.recovery_threshold << ',' << c.master_storage << ','
                << c.worker_storage << ',' << c.master_comm << ',' << c.worker_comm << ',' << c.master_comp << ','
                << c.worker_comp << ',' << c.receiver_comp << ',' << (g ? opt(g->eta_S) : "") << ','
                << (g ? opt(g->eta_S_realized) : "") << ',' << (g ? opt(g->eta_comm) : "") << ','
                << (g ? opt(g->chi_comp) : "") << ',' << (g ? opt(g->chi_bound) : "") << '\n';
        } else if (*audit) {
            SecureSpec s;
            s.base.family = Family::PolyDot;
            s.base.q = aq;
            s.base.m_A = amA;
            s.base.m = s.base.m_B = am;
            s.base.s_r = asr;
            s.base.s_c = asc;
            s.base.N = aN ? aN : aq - 1;
            s.ell = aell;
            const auto rep = leakage_audit(s, set_size, budget);
            out << leakage_csv_header() << '\n';
            for (const auto& row : leakage_csv_rows(rep)) out << row << '\n';
        } else if (*km) {
            const auto reports = km_simulate(dsbs_source(kp), kn, kappas, trials, seed);
            out << km_csv_header() << '\n';
            for (const auto& r : reports) out << km_csv_row(r) << '\n';
        } else if (*verify) {
            VerifySummary sum;
            verify_source_maps(sum, grid == "desk", seed);
            verify_poly(sum, seed);
            verify_chain(sum, seed);
            verify_secure(sum, seed);
            for (const auto& l : sum.lines) out << l << '\n';
            out << "total: " << sum.checks << " checks, " << sum.mismatches << " mismatches\n";
            if (sum.mismatches) {
                std::cerr << out.str();
                return 1;
            }
        }
        emit(out.str(), output);
        return 0;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
