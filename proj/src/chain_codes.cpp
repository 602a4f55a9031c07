#include "scmm/chain_codes.hpp"

#include <json.hpp>

namespace scmm {

std::string chain_method_name(ChainMethod m) {
    return m == ChainMethod::hierarchical ? "hierarchical" : "recursive";
}

ChainMethod parse_chain_method(const std::string& name) {
    if (name == "hierarchical") return ChainMethod::hierarchical;
    if (name == "recursive") return ChainMethod::recursive;
    throw Error(Errc::UnknownScheme, "unknown chain method '" + name + "'");
}

FqMatrix chain_direct(const std::vector<FqMatrix>& ms) {
    if (ms.size() < 2) throw Error(Errc::LengthMismatch, "a chain needs at least two matrices");
    FqMatrix P = mat_tmul(ms[0], ms[1]);
    for (std::size_t i = 2; i < ms.size(); ++i) P = i % 2 ? mat_mul(P, ms[i]) : mat_mul(P, ms[i].transpose());
    return P;
}

namespace {

/// Exponent of the A^T B target block (0, s_c - 1).
std::size_t base_offset(std::size_t s_r, std::size_t s_c) {
    return s_c * (s_r - 1) + s_c * (2 * s_r - 1) * (s_c - 1);
}

std::size_t step(std::size_t s_r, std::size_t s_c) {
    return base_offset(s_r, s_c) + s_c;
}

bool power_of_two(std::size_t n) {
    return n >= 2 && (n & (n - 1)) == 0;
}

std::size_t chain_dim(const ChainJob& job) {
    return job.matrices.empty() ? 0 : job.matrices[0].rows();
}

/// X J for J = [I I ...]: repeats X horizontally, no arithmetic.
FqMatrix right_tile(const FqMatrix& X, std::size_t w) {
    FqMatrix Y(X.field(), X.rows(), w);
    for (std::size_t r = 0; r < X.rows(); ++r)
        for (std::size_t c = 0; c < w; ++c) Y(r, c) = X(r, c % X.cols());
    return Y;
}

/// J^T X J: tiles X in both directions, no arithmetic.
FqMatrix both_tile(const FqMatrix& X, std::size_t w) {
    FqMatrix Y(X.field(), w, w);
    for (std::size_t r = 0; r < w; ++r)
        for (std::size_t c = 0; c < w; ++c) Y(r, c) = X(r % X.rows(), c % X.cols());
    return Y;
}

FqMatrix top(const FqMatrix& X) {
    return X.slice(0, X.rows() / 2, 0, X.cols());
}

FqMatrix bottom(const FqMatrix& X) {
    return X.slice(X.rows() / 2, X.rows(), 0, X.cols());
}

CodeSpec pair_spec(const ChainJob& job, Family family) {
    CodeSpec s = job.spec;
    s.family = family;
    s.m_A = s.m = s.m_B = chain_dim(job);
    return s;
}

std::vector<WorkerOutput> pick(const std::vector<WorkerOutput>& all, const std::vector<std::size_t>& survivors) {
    if (survivors.empty()) return all;
    std::vector<WorkerOutput> out;
    for (std::size_t i : survivors) {
        if (i >= all.size()) throw Error(Errc::OutOfRange, "survivor index exceeds N");
        out.push_back(all[i]);
    }
    return out;
}

} // namespace

std::size_t chain_thresholds(std::size_t N_c, std::size_t s_r, std::size_t s_c, ChainMethod method) {
    const std::size_t polydot = s_c * s_c * (2 * s_r - 1);
    if (method == ChainMethod::hierarchical) return polydot;
    if (N_c == 3) {
        if (s_r % 2) throw Error(Errc::SpecViolation, "the three-matrix threshold needs even s_r");
        return polydot + s_c * (2 * s_r - 1) * (s_r / 2);
    }
    if (N_c == 4) return 2 * polydot;
    throw Error(Errc::SpecViolation, "recursive chains support N_c in {3, 4}");
}

std::size_t chain_c_exponent(std::size_t r, std::size_t k, std::size_t s_r, std::size_t s_c) {
    return s_c * (2 * s_r - 1) * (s_c - 1 - k) + step(s_r, s_c) * r;
}

std::size_t chain_d_exponent(std::size_t r, std::size_t k, std::size_t s_r, std::size_t s_c) {
    const std::size_t b = step(s_r, s_c);
    return b * (s_r - 1 - r) + b * s_r * k;
}

std::size_t chain_target_exponent(std::size_t a, std::size_t b, std::size_t s_r, std::size_t s_c, std::size_t N_c) {
    const std::size_t L = base_offset(s_r, s_c), beta = step(s_r, s_c);
    if (N_c == 3) return a + L + beta * b;
    return a + L + beta * (s_r - 1) + beta * s_r * b;
}

std::size_t chain_decode_threshold(std::size_t N_c, std::size_t s_r, std::size_t s_c, ChainMethod method) {
    if (method == ChainMethod::hierarchical) return s_c * s_c * (2 * s_r - 1);
    if (N_c != 3 && N_c != 4) throw Error(Errc::SpecViolation, "recursive chains support N_c in {3, 4}");
    const std::size_t ab = s_c * s_c * (2 * s_r - 1) - 1;
    const std::size_t c = chain_c_exponent(s_r - 1, 0, s_r, s_c);
    if (N_c == 3) return ab + c + 1;
    return ab + c + chain_d_exponent(0, s_c - 1, s_r, s_c) + 1;
}

void validate_chain(const ChainJob& job) {
    const std::size_t N_c = job.matrices.size();
    const std::size_t m = chain_dim(job);
    auto fail = [](const std::string& msg) { throw Error(Errc::SpecViolation, msg); };
    if (m == 0) fail("chain matrices must be nonempty");
    for (const FqMatrix& X : job.matrices) {
        if (X.rows() != m || X.cols() != m) fail("chain matrices must all be m x m");
        if (X.field().q() != job.spec.q) fail("chain matrices must live in F_q of the spec");
    }
    if (job.method == ChainMethod::hierarchical) {
        if (!power_of_two(N_c)) fail("the hierarchical method needs N_c = 2^b");
        const Family f = job.spec.family;
        if (f == Family::StPolyDotSym || f == Family::StMatDot)
            fail("hierarchical rounds need a family that is exact for general inputs");
        validate(pair_spec(job, f));
        return;
    }
    if (N_c != 3 && N_c != 4) fail("recursive chains support N_c in {3, 4}");
    const std::size_t s_r = job.spec.s_r, s_c = job.spec.s_c;
    if (s_r == 0 || s_c == 0) fail("s_r and s_c must be positive");
    if (m % (2 * s_r) || m % s_c) throw Error(Errc::DivisibilityViolation, "need 2 s_r | m and s_c | m");
    if (N_c == 3) {
        if (s_r % 2) fail("the three-matrix recursion needs even s_r");
        if ((2 * s_r) % s_c) throw Error(Errc::DivisibilityViolation, "the J matrix needs s_c | 2 s_r");
    }
    CodeSpec s = pair_spec(job, Family::PolyDot);
    const std::size_t n = chain_decode_threshold(N_c, s_r, s_c, job.method);
    if (s.N < n) fail("N is below the chain decoding threshold");
    validate(s);
}

std::vector<ShareBundle> chain_encode(const ChainJob& job, OpCount* ops) {
    validate_chain(job);
    if (job.method != ChainMethod::recursive) throw Error(Errc::SpecViolation, "chain_encode serves the recursive method");
    const std::size_t N_c = job.matrices.size(), m = chain_dim(job);
    const std::size_t s_r = job.spec.s_r, s_c = job.spec.s_c, w = m / s_c;
    const BlockGrid ga = split_blocks(job.matrices[0], s_r, s_c), gb = split_blocks(job.matrices[1], s_r, s_c),
                    gc = split_blocks(job.matrices[2], s_r, s_c);
    std::vector<std::size_t> ea, eb, ec, ed;
    for (std::size_t j = 0; j < s_r; ++j)
        for (std::size_t k = 0; k < s_c; ++k) {
            ea.push_back(polydot_a_exponent(j, k, s_r, s_c));
            eb.push_back(polydot_b_exponent(j, k, s_r, s_c));
            ec.push_back(chain_c_exponent(j, k, s_r, s_c));
            ed.push_back(chain_d_exponent(j, k, s_r, s_c));
        }
    const auto xs = evaluation_points(pair_spec(job, Family::PolyDot));
    std::vector<ShareBundle> out;
    for (std::size_t i = 0; i < job.spec.N; ++i) {
        // Block-polynomial evaluations are not charged.
        const FqMatrix At = evaluate_blocks(ga.blocks, ea, xs[i]);
        const FqMatrix Bt = evaluate_blocks(gb.blocks, eb, xs[i]);
        const FqMatrix Ct = evaluate_blocks(gc.blocks, ec, xs[i]);
        const FqMatrix A1 = top(At), A2 = bottom(At), B1 = top(Bt), B2 = bottom(Bt);
        const FqMatrix p1 = mat_add(B1, bottom(Ct), ops);
        const FqMatrix p2 = mat_add(B2, top(Ct), ops);
        // C~ halves recovered from p1, p2 by subtraction, charged as free.
        const FqMatrix C1 = mat_sub(p2, B2), C2 = mat_sub(p1, B1);
        ShareBundle s{i, xs[i], {}};
        if (N_c == 3) {
            const FqMatrix D1 = mat_mul(B1, C1.transpose(), ops), D2 = mat_mul(B2, C1.transpose(), ops);
            const FqMatrix E1 = mat_mul(B1, C2.transpose(), ops), E2 = mat_mul(B2, C2.transpose(), ops);
            const FqMatrix p31 = mat_add(A1, right_tile(D2, w), ops);
            const FqMatrix p32 = mat_add(A1, right_tile(E2, w), ops);
            const FqMatrix G = mat_tmul(A2, A1, ops);
            const FqMatrix p61 = mat_add(G, both_tile(mat_tmul(D2, D1, ops), w), ops);
            const FqMatrix p62 = mat_add(G, both_tile(mat_tmul(E2, E1, ops), w), ops);
            s.polys = {p31, p32, A2, right_tile(D1, w), right_tile(E1, w), p61, p62};
        } else {
            const BlockGrid gd = split_blocks(job.matrices[3], s_r, s_c);
            const FqMatrix Dt = evaluate_blocks(gd.blocks, ed, xs[i]);
            const FqMatrix p3 = mat_add(B1, bottom(Dt), ops);
            const FqMatrix p4 = mat_add(B2, top(Dt), ops);
            const FqMatrix D1 = mat_sub(p4, B2), D2 = mat_sub(p3, B1);
            const FqMatrix S = mat_add(mat_tmul(C1, D1, ops), mat_tmul(C2, D2, ops), ops);
            const FqMatrix E = mat_mul(Bt, S, ops);
            const FqMatrix E1 = top(E), E2 = bottom(E);
            const FqMatrix p5 = mat_add(A1, E2, ops);
            const FqMatrix p8 = mat_add(mat_tmul(A2, A1, ops), mat_tmul(E2, E1, ops), ops);
            s.polys = {p5, A2, E1, p8};
        }
        out.push_back(std::move(s));
    }
    return out;
}

WorkerOutput chain_worker(const ShareBundle& b, std::size_t N_c, OpCount* ops) {
    const auto& p = b.polys;
    WorkerOutput out;
    out.worker = b.worker;
    out.x = b.x;
    auto combine = [&](const FqMatrix& lin, const FqMatrix& half, const FqMatrix& other, const FqMatrix& parity) {
        if (lin.rows() != half.rows() || lin.cols() != half.cols() || other.rows() != lin.rows() ||
            other.cols() != lin.cols() || parity.rows() != lin.cols() || parity.cols() != lin.cols())
            throw Error(Errc::MalformedBundle, "chain share shapes inconsistent");
        return mat_sub(mat_add(mat_tmul(half, lin, ops), mat_tmul(lin, other, ops), ops), parity, ops);
    };
    if (N_c == 3) {
        if (p.size() != 7) throw Error(Errc::MalformedBundle, "three-matrix shares carry seven polynomials");
        out.value = hstack(combine(p[0], p[2], p[3], p[5]), combine(p[1], p[2], p[4], p[6]));
    } else if (N_c == 4) {
        if (p.size() != 4) throw Error(Errc::MalformedBundle, "four-matrix shares carry four polynomials");
        out.value = combine(p[0], p[1], p[2], p[3]);
    } else {
        throw Error(Errc::SpecViolation, "recursive chains support N_c in {3, 4}");
    }
    return out;
}

FqMatrix chain_decode(const std::vector<WorkerOutput>& outputs, const ChainJob& job, OpCount* ops) {
    validate_chain(job);
    const std::size_t N_c = job.matrices.size(), m = chain_dim(job);
    const std::size_t s_r = job.spec.s_r, s_c = job.spec.s_c, w = m / s_c, h = m / (2 * s_r);
    const std::size_t n = chain_decode_threshold(N_c, s_r, s_c, job.method);
    if (outputs.size() < n) throw Error(Errc::InsufficientOutputs, "fewer outputs than the chain decoding threshold");
    const Field f(job.spec.q);
    const std::size_t out_cols = N_c == 3 ? 2 * w : w;
    std::vector<WorkerOutput> used(outputs.begin(), outputs.begin() + n);
    for (auto& o : used) {
        if (o.value.rows() != w || o.value.cols() != out_cols) throw Error(Errc::MalformedBundle, "worker output has the wrong shape");
        if (o.value.field() != f) throw Error(Errc::FieldMismatch, "worker output over another field");
        if (N_c == 3) o.value = hstack(o.value.slice(0, w, 0, h), o.value.slice(0, w, w, w + h));
    }
    const std::size_t cols = N_c == 3 ? s_r : s_c;
    std::vector<std::size_t> targets;
    for (std::size_t a = 0; a < s_c; ++a)
        for (std::size_t b = 0; b < cols; ++b) targets.push_back(chain_target_exponent(a, b, s_r, s_c, N_c));
    const auto coeffs = interpolate_coefficients(used, n, targets);
    const std::size_t bw = m / cols;
    FqMatrix P(f, m, m);
    for (std::size_t a = 0; a < s_c; ++a)
        for (std::size_t b = 0; b < cols; ++b) P.set_block(a * w, b * bw, coeffs[a * cols + b]);
    if (ops) *ops += n * w * out_cols + n * n * n;
    return P;
}

namespace {

FqMatrix recursive_run(const ChainJob& job, RoleOps* ops, const std::vector<std::size_t>& survivors) {
    RoleOps local;
    const auto shares = chain_encode(job, &local.master);
    std::vector<WorkerOutput> outs;
    for (const auto& s : shares) outs.push_back(chain_worker(s, job.matrices.size(), &local.worker));
    const FqMatrix P = chain_decode(pick(outs, survivors), job, &local.receiver);
    if (ops) *ops += local;
    return P;
}

} // namespace

FqMatrix chain3_recursive(const ChainJob& job, RoleOps* ops, const std::vector<std::size_t>& survivors) {
    if (job.matrices.size() != 3 || job.method != ChainMethod::recursive)
        throw Error(Errc::SpecViolation, "chain3_recursive needs three matrices and the recursive method");
    return recursive_run(job, ops, survivors);
}

FqMatrix chain4_recursive(const ChainJob& job, RoleOps* ops, const std::vector<std::size_t>& survivors) {
    if (job.matrices.size() != 4 || job.method != ChainMethod::recursive)
        throw Error(Errc::SpecViolation, "chain4_recursive needs four matrices and the recursive method");
    return recursive_run(job, ops, survivors);
}

FqMatrix chain_hierarchical(const ChainJob& job, RoleOps* ops, const std::vector<std::size_t>& survivors) {
    if (job.method != ChainMethod::hierarchical) throw Error(Errc::SpecViolation, "job is not hierarchical");
    validate_chain(job);
    const CodeSpec spec = pair_spec(job, job.spec.family);
    std::vector<FqMatrix> level = job.matrices;
    bool first = true;
    RoleOps local;
    while (level.size() > 1) {
        std::vector<FqMatrix> next;
        for (std::size_t i = 0; i + 1 < level.size(); i += 2) {
            // Round one multiplies X^T Y; later rounds multiply recovered products P Q = (P^T)^T Q.
            const FqMatrix A = first ? level[i] : level[i].transpose();
            const auto shares = master_encode(spec, A, level[i + 1], &local.master);
            std::vector<WorkerOutput> outs;
            for (const auto& s : shares) outs.push_back(worker_compute(s, spec.family, &local.worker));
            next.push_back(receiver_decode(pick(outs, survivors), spec, &local.receiver));
        }
        level = std::move(next);
        first = false;
    }
    if (ops) *ops += local;
    return level[0];
}

FqMatrix chain_run(const ChainJob& job, RoleOps* ops, const std::vector<std::size_t>& survivors) {
    if (job.method == ChainMethod::hierarchical) return chain_hierarchical(job, ops, survivors);
    if (job.matrices.size() == 3) return chain3_recursive(job, ops, survivors);
    return chain4_recursive(job, ops, survivors);
}

RoleOps chain_closed_forms(std::size_t N_c, std::size_t m, std::size_t s_r, std::size_t s_c, std::size_t N) {
    const std::size_t h = m / (2 * s_r), w = m / s_c;
    const std::size_t n = chain_decode_threshold(N_c, s_r, s_c, ChainMethod::recursive);
    RoleOps r;
    if (N_c == 3) {
        r.master = N * (4 * h * w + 4 * h * h * w + h * w * w + 2 * h * h * h + 2 * w * w);
        r.worker = N * (4 * h * w * w + 4 * w * w);
    } else {
        r.master = N * (5 * h * w + 6 * h * w * w + 2 * w * w);
        r.worker = N * (2 * h * w * w + 2 * w * w);
    }
    r.receiver = n * chain_output_size(N_c, m, s_c) + n * n * n;
    return r;
}

std::size_t chain_share_size(std::size_t N_c, std::size_t m, std::size_t s_r, std::size_t s_c) {
    const std::size_t h = m / (2 * s_r), w = m / s_c;
    return N_c == 3 ? 5 * h * w + 2 * w * w : 3 * h * w + w * w;
}

std::size_t chain_output_size(std::size_t N_c, std::size_t m, std::size_t s_c) {
    const std::size_t w = m / s_c;
    return N_c == 3 ? 2 * w * w : w * w;
}

std::string chain_share_to_json(const ShareBundle& bundle, std::uint64_t q, std::size_t N_c) {
    nlohmann::ordered_json j;
    j["version"] = 1;
    j["stage"] = "chain" + std::to_string(N_c);
    j["q"] = q;
    j["i"] = bundle.worker;
    j["x_i"] = bundle.x;
    j["polys"] = nlohmann::ordered_json::array();
    for (const FqMatrix& p : bundle.polys)
        j["polys"].push_back({{"rows", p.rows()}, {"cols", p.cols()}, {"entries", p.entries()}});
    return j.dump();
}

ShareBundle chain_share_from_json(const std::string& text, std::uint64_t q, std::size_t N_c) {
    try {
        const auto j = nlohmann::json::parse(text);
        if (j.at("version").get<int>() != 1) throw Error(Errc::MalformedBundle, "unsupported share envelope version");
        if (j.at("stage").get<std::string>() != "chain" + std::to_string(N_c))
            throw Error(Errc::MalformedBundle, "share stage differs from the chain length");
        if (j.at("q").get<std::uint64_t>() != q) throw Error(Errc::MalformedBundle, "share field differs");
        const Field f(q);
        ShareBundle b{j.at("i").get<std::size_t>(), j.at("x_i").get<residue>(), {}};
        for (const auto& e : j.at("polys")) {
            const auto rows = e.at("rows").get<std::size_t>(), cols = e.at("cols").get<std::size_t>();
            auto entries = e.at("entries").get<std::vector<residue>>();
            if (entries.size() != rows * cols) throw Error(Errc::MalformedBundle, "entry count differs from shape");
            for (residue v : entries)
                if (v >= q) throw Error(Errc::MalformedBundle, "entry not reduced mod q");
            b.polys.emplace_back(f, rows, cols, std::move(entries));
        }
        if (b.polys.size() != (N_c == 3 ? 7u : 4u)) throw Error(Errc::MalformedBundle, "wrong number of polynomials");
        return b;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::MalformedBundle, std::string("share envelope: ") + e.what());
    }
}

} // namespace scmm
