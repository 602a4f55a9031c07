#include "scmm/poly_codes.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

namespace scmm {

const std::vector<Family>& all_families() {
    static const std::vector<Family> f{Family::Poly,     Family::MatDot,       Family::PolyDot,     Family::StPoly,
                                       Family::StMatDot, Family::StPolyDotSym, Family::StPolyDotGen};
    return f;
}

std::string family_name(Family f) {
    switch (f) {
    case Family::Poly: return "Poly";
    case Family::MatDot: return "MatDot";
    case Family::PolyDot: return "PolyDot";
    case Family::StPoly: return "StPoly";
    case Family::StMatDot: return "StMatDot";
    case Family::StPolyDotSym: return "StPolyDotSym";
    case Family::StPolyDotGen: return "StPolyDotGen";
    }
    return "?";
}

Family parse_family(const std::string& name) {
    for (Family f : all_families())
        if (family_name(f) == name) return f;
    if (name == "StPolyDot") return Family::StPolyDotSym;
    throw Error(Errc::UnknownScheme, "unknown code family '" + name + "'");
}

bool is_structured(Family f) {
    return f == Family::StPoly || f == Family::StMatDot || f == Family::StPolyDotSym || f == Family::StPolyDotGen;
}

namespace {

bool is_poly_variant(Family f) {
    return f == Family::Poly || f == Family::StPoly;
}

bool is_matdot_variant(Family f) {
    return f == Family::MatDot || f == Family::StMatDot;
}

/// Block grids, exponents and targets of one family instance.
struct Layout {
    std::size_t ar, ac, br, bc;
    std::vector<std::size_t> a_exps, b_exps;
    std::size_t out_rows, out_cols;  // result block grid
    std::vector<std::size_t> targets;
    std::size_t threshold;
};

Layout make_layout(const CodeSpec& s) {
    Layout L{};
    if (is_poly_variant(s.family)) {
        L.ar = L.br = 1;
        L.ac = s.m;
        L.bc = s.m_B;
        for (std::size_t j = 0; j < s.m; ++j) L.a_exps.push_back(j);
        for (std::size_t k = 0; k < s.m_B; ++k) L.b_exps.push_back(k * s.m);
        L.out_rows = s.m;
        L.out_cols = s.m_B;
        for (std::size_t j = 0; j < s.m; ++j)
            for (std::size_t k = 0; k < s.m_B; ++k) L.targets.push_back(j + k * s.m);
        L.threshold = s.m * s.m_B;
        return L;
    }
    const auto [r, c] = block_counts(s);
    L.ar = L.br = r;
    L.ac = L.bc = c;
    for (std::size_t j = 0; j < r; ++j)
        for (std::size_t k = 0; k < c; ++k) {
            L.a_exps.push_back(polydot_a_exponent(j, k, r, c));
            L.b_exps.push_back(polydot_b_exponent(j, k, r, c));
        }
    L.out_rows = L.out_cols = c;
    for (std::size_t k = 0; k < c; ++k)
        for (std::size_t kp = 0; kp < c; ++kp) L.targets.push_back(polydot_target_exponent(k, kp, r, c));
    L.threshold = c * c * (2 * r - 1);
    return L;
}

std::size_t b_cols(const CodeSpec& s) {
    return is_poly_variant(s.family) ? s.m_B : s.m;
}

std::size_t polys_per_share(Family f) {
    if (f == Family::StPolyDotGen) return 4;
    return is_structured(f) ? 3 : 2;
}

void check_inputs(const CodeSpec& spec, const FqMatrix& A, const FqMatrix& B) {
    if (A.field().q() != spec.q || B.field().q() != spec.q) throw Error(Errc::FieldMismatch, "inputs not over F_q of the spec");
    if (A.rows() != spec.m_A || A.cols() != spec.m) throw Error(Errc::ShapeMismatch, "A must be m_A x m");
    if (B.rows() != spec.m_A || B.cols() != b_cols(spec)) throw Error(Errc::ShapeMismatch, "B has the wrong shape");
}

} // namespace

std::pair<std::size_t, std::size_t> block_counts(const CodeSpec& spec) {
    if (is_poly_variant(spec.family)) return {1, spec.m};
    if (is_matdot_variant(spec.family)) return {spec.s_r * spec.s_c, 1};
    return {spec.s_r, spec.s_c};
}

std::size_t recovery_threshold(Family family, std::size_t s_r, std::size_t s_c, std::size_t m, std::size_t m_B) {
    if (is_poly_variant(family)) return m * m_B;
    if (is_matdot_variant(family)) return 2 * s_r * s_c - 1;
    return s_c * s_c * (2 * s_r - 1);
}

std::size_t recovery_threshold(const CodeSpec& spec) {
    return recovery_threshold(spec.family, spec.s_r, spec.s_c, spec.m, spec.m_B);
}

void validate(const CodeSpec& spec) {
    const Field f(spec.q);
    auto fail = [](const std::string& msg) { throw Error(Errc::SpecViolation, msg); };
    if (spec.m_A == 0 || spec.m == 0 || spec.m_B == 0) fail("matrix dimensions must be positive");
    if (spec.s_r == 0 || spec.s_c == 0) fail("s_r and s_c must be positive");
    if (spec.N == 0) fail("N must be positive");
    const auto [r, c] = block_counts(spec);
    if (spec.m_A % r) fail("s_r must divide m_A");
    if (spec.m % c) fail("s_c must divide m");
    if (is_structured(spec.family) && spec.m_A % (2 * r)) fail("2 s_r must divide m_A for structured families");
    if (spec.family == Family::StPolyDotSym && spec.sym_mode == SymMode::symmetrize && spec.q == 2)
        fail("q must be odd for StPolyDotSym symmetrization");
    if (spec.N < recovery_threshold(spec)) fail("N is below the recovery threshold");
    if (spec.eval_points.empty()) {
        if (spec.q <= spec.N) fail("q must exceed N to host N distinct nonzero points");
    } else {
        if (spec.eval_points.size() != spec.N) fail("need exactly N evaluation points");
        std::set<residue> seen;
        for (residue x : spec.eval_points) {
            if (x == 0 || x >= spec.q) fail("evaluation points must be nonzero residues");
            if (!seen.insert(x).second) fail("evaluation points must be distinct");
        }
    }
}

std::vector<residue> evaluation_points(const CodeSpec& spec) {
    if (!spec.eval_points.empty()) return spec.eval_points;
    std::vector<residue> x(spec.N);
    for (std::size_t i = 0; i < spec.N; ++i) x[i] = i + 1;
    return x;
}

BlockGrid split_blocks(const FqMatrix& X, std::size_t s_r, std::size_t s_c) {
    if (s_r == 0 || s_c == 0 || X.rows() % s_r || X.cols() % s_c)
        throw Error(Errc::DivisibilityViolation, "split counts must divide the matrix dimensions");
    const std::size_t h = X.rows() / s_r, w = X.cols() / s_c;
    BlockGrid g{s_r, s_c, {}};
    for (std::size_t j = 0; j < s_r; ++j)
        for (std::size_t k = 0; k < s_c; ++k) g.blocks.push_back(X.slice(j * h, (j + 1) * h, k * w, (k + 1) * w));
    return g;
}

FqMatrix join_blocks(const BlockGrid& g) {
    const FqMatrix& b0 = g.blocks.at(0);
    FqMatrix X(b0.field(), b0.rows() * g.s_r, b0.cols() * g.s_c);
    for (std::size_t j = 0; j < g.s_r; ++j)
        for (std::size_t k = 0; k < g.s_c; ++k) X.set_block(j * b0.rows(), k * b0.cols(), g.at(j, k));
    return X;
}

std::size_t polydot_a_exponent(std::size_t j, std::size_t k, std::size_t, std::size_t s_c) {
    return k + s_c * j;
}

std::size_t polydot_b_exponent(std::size_t j, std::size_t k, std::size_t s_r, std::size_t s_c) {
    return s_c * (s_r - 1 - j) + s_c * (2 * s_r - 1) * k;
}

std::size_t polydot_target_exponent(std::size_t k, std::size_t kp, std::size_t s_r, std::size_t s_c) {
    return k + s_c * (s_r - 1) + s_c * (2 * s_r - 1) * kp;
}

FqMatrix evaluate_blocks(const std::vector<FqMatrix>& blocks, const std::vector<std::size_t>& exps, residue x,
                         OpCount* ops) {
    if (blocks.empty() || blocks.size() != exps.size()) throw Error(Errc::LengthMismatch, "one exponent per block");
    const Field& f = blocks[0].field();
    FqMatrix out(f, blocks[0].rows(), blocks[0].cols());
    for (std::size_t i = 0; i < blocks.size(); ++i) mat_axpy(out, f.pow(x, exps[i]), blocks[i], ops);
    return out;
}

std::vector<ShareBundle> master_encode(const CodeSpec& spec, const FqMatrix& A, const FqMatrix& B, OpCount* ops) {
    validate(spec);
    check_inputs(spec, A, B);
    const Layout L = make_layout(spec);
    const BlockGrid ga = split_blocks(A, L.ar, L.ac), gb = split_blocks(B, L.br, L.bc);
    const auto xs = evaluation_points(spec);
    std::vector<ShareBundle> out;
    for (std::size_t i = 0; i < spec.N; ++i) {
        const FqMatrix At = evaluate_blocks(ga.blocks, L.a_exps, xs[i], ops);
        const FqMatrix Bt = evaluate_blocks(gb.blocks, L.b_exps, xs[i], ops);
        ShareBundle s = assemble_share(spec.family, i, xs[i], At, Bt, ops);
        out.push_back(std::move(s));
    }
    return out;
}

ShareBundle assemble_share(Family family, std::size_t worker, residue x, const FqMatrix& At, const FqMatrix& Bt,
                           OpCount* ops) {
    ShareBundle s{worker, x, {}};
    if (!is_structured(family)) {
        s.polys = {At, Bt};
        return s;
    }
    const std::size_t h = At.rows() / 2;
    const FqMatrix A1 = At.slice(0, h, 0, At.cols()), A2 = At.slice(h, At.rows(), 0, At.cols());
    const FqMatrix B1 = Bt.slice(0, h, 0, Bt.cols()), B2 = Bt.slice(h, Bt.rows(), 0, Bt.cols());
    if (family == Family::StPolyDotGen) {
        s.polys = {mat_add(A1, B2, ops), A2, B1, mat_add(mat_tmul(A2, A1, ops), mat_tmul(B2, B1, ops), ops)};
    } else {
        s.polys = {mat_add(A2, B1, ops), mat_add(A1, B2, ops), mat_add(mat_tmul(A2, A1, ops), mat_tmul(B1, B2, ops), ops)};
    }
    return s;
}

WorkerOutput worker_compute(const ShareBundle& b, Family family, OpCount* ops) {
    if (b.polys.size() != polys_per_share(family)) throw Error(Errc::MalformedBundle, "wrong number of share polynomials");
    const auto& p = b.polys;
    auto same_shape = [](const FqMatrix& X, const FqMatrix& Y) { return X.rows() == Y.rows() && X.cols() == Y.cols(); };
    for (const FqMatrix& x : p)
        if (x.field() != p[0].field()) throw Error(Errc::MalformedBundle, "share polynomials over different fields");
    WorkerOutput out;
    out.worker = b.worker;
    out.x = b.x;
    if (!is_structured(family)) {
        if (p[0].rows() != p[1].rows()) throw Error(Errc::MalformedBundle, "share row counts differ");
        out.value = mat_tmul(p[0], p[1], ops);
    } else if (family == Family::StPolyDotGen) {
        const std::size_t w = p[0].cols();
        if (!same_shape(p[0], p[1]) || !same_shape(p[0], p[2]) || p[3].rows() != w || p[3].cols() != w)
            throw Error(Errc::MalformedBundle, "share shapes inconsistent");
        out.value = mat_sub(mat_add(mat_tmul(p[1], p[0], ops), mat_tmul(p[0], p[2], ops), ops), p[3], ops);
    } else {
        const std::size_t w = p[0].cols();
        if (!same_shape(p[0], p[1]) || p[2].rows() != w || p[2].cols() != w)
            throw Error(Errc::MalformedBundle, "share shapes inconsistent");
        out.value = mat_sub(mat_tmul(p[0], p[1], ops), p[2], ops);
    }
    return out;
}

std::vector<FqMatrix> interpolate_coefficients(const std::vector<WorkerOutput>& outputs, std::size_t n,
                                               const std::vector<std::size_t>& exps) {
    if (outputs.size() < n || n == 0) throw Error(Errc::InsufficientOutputs, "fewer outputs than the recovery threshold");
    const Field& f = outputs[0].value.field();
    std::vector<residue> points;
    std::set<residue> seen;
    for (std::size_t i = 0; i < n; ++i) {
        if (!seen.insert(outputs[i].x).second) throw Error(Errc::DuplicateEvaluationPoint, "two outputs share x_i");
        points.push_back(outputs[i].x);
    }
    const FqMatrix Vinv = vandermonde_inverse(f, points);
    std::vector<FqMatrix> coeffs;
    for (std::size_t e : exps) {
        if (e >= n) throw Error(Errc::OutOfRange, "requested exponent exceeds the polynomial degree");
        FqMatrix C(f, outputs[0].value.rows(), outputs[0].value.cols());
        for (std::size_t i = 0; i < n; ++i) mat_axpy(C, Vinv(e, i), outputs[i].value);
        coeffs.push_back(std::move(C));
    }
    return coeffs;
}

FqMatrix receiver_decode(const std::vector<WorkerOutput>& outputs, const CodeSpec& spec, OpCount* ops) {
    validate(spec);
    const Layout L = make_layout(spec);
    const std::size_t n = L.threshold;
    if (outputs.size() < n) throw Error(Errc::InsufficientOutputs, "fewer outputs than the recovery threshold");
    const std::size_t w = spec.m / L.ac, wb = b_cols(spec) / L.bc;
    const Field f(spec.q);
    std::vector<WorkerOutput> used(outputs.begin(), outputs.begin() + n);
    for (auto& o : used) {
        if (o.value.rows() != w || o.value.cols() != wb) throw Error(Errc::MalformedBundle, "worker output has the wrong shape");
        if (o.value.field() != f) throw Error(Errc::FieldMismatch, "worker output over another field");
        if (spec.family == Family::StPolyDotSym && spec.sym_mode == SymMode::symmetrize)
            o.value = mat_scale(mat_add(o.value, o.value.transpose()), f.div2(1));
    }
    const auto coeffs = interpolate_coefficients(used, n, L.targets);
    FqMatrix D(f, spec.m, b_cols(spec));
    for (std::size_t a = 0; a < L.out_rows; ++a)
        for (std::size_t b = 0; b < L.out_cols; ++b) D.set_block(a * w, b * wb, coeffs[a * L.out_cols + b]);
    if (ops) *ops += n * w * wb + n * n * n;
    return D;
}

bool structured_precondition(const CodeSpec& spec, const FqMatrix& A, const FqMatrix& B) {
    const bool sym = spec.family == Family::StPolyDotSym && spec.sym_mode == SymMode::symmetrize;
    const bool raw = (spec.family == Family::StPolyDotSym && spec.sym_mode == SymMode::raw) ||
                     spec.family == Family::StMatDot;
    if (!sym && !raw) return true;
    check_inputs(spec, A, B);
    const Layout L = make_layout(spec);
    const BlockGrid ga = split_blocks(A, L.ar, L.ac), gb = split_blocks(B, L.br, L.bc);
    if (sym) {
        for (residue x : evaluation_points(spec)) {
            const FqMatrix P = mat_tmul(evaluate_blocks(ga.blocks, L.a_exps, x), evaluate_blocks(gb.blocks, L.b_exps, x));
            if (P != P.transpose()) return false;
        }
        return true;
    }
    for (const FqMatrix& a : ga.blocks)
        for (const FqMatrix& b : gb.blocks) {
            const std::size_t h = a.rows() / 2;
            const FqMatrix P = mat_tmul(a.slice(0, h, 0, a.cols()), b.slice(0, h, 0, b.cols()));
            if (P != P.transpose()) return false;
        }
    return true;
}

std::pair<FqMatrix, FqMatrix> sample_inputs(const CodeSpec& spec, Rng& rng) {
    const Field f(spec.q);
    const bool sym = spec.family == Family::StPolyDotSym && spec.sym_mode == SymMode::symmetrize;
    const bool raw = (spec.family == Family::StPolyDotSym && spec.sym_mode == SymMode::raw) ||
                     spec.family == Family::StMatDot;
    if (!sym && !raw)
        return {FqMatrix::random(f, spec.m_A, spec.m, rng), FqMatrix::random(f, spec.m_A, b_cols(spec), rng)};
    const auto [r, c] = block_counts(spec);
    const std::size_t h = spec.m_A / r, w = spec.m / c;
    const FqMatrix G = FqMatrix::random(f, sym ? h : h / 2, w, rng);
    auto draw = [&]() {
        BlockGrid g{r, c, {}};
        for (std::size_t i = 0; i < r * c; ++i) {
            const residue scale = rng.below(f.q());
            if (sym) {
                g.blocks.push_back(mat_scale(G, scale));
            } else {
                g.blocks.push_back(vstack(mat_scale(G, scale), FqMatrix::random(f, h - h / 2, w, rng)));
            }
        }
        return join_blocks(g);
    };
    FqMatrix A = draw();
    FqMatrix B = draw();
    return {std::move(A), std::move(B)};
}

std::size_t share_size(const CodeSpec& spec) {
    const Layout L = make_layout(spec);
    const std::size_t rows = spec.m_A / L.ar, wa = spec.m / L.ac, wb = b_cols(spec) / L.bc;
    switch (spec.family) {
    case Family::Poly:
    case Family::MatDot:
    case Family::PolyDot: return rows * wa + rows * wb;
    case Family::StPolyDotGen: return 3 * (rows / 2) * wa + wa * wa;
    default: return 2 * (rows / 2) * wa + wa * wb;
    }
}

std::size_t output_size(const CodeSpec& spec) {
    const Layout L = make_layout(spec);
    return (spec.m / L.ac) * (b_cols(spec) / L.bc);
}

std::string share_to_json(const ShareBundle& bundle, const CodeSpec& spec) {
    nlohmann::ordered_json j;
    j["version"] = 1;
    j["family"] = family_name(spec.family);
    j["q"] = spec.q;
    j["i"] = bundle.worker;
    j["x_i"] = bundle.x;
    j["polys"] = nlohmann::ordered_json::array();
    for (const FqMatrix& p : bundle.polys) {
        nlohmann::ordered_json e;
        e["rows"] = p.rows();
        e["cols"] = p.cols();
        e["entries"] = p.entries();
        j["polys"].push_back(e);
    }
    return j.dump();
}

ShareBundle share_from_json(const std::string& text, const CodeSpec& spec) {
    try {
        const auto j = nlohmann::json::parse(text);
        if (j.at("version").get<int>() != 1) throw Error(Errc::MalformedBundle, "unsupported share envelope version");
        if (j.at("family").get<std::string>() != family_name(spec.family))
            throw Error(Errc::MalformedBundle, "share family differs from the spec");
        if (j.at("q").get<std::uint64_t>() != spec.q) throw Error(Errc::MalformedBundle, "share field differs from the spec");
        const Field f(spec.q);
        ShareBundle b{j.at("i").get<std::size_t>(), j.at("x_i").get<residue>(), {}};
        for (const auto& e : j.at("polys")) {
            const auto rows = e.at("rows").get<std::size_t>(), cols = e.at("cols").get<std::size_t>();
            auto entries = e.at("entries").get<std::vector<residue>>();
            if (entries.size() != rows * cols) throw Error(Errc::MalformedBundle, "entry count differs from shape");
            for (residue v : entries)
                if (v >= spec.q) throw Error(Errc::MalformedBundle, "entry not reduced mod q");
            b.polys.emplace_back(f, rows, cols, std::move(entries));
        }
        if (b.polys.size() != polys_per_share(spec.family)) throw Error(Errc::MalformedBundle, "wrong number of polynomials");
        return b;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::MalformedBundle, std::string("share envelope: ") + e.what());
    }
}

} // namespace scmm
