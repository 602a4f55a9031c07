#include "scmm/source_maps.hpp"

#include <set>
#include <string>

namespace scmm {

namespace {

residue dot(const FqMatrix& x, const FqMatrix& y) {
    return mat_tmul(x, y)(0, 0);
}

FqMatrix col(const FqMatrix& X, std::size_t j) {
    return X.slice(0, X.rows(), j, j + 1);
}

FqMatrix ones_row(const Field& f, std::size_t l) {
    return FqMatrix(f, 1, l, std::vector<residue>(l, 1));
}

FqMatrix sym_half(const FqMatrix& R) {
    const Field& f = R.field();
    if (f.q() == 2) throw Error(Errc::EvenFieldDivision, "symmetrization divides by 2");
    FqMatrix S = mat_add(R, R.transpose());
    for (std::size_t i = 0; i < S.rows(); ++i)
        for (std::size_t j = 0; j < S.cols(); ++j) S(i, j) = f.div2(S(i, j));
    return S;
}

void require_same_rows(const FqMatrix& A, const FqMatrix& B) {
    if (A.field() != B.field()) throw Error(Errc::FieldMismatch, "sources over different fields");
    if (A.rows() != B.rows() || A.rows() == 0) throw Error(Errc::ShapeMismatch, "sources need equal nonzero length");
}

} // namespace

std::pair<FqMatrix, FqMatrix> split_rows_a(const FqMatrix& A) {
    const std::size_t m = A.rows(), k = m / 2;
    if (m % 2 == 0) return {A.slice(0, k, 0, A.cols()), A.slice(k, m, 0, A.cols())};
    FqMatrix A1(A.field(), k + 1, A.cols());
    A1.set_block(0, 0, A.slice(0, k, 0, A.cols()));
    return {A1, A.slice(k, m, 0, A.cols())};
}

std::pair<FqMatrix, FqMatrix> split_rows_b(const FqMatrix& B) {
    const std::size_t m = B.rows(), k = m / 2;
    if (m % 2 == 0) return {B.slice(0, k, 0, B.cols()), B.slice(k, m, 0, B.cols())};
    return {B.slice(0, k + 1, 0, B.cols()), B.slice(k, m, 0, B.cols())};
}

DotMessages dot_messages(const FqMatrix& A, const FqMatrix& B) {
    require_same_rows(A, B);
    if (A.cols() != 1 || B.cols() != 1) throw Error(Errc::ShapeMismatch, "dot product needs column vectors");
    auto [A1, A2] = split_rows_a(A);
    auto [B1, B2] = split_rows_b(B);
    const Field& f = A.field();
    return {mat_add(A2, B1), mat_add(A1, B2), f.add(dot(A2, A1), dot(B1, B2))};
}

residue dot_decode(const DotMessages& msg) {
    return msg.U.field().sub(dot(msg.U, msg.V), msg.W);
}

std::uint64_t embed_modulus(std::size_t m, std::uint64_t q) {
    const std::uint64_t base = q == 2 ? 2 * m : 2 * (q - 1) * m;
    return base + m % 2;
}

EmbedMessages embed_dot_messages(const FqMatrix& A, const FqMatrix& B) {
    require_same_rows(A, B);
    if (A.cols() != 1 || B.cols() != 1) throw Error(Errc::ShapeMismatch, "dot product needs column vectors");
    const Field& f = A.field();
    const std::size_t m = A.rows();
    const std::uint64_t r = embed_modulus(m, f.q());
    EmbedMessages msg{{}, 0, r};
    for (std::size_t i = 0; i < m; ++i) {
        const std::uint64_t s = (A(i, 0) + B(i, 0)) % r;
        msg.sums.push_back(s);
        if (f.q() == 2)
            msg.aux = (msg.aux + s) % r;
        else
            msg.aux = f.add(msg.aux, f.add(f.mul(A(i, 0), A(i, 0)), f.mul(B(i, 0), B(i, 0))));
    }
    return msg;
}

residue embed_dot_decode(const std::vector<std::uint64_t>& sums, std::uint64_t aux, std::size_t m,
                         std::uint64_t q) {
    const Field f(q);
    if (sums.size() != m) throw Error(Errc::LengthMismatch, "expected one embedded sum per entry");
    const std::uint64_t r = embed_modulus(m, q);
    for (std::uint64_t s : sums)
        if (s > 2 * (q - 1)) throw Error(Errc::NoConsistentK, "embedded sum exceeds 2(q-1)");
    if (q == 2) {
        std::uint64_t total = 0, both = 0;
        for (std::uint64_t s : sums) {
            total += s;
            both += s == 2;
        }
        if (total % r != aux % r) throw Error(Errc::NoConsistentK, "auxiliary sum disagrees with entries");
        return both % 2;
    }
    // The achievable values of sum_i a_i^2 + b_i^2 mod q given each a_i + b_i.
    std::set<residue> reach{0};
    for (std::uint64_t s : sums) {
        std::set<residue> next;
        for (std::uint64_t a = (s >= q - 1 ? s - (q - 1) : 0); a <= std::min<std::uint64_t>(s, q - 1); ++a) {
            const residue t = f.add(f.mul(a, a), f.mul(s - a, s - a));
            for (residue v : reach) next.insert(f.add(v, t));
        }
        reach.swap(next);
    }
    if (aux >= q || !reach.count(aux)) throw Error(Errc::NoConsistentK, "no source pair produces these messages");
    // (a + b)^2 = a^2 + b^2 + 2ab over the integers, hence mod q.
    residue sq = 0;
    for (std::uint64_t s : sums) sq = f.add(sq, f.mul(s % q, s % q));
    return f.div2(f.sub(sq, aux));
}

MatrixMessages matvec_messages(const FqMatrix& A, const FqMatrix& b) {
    require_same_rows(A, b);
    if (b.cols() != 1) throw Error(Errc::ShapeMismatch, "b must be a column vector");
    const Field& f = A.field();
    const std::size_t l = A.cols();
    auto [A1, A2] = split_rows_a(A);
    auto [b1, b2] = split_rows_b(b);
    const FqMatrix one = ones_row(f, l);
    FqMatrix W = mat_tmul(A2, A1);
    const residue bb = dot(b1, b2);
    for (std::size_t i = 0; i < l; ++i)
        for (std::size_t j = 0; j < l; ++j) W(i, j) = f.add(W(i, j), bb);
    return {MatrixVariant::Prop3, mat_add(A2, mat_mul(b1, one)), mat_add(A1, mat_mul(b2, one)), W};
}

FqMatrix matvec_decode(const MatrixMessages& msg) {
    if (msg.variant != MatrixVariant::Prop3) throw Error(Errc::ShapeMismatch, "not matrix-vector messages");
    FqMatrix R = mat_sub(mat_tmul(msg.U, msg.V), msg.W);
    FqMatrix d(R.field(), R.rows(), 1);
    for (std::size_t i = 0; i < R.rows(); ++i) d(i, 0) = R(i, i);
    return d;
}

MatrixMessages symmetric_messages(const FqMatrix& A, const FqMatrix& B, MatrixVariant variant) {
    require_same_rows(A, B);
    if (A.cols() != B.cols()) throw Error(Errc::ShapeMismatch, "A and B need equal column counts");
    auto [A1, A2] = split_rows_a(A);
    auto [B1, B2] = split_rows_b(B);
    FqMatrix W = mat_add(mat_tmul(A2, A1), mat_tmul(B1, B2));
    if (variant == MatrixVariant::Thm1)
        W = mat_add(W, W.transpose());
    else if (variant != MatrixVariant::Prop5)
        throw Error(Errc::ShapeMismatch, "symmetric messages are Prop5 or Thm1");
    return {variant, mat_add(A2, B1), mat_add(A1, B2), W};
}

FqMatrix symmetric_decode(const MatrixMessages& msg, bool debug) {
    if (msg.U.field().q() == 2) throw Error(Errc::EvenFieldDivision, "symmetric decode divides by 2");
    const FqMatrix UtV = mat_tmul(msg.U, msg.V);
    if (msg.variant == MatrixVariant::Prop5) {
        const FqMatrix raw = mat_sub(UtV, msg.W);
        if (debug && raw != raw.transpose()) throw Error(Errc::AsymmetryDetected, "unsymmetrized estimate is asymmetric");
        return sym_half(raw);
    }
    if (msg.variant == MatrixVariant::Thm1) {
        const Field& f = UtV.field();
        FqMatrix S = mat_sub(mat_add(UtV, UtV.transpose()), msg.W);
        for (std::size_t i = 0; i < S.rows(); ++i)
            for (std::size_t j = 0; j < S.cols(); ++j) S(i, j) = f.div2(S(i, j));
        return S;
    }
    throw Error(Errc::ShapeMismatch, "not symmetric-product messages");
}

SquareEmbedMessages square_embed_messages(const FqMatrix& A, const FqMatrix& B) {
    require_same_rows(A, B);
    if (A.cols() != B.cols()) throw Error(Errc::ShapeMismatch, "A and B need equal column counts");
    const std::size_t l = A.cols();
    const FqMatrix one = ones_row(A.field(), l);
    SquareEmbedMessages msg{{}, mat_tmul(A, A), {}};
    for (std::size_t j = 0; j < l; ++j) {
        const FqMatrix Bj = mat_mul(col(B, j), one);
        msg.sums.push_back(mat_add(A, Bj));
        msg.BtB.push_back(mat_tmul(Bj, Bj));
    }
    return msg;
}

FqMatrix square_embed_decode(const SquareEmbedMessages& msg) {
    const Field& f = msg.AtA.field();
    if (f.q() == 2) throw Error(Errc::EvenFieldDivision, "diagonal recovery divides by 2");
    const std::size_t l = msg.AtA.rows();
    if (msg.sums.size() != l || msg.BtB.size() != l) throw Error(Errc::ShapeMismatch, "need one message per column");
    FqMatrix D(f, l, l);
    for (std::size_t j = 0; j < l; ++j) {
        const FqMatrix Mj = mat_sub(mat_tmul(msg.sums[j], msg.sums[j]), mat_add(msg.AtA, msg.BtB[j]));
        for (std::size_t i = 0; i < l; ++i) D(i, j) = f.div2(Mj(i, i));
        for (std::size_t i = 0; i < l; ++i)
            for (std::size_t i2 = 0; i2 < l; ++i2)
                if (Mj(i, i2) != f.add(D(i, j), D(i2, j)))
                    throw Error(Errc::InconsistentOffDiagonals,
                                "column " + std::to_string(j) + " off-diagonal sums disagree");
    }
    return D;
}

CrossMessages cross_messages(const FqMatrix& A, const FqMatrix& B) {
    require_same_rows(A, B);
    if (A.cols() != B.cols()) throw Error(Errc::ShapeMismatch, "A and B need equal column counts");
    auto [A1, A2] = split_rows_a(A);
    auto [B1, B2] = split_rows_b(B);
    return {A1, B2, mat_add(A2, B1), mat_add(mat_tmul(A1, A2), mat_tmul(B1, B2))};
}

FqMatrix square_ah_decode(const FqMatrix& A1, const FqMatrix& B2, const FqMatrix& Ucross,
                          const FqMatrix& Wcross) {
    return mat_sub(mat_add(mat_tmul(A1, Ucross), mat_tmul(Ucross, B2)), Wcross);
}

namespace {

struct ColumnHalves {
    std::vector<FqMatrix> A1, A2, B1, B2;
};

ColumnHalves column_halves(const FqMatrix& A, const FqMatrix& B) {
    const std::size_t h = A.rows() / 2;
    ColumnHalves c;
    for (std::size_t j = 0; j < A.cols(); ++j) {
        c.A1.push_back(A.slice(0, h, j, j + 1));
        c.A2.push_back(A.slice(h, A.rows(), j, j + 1));
        c.B1.push_back(B.slice(0, h, j, j + 1));
        c.B2.push_back(B.slice(h, B.rows(), j, j + 1));
    }
    return c;
}

FqMatrix halve(const FqMatrix& X) {
    const Field& f = X.field();
    FqMatrix Y = X;
    for (std::size_t i = 0; i < Y.rows(); ++i)
        for (std::size_t j = 0; j < Y.cols(); ++j) Y(i, j) = f.div2(Y(i, j));
    return Y;
}

const PairMessages& pair_at(const RecursiveMessages& msgs, std::size_t i, std::size_t j) {
    auto it = msgs.pairs.find({i, j});
    if (it == msgs.pairs.end())
        throw Error(Errc::ShapeMismatch, "missing messages for pair (" + std::to_string(i) + "," + std::to_string(j) + ")");
    return it->second;
}

const FqMatrix& need(const std::optional<FqMatrix>& v) {
    if (!v) throw Error(Errc::ShapeMismatch, "message component missing");
    return *v;
}

residue need(const std::optional<residue>& v) {
    if (!v) throw Error(Errc::ShapeMismatch, "message component missing");
    return *v;
}

} // namespace

RecursiveMessages recursive_messages(const FqMatrix& A, const FqMatrix& B, RecursiveVariant variant) {
    require_same_rows(A, B);
    if (A.cols() != B.cols()) throw Error(Errc::ShapeMismatch, "A and B need equal column counts");
    const Field& f = A.field();
    const std::size_t m = A.rows(), l = A.cols();
    if (m % 2) throw Error(Errc::DivisibilityViolation, "recursive construction needs even m");
    if (variant != RecursiveVariant::recursive && f.q() == 2)
        throw Error(Errc::EvenFieldDivision, "symmetric recursive variants divide by 2");
    if (variant == RecursiveVariant::nested && m % 4)
        throw Error(Errc::DivisibilityViolation, "nested construction needs 4 | m");
    const ColumnHalves c = column_halves(A, B);
    RecursiveMessages out{variant, l, f.q(), {}};
    auto triple = [&](std::size_t i, std::size_t j) {
        PairMessages p;
        p.U = mat_add(c.A2[i], c.B1[j]);
        p.V = mat_add(c.A1[i], c.B2[j]);
        p.W = f.add(dot(c.A2[i], c.A1[i]), dot(c.B1[j], c.B2[j]));
        return p;
    };
    for (std::size_t i = 0; i < l; ++i)
        for (std::size_t j = i; j < l; ++j) {
            PairMessages p = triple(i, j);
            if (i != j && variant == RecursiveVariant::recursive_sym) p.W.reset();
            if (i != j && variant == RecursiveVariant::nested) {
                const std::size_t h = m / 4;
                const PairMessages di = triple(i, i), dj = triple(j, j);
                const FqMatrix P = mat_add(*di.U, *dj.U), Q = mat_add(*di.V, *dj.V);
                const FqMatrix U1 = p.U->slice(0, h, 0, 1), U2 = p.U->slice(h, 2 * h, 0, 1);
                const FqMatrix V1 = p.V->slice(0, h, 0, 1), V2 = p.V->slice(h, 2 * h, 0, 1);
                const FqMatrix alpha = halve(vstack(P.slice(h, 2 * h, 0, 1), P.slice(0, h, 0, 1)));
                const FqMatrix beta = halve(vstack(Q.slice(h, 2 * h, 0, 1), Q.slice(0, h, 0, 1)));
                PairMessages n;
                n.item_i = mat_add(U2, V1);
                n.item_ii = mat_add(U1, V2);
                n.item_iii = f.sub(f.add(dot(U2, U1), dot(V1, V2)), f.add(dot(alpha, *p.U), dot(beta, *p.V)));
                p = n;
            }
            out.pairs[{i, j}] = p;
        }
    return out;
}

FqMatrix recursive_decode(const RecursiveMessages& msgs) {
    const Field f(msgs.q);
    const std::size_t l = msgs.l;
    FqMatrix D(f, l, l);
    for (std::size_t i = 0; i < l; ++i) {
        const PairMessages& p = pair_at(msgs, i, i);
        D(i, i) = f.sub(dot(need(p.U), need(p.V)), need(p.W));
    }
    for (std::size_t i = 0; i < l; ++i)
        for (std::size_t j = i + 1; j < l; ++j) {
            const PairMessages& di = pair_at(msgs, i, i);
            const PairMessages& dj = pair_at(msgs, j, j);
            const PairMessages& p = pair_at(msgs, i, j);
            switch (msgs.variant) {
            case RecursiveVariant::recursive: {
                D(i, j) = f.sub(dot(need(p.U), need(p.V)), need(p.W));
                // Lower triangle from U_ji = U_ii + U_jj - U_ij and likewise for V, W.
                const FqMatrix Uji = mat_sub(mat_add(need(di.U), need(dj.U)), need(p.U));
                const FqMatrix Vji = mat_sub(mat_add(need(di.V), need(dj.V)), need(p.V));
                const residue Wji = f.sub(f.add(need(di.W), need(dj.W)), need(p.W));
                D(j, i) = f.sub(dot(Uji, Vji), Wji);
                break;
            }
            case RecursiveVariant::recursive_sym: {
                const FqMatrix& U = need(p.U);
                const FqMatrix& V = need(p.V);
                const FqMatrix P = mat_add(need(di.U), need(dj.U));
                const FqMatrix Q = mat_add(need(di.V), need(dj.V));
                residue two_d = f.sub(dot(P, Q), f.add(need(di.W), need(dj.W)));
                two_d = f.add(two_d, f.mul(2, dot(U, V)));
                two_d = f.sub(two_d, f.add(dot(U, Q), dot(P, V)));
                D(i, j) = D(j, i) = f.div2(two_d);
                break;
            }
            case RecursiveVariant::nested: {
                const FqMatrix P = mat_add(need(di.U), need(dj.U));
                const FqMatrix Q = mat_add(need(di.V), need(dj.V));
                const std::size_t h = P.rows() / 2;
                const FqMatrix P1 = P.slice(0, h, 0, 1), P2 = P.slice(h, 2 * h, 0, 1);
                const FqMatrix Q1 = Q.slice(0, h, 0, 1), Q2 = Q.slice(h, 2 * h, 0, 1);
                const FqMatrix Up = mat_sub(need(p.item_i), halve(mat_add(P2, Q1)));
                const FqMatrix Vp = mat_sub(need(p.item_ii), halve(mat_add(P1, Q2)));
                const residue quarter = f.inv(4 % f.q());
                const residue Wp = f.add(need(p.item_iii), f.mul(quarter, f.add(dot(P2, P1), dot(Q1, Q2))));
                const residue ubar_vbar = f.sub(dot(Up, Vp), Wp);
                residue d = f.add(ubar_vbar, f.mul(quarter, dot(P, Q)));
                d = f.sub(d, f.div2(f.add(need(di.W), need(dj.W))));
                D(i, j) = D(j, i) = d;
                break;
            }
            }
        }
    return D;
}

} // namespace scmm
