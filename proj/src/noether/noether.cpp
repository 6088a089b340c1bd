#include "nframes/noether.hpp"

#include <algorithm>

namespace nf {

namespace {

size_t base_p(const JetContext& ctx) { return ctx.p_base(); }

Matrix base_block(const Matrix& m, size_t p) {
    Matrix r(p, p);
    for (size_t i = 0; i < p; ++i)
        for (size_t j = 0; j < p; ++j) r(i, j) = m(i, j);
    return r;
}

int sign(size_t k) { return k % 2 == 0 ? 1 : -1; }

}  // namespace

Expr euler_operator(const JetContext& ctx, const Expr& L, size_t alpha) {
    Expr E;
    for (const auto& [K, s] : jets_in(ctx, L, alpha)) {
        Expr t = ctx.iterated_derivative(diff(L, s), K);
        E += K.order() % 2 == 0 ? t : -t;
    }
    return E;
}

std::vector<Expr> euler_lagrange(const JetContext& ctx, const Expr& L) {
    std::vector<Expr> out;
    for (size_t a = 0; a < ctx.q(); ++a) out.push_back(euler_operator(ctx, L, a));
    return out;
}

Expr invariance_residual(const Infinitesimals& inf, size_t j, const Expr& L) {
    return prolonged_apply(inf, j, L) + L * inf.div_xi(j);
}

void check_invariance(const Infinitesimals& inf, const Expr& L) {
    for (size_t j = 0; j < inf.spec().r(); ++j) {
        Expr r = invariance_residual(inf, j, L);
        if (!is_zero(r)) throw NotInvariant(j, r);
    }
}

namespace {

mpz_class factorial(int n) {
    mpz_class f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

// prod_i (J_i + K_i)! / (J_i! K_i!)
mpz_class multi_binomial(const MultiIndex& J, const MultiIndex& K) {
    mpz_class b = 1;
    for (size_t i = 0; i < J.counts.size(); ++i)
        b *= factorial(J.counts[i] + K.counts[i]) / (factorial(J.counts[i]) * factorial(K.counts[i]));
    return b;
}

std::optional<MultiIndex> difference(const MultiIndex& big, const MultiIndex& small) {
    MultiIndex d = big;
    for (size_t i = 0; i < d.counts.size(); ++i) {
        d.counts[i] -= small.counts[i];
        if (d.counts[i] < 0) return std::nullopt;
    }
    return d;
}

}  // namespace

std::vector<std::pair<MultiIndex, Expr>> higher_euler(const JetContext& ctx, const Expr& L, size_t alpha) {
    auto jets = jets_in(ctx, L, alpha);
    std::vector<MultiIndex> Js;
    for (const auto& [K, s] : jets)
        for (int o = 1; o <= K.order(); ++o)
            for (auto& J : ctx.indices_of_order(o))
                if (difference(K, J) && std::find(Js.begin(), Js.end(), J) == Js.end()) Js.push_back(J);
    std::sort(Js.begin(), Js.end());
    std::vector<std::pair<MultiIndex, Expr>> out;
    for (const auto& J : Js) {
        Expr e;
        for (const auto& [JK, s] : jets) {
            auto K = difference(JK, J);
            if (!K) continue;
            Expr t = ctx.iterated_derivative(diff(L, s), *K) * Expr(mpq_class(multi_binomial(J, *K)));
            e += K->order() % 2 == 0 ? t : -t;
        }
        if (!e.is_zero()) out.emplace_back(J, e);
    }
    return out;
}

Matrix noether_laws(const Infinitesimals& inf, const Expr& L) {
    const auto& ctx = *inf.spec().ctx;
    const size_t p = base_p(ctx), r = inf.spec().r(), q = ctx.q();
    check_invariance(inf, L);
    std::vector<std::vector<std::pair<MultiIndex, Expr>>> EJ;
    for (size_t a = 0; a < q; ++a) EJ.push_back(higher_euler(ctx, L, a));

    // pr v_Q(L) = Q.E(L) + sum_{|J|>0} D_J(Q.E^J(L)); each D_J is split evenly over its letters
    Matrix C(r, p);
    for (size_t j = 0; j < r; ++j) {
        auto Q = characteristic(inf, j);
        for (size_t k = 0; k < p; ++k) C(j, k) = L * inf.xi(j, k);
        for (size_t a = 0; a < q; ++a)
            for (const auto& [J, e] : EJ[a]) {
                Expr inner = Q[a] * e;
                for (size_t k = 0; k < p; ++k) {
                    if (J.counts[k] == 0) continue;
                    Expr w(mpq_class(J.counts[k], J.order()));
                    C(j, k) += w * ctx.iterated_derivative(inner, *J.minus(k));
                }
            }
    }
    return C;
}

Matrix signed_laws(const Matrix& C) {
    Matrix S = C;
    for (size_t j = 0; j < C.rows(); ++j)
        for (size_t k = 1; k < C.cols(); k += 2) S(j, k) = -C(j, k);
    return S;
}

Expr divergence(const JetContext& ctx, const std::vector<Expr>& row) {
    Expr d;
    for (size_t k = 0; k < row.size(); ++k) d += ctx.total_derivative(row[k], k);
    return d;
}

std::vector<Expr> noether_residuals(const Infinitesimals& inf, const Expr& L, const Matrix& C) {
    const auto& ctx = *inf.spec().ctx;
    auto E = euler_lagrange(ctx, L);
    std::vector<Expr> out;
    for (size_t j = 0; j < C.rows(); ++j) {
        std::vector<Expr> row;
        for (size_t k = 0; k < C.cols(); ++k) row.push_back(C(j, k));
        Expr res = divergence(ctx, row);
        auto Q = characteristic(inf, j);
        for (size_t a = 0; a < Q.size(); ++a) res += Q[a] * E[a];
        out.push_back(res);
    }
    return out;
}

LawBundle structured_laws(const Frame& frame, const Matrix& C, int invariance_samples) {
    LawBundle b;
    if (C.rows() == 0) return b;
    const auto& spec = frame.spec();
    const size_t p = base_p(*spec.ctx);
    if (C.rows() != spec.r() || C.cols() != p) throw ShapeMismatch("law matrix must be r x p");
    Infinitesimals inf(spec);
    Matrix Ad = frame.at_frame(adjoint_rep(inf));
    b.C = C;
    b.AdInv = inverse(Ad);
    b.Minors = first_minors(base_block(frame.at_frame(frame.action().jacobian()), p));
    Matrix Minv;
    try {
        Minv = inverse(b.Minors);
    } catch (const SingularMatrix&) {
        throw SingularMinors("matrix of first minors of the frame Jacobian is singular");
    }
    b.V = Ad * signed_laws(C) * Minv;
    for (size_t j = 0; j < b.V.rows(); ++j)
        for (size_t k = 0; k < b.V.cols(); ++k)
            if (!b.V(j, k).is_zero() && !is_invariant(spec, b.V(j, k), invariance_samples))
                throw InvarianceFailed("entry (" + std::to_string(j) + "," + std::to_string(k) +
                                       ") of the vectors of invariants is not invariant");
    if (reassemble(b) != signed_laws(C)) throw InvarianceFailed("reassembled laws differ from the input");
    return b;
}

Matrix reassemble(const LawBundle& b) { return b.AdInv * b.V * b.Minors; }

Matrix invariant_characteristics(const Frame& frame, size_t alpha, const std::vector<MultiIndex>& rows) {
    Infinitesimals inf(frame.spec());
    return characteristic_matrix(inf, alpha, rows).map([&](const Expr& e) { return frame.invariantize(e); });
}

Matrix vectors_from_boundary(const Frame& frame, const Expr& Linv, const std::vector<Matrix>& Qinv,
                             const std::vector<Matrix>& Cvec) {
    const auto& spec = frame.spec();
    const size_t r = spec.r(), p = base_p(*spec.ctx);
    if (Qinv.size() != Cvec.size()) throw ShapeMismatch("one characteristic matrix per coefficient matrix");
    Infinitesimals inf(spec);
    Matrix V(r, p);
    for (size_t j = 0; j < r; ++j)
        for (size_t k = 0; k < p; ++k) V(j, k) = Linv * frame.invariantize(inf.xi(j, k));
    for (size_t a = 0; a < Qinv.size(); ++a) {
        if (Qinv[a].rows() != r || Qinv[a].cols() != Cvec[a].rows() || Cvec[a].cols() != p)
            throw ShapeMismatch("characteristic and coefficient matrices do not conform");
        V = V + Qinv[a] * Cvec[a];
    }
    for (size_t j = 0; j < r; ++j)
        for (size_t k = 1; k < p; k += 2) V(j, k) = -V(j, k);
    return V;
}

Matrix pform_action(const Matrix& J) {
    const size_t p = J.rows();
    Matrix inv;
    try {
        inv = inverse(J);
    } catch (const SingularMatrix&) {
        throw SingularJacobian("Jacobian of the base action is singular");
    }
    Expr d = det(J);
    Matrix Z(p, p);
    for (size_t k = 0; k < p; ++k)
        for (size_t l = 0; l < p; ++l) Z(k, l) = Expr(sign(k)) * d * inv(l, k);
    return Z;
}

Matrix pform_action_by_wedge(const Matrix& J) {
    const size_t p = J.rows();
    Matrix Z(p, p);
    for (size_t k = 0; k < p; ++k) {
        DiffForm w = DiffForm::function(p, Expr(1));
        for (size_t m = 0; m < p; ++m) {
            if (m == k) continue;
            std::vector<Expr> row;
            for (size_t l = 0; l < p; ++l) row.push_back(J(m, l));
            w = wedge(w, DiffForm::one_form(row));
        }
        for (size_t l = 0; l < p; ++l) {
            std::vector<size_t> idx;
            for (size_t m = 0; m < p; ++m)
                if (m != l) idx.push_back(m);
            Z(k, l) = Expr(sign(l)) * w.coeff(idx);
        }
    }
    return Z;
}

CheckReport equivariance_check(const Infinitesimals& inf, const Matrix& C, int samples, std::mt19937_64& rng) {
    CheckReport rep;
    const auto& spec = inf.spec();
    const size_t p = base_p(*spec.ctx);
    Matrix Ad = adjoint_rep(inf);
    for (int s = 0; s < samples; ++s) {
        Bindings g = random_group_element(spec, rng);
        ProlongedAction pa(specialize(spec, g));
        Matrix J = base_block(pa.jacobian(), p);
        Matrix W = inverse(J).transpose().map([&](const Expr& e) { return e * det(J); });
        Matrix lhs = C.map([&](const Expr& e) { return pa.transform(e); }) * W;
        Matrix rhs = substitute(Ad, g) * C;
        for (size_t j = 0; j < C.rows(); ++j)
            for (size_t k = 0; k < C.cols(); ++k)
                if (!is_zero(lhs(j, k) - rhs(j, k)))
                    rep.failures.push_back("sample " + std::to_string(s) + " entry (" + std::to_string(j) + "," +
                                           std::to_string(k) + ")");
        ++rep.samples;
    }
    return rep;
}

CheckReport adjoint_homomorphism_check(const GroupActionSpec& spec, const Matrix& Ad, int samples, std::mt19937_64& rng) {
    if (!spec.has_composition()) throw std::invalid_argument("the group has no composition law");
    CheckReport rep;
    for (int attempt = 0; rep.samples < samples && attempt < 10 * samples; ++attempt) {
        Bindings gb = random_group_element(spec, rng), hb = random_group_element(spec, rng);
        try {
            Bindings both = gb, prod;
            for (size_t k = 0; k < spec.r(); ++k) both[spec.hparams[k]] = hb.at(spec.params[k]);
            for (size_t k = 0; k < spec.r(); ++k) prod[spec.params[k]] = substitute(spec.product[k], both);
            Matrix lhs = substitute(Ad, gb) * substitute(Ad, hb);
            if (!(lhs == substitute(Ad, prod))) rep.failures.push_back("pair " + std::to_string(rep.samples));
            ++rep.samples;
        } catch (const DegenerateExpression&) {
        }
    }
    if (rep.samples < samples) rep.failures.push_back("too few regular samples");
    return rep;
}

CheckReport frame_equivariance_check(const Frame& frame, int samples, std::mt19937_64& rng) {
    CheckReport rep;
    const auto& spec = frame.spec();
    Infinitesimals inf(spec);
    Matrix Ad = adjoint_rep(inf);
    Matrix A = inverse(frame.at_frame(Ad));
    for (int s = 0; s < samples; ++s) {
        Bindings g = random_group_element(spec, rng);
        ProlongedAction pa(specialize(spec, g));
        Matrix lhs = A.map([&](const Expr& e) { return pa.transform(e); });
        Matrix rhs = substitute(Ad, g) * A;
        for (size_t i = 0; i < A.rows(); ++i)
            for (size_t j = 0; j < A.cols(); ++j)
                if (!is_zero(lhs(i, j) - rhs(i, j)))
                    rep.failures.push_back("sample " + std::to_string(s) + " entry (" + std::to_string(i) + "," +
                                           std::to_string(j) + ")");
        ++rep.samples;
    }
    return rep;
}

void divergence_check(const LawBundle& b, const Infinitesimals& inf, const Expr& L) {
    auto res = noether_residuals(inf, L, b.C);
    for (size_t j = 0; j < res.size(); ++j)
        if (!is_zero(res[j])) throw IdentityFailed("Noether identity fails for generator " + std::to_string(j), res[j]);
    if (b.empty()) return;
    Matrix S = signed_laws(b.C), R = reassemble(b);
    for (size_t j = 0; j < S.rows(); ++j)
        for (size_t k = 0; k < S.cols(); ++k)
            if (!is_zero(S(j, k) - R(j, k))) throw IdentityFailed("structured law does not reassemble", S(j, k) - R(j, k));
}

std::vector<Matrix> curvature_matrices(const InvariantCalculus& c, int invariance_samples) {
    const auto& f = c.frame();
    const auto& spec = f.spec();
    if (!spec.matrix_form) throw NotMatrixGroup("group has no matrix form");
    Matrix rho = f.at_frame(*spec.matrix_form);
    Matrix inv = inverse(rho).map([&](const Expr& e) { return f.reduce(e); });
    auto Dfull = [&](size_t i, const Expr& e) {
        Expr d = c.D(i, e);
        if (f.root()) {
            Expr rt(f.root()->s);
            Expr de = diff(e, f.root()->s);
            if (!de.is_zero()) d += de * c.D(i, f.root()->square) / (Expr(2) * rt);
        }
        return f.reduce(d);
    };
    std::vector<Matrix> out;
    for (size_t i = 0; i < c.ctx().p_base(); ++i) {
        Matrix Di = rho.map([&](const Expr& e) { return Dfull(i, e); });
        Matrix K = (Di * inv).map([&](const Expr& e) { return f.reduce(e); });
        for (size_t a = 0; a < K.rows(); ++a)
            for (size_t b = 0; b < K.cols(); ++b)
                if (!K(a, b).is_zero() && !is_invariant(spec, K(a, b), invariance_samples))
                    throw InvarianceFailed("curvature matrix entry is not invariant");
        out.push_back(std::move(K));
    }
    return out;
}

}  // namespace nf
