#include "nframes/groupaction.hpp"

#include <random>

namespace nf {

void GroupActionSpec::finalize() {
    if (eliminated.empty()) return;
    for (auto& e : xt) e = substitute(e, eliminated);
    for (auto& e : ut) e = substitute(e, eliminated);
    if (matrix_form) *matrix_form = substitute(*matrix_form, eliminated);
}

Bindings GroupActionSpec::identity_bindings() const {
    Bindings b;
    for (size_t j = 0; j < params.size(); ++j) b[params[j]] = Expr(identity[j]);
    return b;
}

Bindings GroupActionSpec::at(const std::vector<Expr>& values) const {
    Bindings b;
    for (size_t j = 0; j < params.size(); ++j) b[params[j]] = values.at(j);
    return b;
}

Expr GroupActionSpec::x_tilde(size_t i) const {
    if (i < xt.size()) return xt[i];
    return Expr(ctx->independent(i));
}

ProlongedAction::ProlongedAction(const GroupActionSpec& spec) : spec_(spec) {
    const auto& ctx = *spec_.ctx;
    const size_t p = ctx.p();
    jac_ = Matrix(p, p);
    for (size_t i = 0; i < p; ++i)
        for (size_t k = 0; k < p; ++k) jac_(i, k) = ctx.total_derivative(spec_.x_tilde(i), k);
    try {
        jac_inv_t_ = inverse(jac_).transpose();
    } catch (const SingularMatrix&) {
        throw SingularJacobian("the Jacobian d x~/d x is identically singular");
    }
}

Expr ProlongedAction::tilde_derivative(const Expr& e, size_t i) const {
    const auto& ctx = *spec_.ctx;
    Expr r;
    for (size_t k = 0; k < ctx.p(); ++k) {
        if (jac_inv_t_(i, k).is_zero()) continue;
        Expr d = ctx.total_derivative(e, k);
        if (!d.is_zero()) r += jac_inv_t_(i, k) * d;
    }
    return r;
}

Expr ProlongedAction::transformed(size_t alpha, const MultiIndex& K) const {
    if (K.order() == 0) return spec_.ut.at(alpha);
    auto key = std::make_pair(alpha, K.counts);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    size_t i = K.counts.size();
    while (K.counts[i - 1] == 0) --i;
    --i;
    Expr r = tilde_derivative(transformed(alpha, *K.minus(i)), i);
    memo_.emplace(key, r);
    return r;
}

void ProlongedAction::prolong_to(int order) const {
    const auto& ctx = *spec_.ctx;
    for (int o = 1; o <= order; ++o)
        for (size_t a = 0; a < ctx.q(); ++a)
            for (auto& K : ctx.indices_of_order(o)) transformed(a, K);
}

Expr ProlongedAction::transform(const Expr& e) const {
    const auto& ctx = *spec_.ctx;
    Bindings b;
    for (auto id : e.symbols()) {
        Symbol s{id};
        if (auto i = ctx.independent_index(s)) {
            b[s] = spec_.x_tilde(*i);
        } else if (auto j = ctx.jet_info(s)) {
            b[s] = transformed(j->alpha, j->K);
        } else if (const OpaqueInfo* op = opaque_info(s)) {
            std::vector<Expr> args;
            for (const auto& a : op->args) args.push_back(transform(a));
            b[s] = Expr(opaque_atom(op->fn, args, op->dcount));
        }
    }
    return substitute(e, b);
}

ProlongedAction prolong(const GroupActionSpec& spec, int order) {
    ProlongedAction pa(spec);
    pa.prolong_to(order);
    return pa;
}

Infinitesimals::Infinitesimals(const GroupActionSpec& spec) : spec_(spec), pa_(spec) {
    const auto& ctx = *spec_.ctx;
    auto id = spec_.identity_bindings();
    xi_.resize(spec_.r());
    for (size_t j = 0; j < spec_.r(); ++j)
        for (size_t i = 0; i < ctx.p(); ++i)
            xi_[j].push_back(i < spec_.xt.size() ? substitute(diff(spec_.xt[i], spec_.params[j]), id) : Expr());
}

Expr Infinitesimals::phi(size_t j, size_t alpha, const MultiIndex& K) const {
    auto key = std::make_tuple(j, alpha, K.counts);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    Expr r = substitute(diff(pa_.transformed(alpha, K), spec_.params.at(j)), spec_.identity_bindings());
    memo_.emplace(key, r);
    return r;
}

std::vector<Expr> Infinitesimals::base_field(size_t j) const {
    const auto& ctx = *spec_.ctx;
    std::vector<Expr> f;
    for (size_t i = 0; i < ctx.p_base(); ++i) f.push_back(xi(j, i));
    for (size_t a = 0; a < ctx.q(); ++a) f.push_back(phi(j, a, MultiIndex(ctx.p())));
    return f;
}

Expr Infinitesimals::div_xi(size_t j) const {
    const auto& ctx = *spec_.ctx;
    Expr d;
    for (size_t i = 0; i < ctx.p(); ++i) d += ctx.total_derivative(xi(j, i), i);
    return d;
}

Expr Infinitesimals::phi_by_formula(size_t j, size_t alpha, const MultiIndex& K) const {
    const auto& ctx = *spec_.ctx;
    Expr r = ctx.iterated_derivative(characteristic(*this, j).at(alpha), K);
    for (size_t i = 0; i < ctx.p(); ++i)
        if (!xi(j, i).is_zero()) r += xi(j, i) * ctx.jet_expr(alpha, K.plus(i));
    return r;
}

Expr prolonged_apply(const Infinitesimals& inf, size_t j, const Expr& F) {
    const auto& ctx = *inf.spec().ctx;
    Expr r;
    for (size_t i = 0; i < ctx.p(); ++i)
        if (!inf.xi(j, i).is_zero()) r += inf.xi(j, i) * diff(F, ctx.independent(i));
    for (size_t a = 0; a < ctx.q(); ++a)
        for (const auto& [K, s] : jets_in(ctx, F, a)) {
            Expr phi = inf.phi(j, a, K);
            if (!phi.is_zero()) r += phi * diff(F, s);
        }
    return r;
}

std::vector<Expr> characteristic(const Infinitesimals& inf, size_t j) {
    const auto& ctx = *inf.spec().ctx;
    std::vector<Expr> Q;
    for (size_t a = 0; a < ctx.q(); ++a) {
        Expr q = inf.phi(j, a, MultiIndex(ctx.p()));
        for (size_t i = 0; i < ctx.p(); ++i)
            if (!inf.xi(j, i).is_zero()) q -= ctx.jet_expr(a, MultiIndex(ctx.p()).plus(i)) * inf.xi(j, i);
        Q.push_back(q);
    }
    return Q;
}

Matrix characteristic_matrix(const Infinitesimals& inf, size_t alpha, const std::vector<MultiIndex>& rows) {
    const auto& ctx = *inf.spec().ctx;
    const size_t r = inf.spec().r();
    Matrix m(r, rows.size());
    for (size_t j = 0; j < r; ++j) {
        Expr q = characteristic(inf, j).at(alpha);
        for (size_t k = 0; k < rows.size(); ++k) m(j, k) = ctx.iterated_derivative(q, rows[k]);
    }
    return m;
}

Matrix adjoint_rep(const Infinitesimals& inf) {
    const auto& spec = inf.spec();
    const auto& ctx = *spec.ctx;
    const size_t pb = ctx.p_base(), q = ctx.q(), n = pb + q, r = spec.r();
    std::vector<Symbol> z;
    std::vector<Expr> zt;
    for (size_t i = 0; i < pb; ++i) {
        z.push_back(ctx.independent(i));
        zt.push_back(spec.xt[i]);
    }
    for (size_t a = 0; a < q; ++a) {
        z.push_back(ctx.u(a).as_symbol());
        zt.push_back(spec.ut[a]);
    }
    Matrix P(n, n);
    for (size_t m = 0; m < n; ++m)
        for (size_t k = 0; k < n; ++k) P(m, k) = diff(zt[m], z[k]);
    Matrix Pit;
    try {
        Pit = inverse(P).transpose();
    } catch (const SingularMatrix&) {
        throw SingularJacobian("the Jacobian of the base action is singular");
    }
    Bindings at_tilde;
    for (size_t m = 0; m < n; ++m) at_tilde[z[m]] = zt[m];
    std::vector<std::vector<Expr>> V(r), W(r);
    for (size_t j = 0; j < r; ++j) {
        V[j] = inf.base_field(j);
        std::vector<Expr> moved;
        for (auto& e : V[j]) moved.push_back(substitute(e, at_tilde));
        for (size_t k = 0; k < n; ++k) {
            Expr s;
            for (size_t m = 0; m < n; ++m)
                if (!moved[m].is_zero() && !Pit(m, k).is_zero()) s += moved[m] * Pit(m, k);
            W[j].push_back(s);
        }
    }
    // sample the generators at rational points to get a square solvable system
    std::mt19937_64 g(0xad01ULL);
    QMatrix A;
    std::vector<std::vector<Expr>> rhs(r);
    for (int sample = 0; sample < 40 && (A.empty() || rank(A) < r || sample < 3); ++sample) {
        std::map<Symbol, mpq_class> pt;
        Bindings ptb;
        for (auto s : z) {
            pt[s] = random_rational(g);
            ptb[s] = Expr(pt[s]);
        }
        std::vector<std::vector<Expr>> wrow(r);
        try {
            for (size_t j = 0; j < r; ++j)
                for (size_t k = 0; k < n; ++k) wrow[j].push_back(substitute(W[j][k], ptb));
        } catch (const DegenerateExpression&) {
            continue;
        }
        for (size_t k = 0; k < n; ++k) {
            std::vector<mpq_class> row;
            for (size_t l = 0; l < r; ++l) row.push_back(evaluate(V[l][k], pt));
            A.push_back(row);
            for (size_t j = 0; j < r; ++j) rhs[j].push_back(wrow[j][k]);
        }
    }
    Matrix Ad(r, r);
    for (size_t j = 0; j < r; ++j) {
        auto sol = solve_overdetermined(A, rhs[j]);
        if (!sol) throw GeneratorsNotIndependent("infinitesimal generators are linearly dependent");
        for (size_t l = 0; l < r; ++l) Ad(j, l) = (*sol)[l];
        for (size_t k = 0; k < n; ++k) {
            Expr s = -W[j][k];
            for (size_t l = 0; l < r; ++l) s += Ad(j, l) * V[l][k];
            if (!is_zero(s)) throw GeneratorsNotIndependent("transformed generator is not in the span of the generators");
        }
    }
    return Ad;
}

}  // namespace nf
