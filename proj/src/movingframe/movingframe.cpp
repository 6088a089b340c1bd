#include "nframes/movingframe.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace nf {

namespace {

// random rational values for every symbol of the given expressions
std::map<Symbol, mpq_class> random_values(const std::vector<Expr>& es, std::mt19937_64& g) {
    std::map<Symbol, mpq_class> v;
    std::function<void(const Expr&)> walk = [&](const Expr& e) {
        for (auto id : e.symbols()) {
            Symbol s{id};
            if (!v.count(s)) v[s] = random_rational(g);
            if (const OpaqueInfo* op = opaque_info(s))
                for (const auto& a : op->args) walk(a);
        }
    };
    for (const auto& e : es) walk(e);
    return v;
}

size_t weight(const Poly& p) { return p.nterms(); }

}  // namespace

Symbol root_symbol() { return symbol("rt", SymbolKind::constant); }

Frame::Frame(const GroupActionSpec& spec, NormalizationSpec norm, std::vector<Expr> rho, std::optional<FrameRoot> root)
    : pa_(std::make_shared<ProlongedAction>(spec)), norm_(std::move(norm)), rho_(std::move(rho)), root_(std::move(root)) {
    for (size_t j = 0; j < spec.r(); ++j) bind_[spec.params[j]] = rho_.at(j);
    Bindings free = bind_;
    for (const auto& [s, e] : spec.eliminated) bind_[s] = reduce(substitute(e, free));
    std::set<Expr, std::function<bool(const Expr&, const Expr&)>> seen(
        [](const Expr& a, const Expr& b) { return to_string(a) < to_string(b); });
    for (const auto& r : rho_)
        if (!r.den().is_const()) seen.insert(Expr::from_poly(r.den()));
    conditions_.assign(seen.begin(), seen.end());
}

Expr Frame::reduce(const Expr& e) const { return root_ ? reduce_root(e, root_->s, root_->square) : e; }

Matrix Frame::at_frame(const Matrix& m) const {
    return m.map([this](const Expr& e) { return at_frame(e); });
}

Expr Frame::invariant(size_t alpha, const MultiIndex& K) const {
    auto key = std::make_pair(alpha, K.counts);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    Expr r = at_frame(pa_->transformed(alpha, K));
    memo_.emplace(key, r);
    return r;
}

Expr Frame::invariant_independent(size_t i) const { return at_frame(spec().x_tilde(i)); }

Expr Frame::invariantize(const Expr& e) const {
    const auto& ctx = *spec().ctx;
    Bindings b;
    for (auto id : e.symbols()) {
        Symbol s{id};
        if (auto i = ctx.independent_index(s)) {
            b[s] = invariant_independent(*i);
        } else if (auto j = ctx.jet_info(s)) {
            b[s] = invariant(j->alpha, j->K);
        } else if (const OpaqueInfo* op = opaque_info(s)) {
            std::vector<Expr> args;
            for (const auto& a : op->args) args.push_back(invariantize(a));
            b[s] = Expr(opaque_atom(op->fn, args, op->dcount));
        }
    }
    return substitute(e, b);
}

std::vector<Expr> normalization_residuals(const ProlongedAction& pa, const NormalizationSpec& norm) {
    std::vector<Expr> out;
    for (const auto& eq : norm.eqs) out.push_back(pa.transform(eq.lhs) - eq.value);
    return out;
}

Frame verify_frame(const GroupActionSpec& spec, const NormalizationSpec& norm, const std::vector<Expr>& rho,
                   std::optional<FrameRoot> root) {
    if (rho.size() != spec.r()) throw VerificationFailed("frame has the wrong number of parameters");
    Frame f(spec, norm, rho, std::move(root));
    for (const auto& eq : norm.eqs) {
        Expr r;
        try {
            r = f.invariantize(eq.lhs) - eq.value;
        } catch (const DegenerateExpression&) {
            throw VerificationFailed("frame makes a normalization equation degenerate");
        }
        if (!is_zero(r)) throw VerificationFailed("frame does not satisfy " + to_string(eq.lhs) + " = " + to_string(eq.value));
    }
    return f;
}

namespace {

void check_independent(const GroupActionSpec& spec, const std::vector<Expr>& E) {
    const size_t r = spec.r();
    auto id = spec.identity_bindings();
    std::vector<Expr> jac;
    for (const auto& e : E)
        for (size_t j = 0; j < r; ++j) jac.push_back(substitute(diff(e, spec.params[j]), id));
    std::mt19937_64 g(sampling_seed() ^ 0x5eedULL);
    for (int attempt = 0; attempt < 8; ++attempt) {
        auto vals = random_values(jac, g);
        QMatrix m(E.size(), std::vector<mpq_class>(r));
        try {
            for (size_t i = 0; i < E.size(); ++i)
                for (size_t j = 0; j < r; ++j) m[i][j] = evaluate(jac[i * r + j], vals);
        } catch (const DegenerateExpression&) {
            continue;
        }
        if (rank(m) == r) return;
    }
    throw NotSolvable("normalization equations are not functionally independent at a generic point");
}

struct Search {
    const GroupActionSpec& spec;
    const SolveOptions& opts;
    int steps = 0;
    std::optional<FrameRoot> root;

    Expr red(const Expr& e) const { return root ? reduce_root(e, root->s, root->square) : e; }

    std::optional<Bindings> run(std::vector<Expr> eqs, Bindings sol, std::vector<Symbol> unknown) {
        if (++steps > opts.max_steps) return std::nullopt;
        std::vector<Expr> live;
        for (auto& e : eqs) {
            if (e.is_zero()) continue;
            bool has_unknown = std::any_of(unknown.begin(), unknown.end(), [&](Symbol s) { return e.num().has_var(s.id); });
            if (!has_unknown) {
                if (!is_zero(e)) return std::nullopt;
                continue;
            }
            live.push_back(e);
        }
        if (unknown.empty()) return sol;
        if (live.empty()) return std::nullopt;

        struct Cand {
            size_t eq;
            Symbol a;
            bool coupled;
            size_t w;
            size_t rank;  // ties: eliminate later parameters first
        };
        std::vector<Cand> cands;
        std::vector<Symbol> allowed = unknown;
        if (!opts.order.empty()) {
            for (auto k : opts.order) {
                Symbol s = spec.params.at(k);
                if (std::find(unknown.begin(), unknown.end(), s) != unknown.end()) {
                    allowed = {s};
                    break;
                }
            }
        }
        for (size_t i = 0; i < live.size(); ++i) {
            const Poly& n = live[i].num();
            for (Symbol a : allowed) {
                if (n.degree(a.id) != 1) continue;
                auto c = coeffs_in(n, a.id);
                bool coupled = std::any_of(unknown.begin(), unknown.end(),
                                           [&](Symbol s) { return s != a && c[1].has_var(s.id); });
                size_t rank = std::find(spec.params.begin(), spec.params.end(), a) - spec.params.begin();
                cands.push_back({i, a, coupled, weight(c[0]) + weight(c[1]), rank});
            }
        }
        std::stable_sort(cands.begin(), cands.end(), [](const Cand& x, const Cand& y) {
            if (x.coupled != y.coupled) return !x.coupled;
            if (x.w != y.w) return x.w < y.w;
            return x.rank > y.rank;
        });
        if (cands.size() > 4) cands.resize(4);
        auto free_of_unknowns = [&](const Poly& p) {
            return std::none_of(unknown.begin(), unknown.end(), [&](Symbol s) { return p.has_var(s.id); });
        };
        for (const auto& c : cands) {
            auto co = coeffs_in(live[c.eq].num(), c.a.id);
            Expr val = red(-Expr::from_poly(co[0]) / Expr::from_poly(co[1]));
            if (auto r = step(live, c.eq, sol, unknown, c.a, val)) return r;
            if (steps > opts.max_steps) return std::nullopt;
        }
        // a parameter fixed only up to sign: adjoin a root
        if (cands.empty() && !root) {
            for (size_t i = 0; i < live.size(); ++i)
                for (Symbol a : allowed) {
                    const Poly& n = live[i].num();
                    if (n.degree(a.id) != 2) continue;
                    auto co = coeffs_in(n, a.id);
                    if (!co[1].is_zero() || !free_of_unknowns(co[0]) || !free_of_unknowns(co[2])) continue;
                    root = FrameRoot{root_symbol(), -Expr::from_poly(co[0]) / Expr::from_poly(co[2])};
                    if (auto r = step(live, i, sol, unknown, a, Expr(root->s))) return r;
                    root.reset();
                }
        }
        return std::nullopt;
    }

    std::optional<Bindings> step(const std::vector<Expr>& live, size_t used, const Bindings& sol,
                                 const std::vector<Symbol>& unknown, Symbol a, const Expr& val) {
        Bindings one{{a, val}};
        try {
            std::vector<Expr> next;
            for (size_t i = 0; i < live.size(); ++i)
                if (i != used) next.push_back(red(substitute(live[i], one)));
            Bindings s2;
            for (auto& [k, v] : sol) s2[k] = red(substitute(v, one));
            s2[a] = val;
            std::vector<Symbol> u2;
            for (auto s : unknown)
                if (s != a) u2.push_back(s);
            return run(std::move(next), std::move(s2), std::move(u2));
        } catch (const DegenerateExpression&) {
            return std::nullopt;
        }
    }
};

}  // namespace

Frame solve_frame(const GroupActionSpec& spec, const NormalizationSpec& norm, const SolveOptions& opts) {
    if (norm.eqs.size() != spec.r())
        throw NotSolvable("need exactly " + std::to_string(spec.r()) + " normalization equations, got " +
                          std::to_string(norm.eqs.size()));
    if (opts.supplied && opts.prefer_supplied) return verify_frame(spec, norm, *opts.supplied, opts.supplied_root);
    ProlongedAction pa(spec);
    auto E = normalization_residuals(pa, norm);
    check_independent(spec, E);
    Search s{spec, opts};
    auto sol = s.run(E, {}, spec.params);
    if (!sol) {
        if (opts.supplied) return verify_frame(spec, norm, *opts.supplied, opts.supplied_root);
        throw NotSolvable("normalization equations are outside the affine elimination class; supply a frame");
    }
    std::vector<Expr> rho;
    for (auto p : spec.params) rho.push_back(sol->at(p));
    return verify_frame(spec, norm, rho, s.root);
}

GroupActionSpec specialize(const GroupActionSpec& spec, const Bindings& values) {
    GroupActionSpec s = spec;
    for (auto& e : s.xt) e = substitute(e, values);
    for (auto& e : s.ut) e = substitute(e, values);
    s.eliminated.clear();
    return s;
}

Bindings random_group_element(const GroupActionSpec& spec, std::mt19937_64& g) {
    for (;;) {
        std::vector<Expr> v;
        for (size_t j = 0; j < spec.r(); ++j) v.push_back(Expr(random_rational(g)));
        Bindings b = spec.at(v);
        try {
            for (const auto& [s, e] : spec.eliminated) substitute(e, b);
            for (const auto& e : spec.xt) substitute(e, b);
        } catch (const DegenerateExpression&) {
            continue;
        }
        return b;
    }
}

bool is_invariant(const GroupActionSpec& spec, const Expr& e, int group_samples) {
    std::mt19937_64 g(sampling_seed() + 0x1417ULL);
    int done = 0;
    for (int attempt = 0; done < group_samples && attempt < 10 * group_samples; ++attempt) {
        Bindings b = random_group_element(spec, g);
        try {
            ProlongedAction pa(specialize(spec, b));
            if (!is_zero(pa.transform(e) - e)) return false;
            ++done;
        } catch (const SingularJacobian&) {
        }
    }
    return done == group_samples;
}

}  // namespace nf
