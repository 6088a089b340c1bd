#include "nframes/invariantcalc.hpp"

#include <algorithm>

namespace nf {

InvariantCalculus::InvariantCalculus(Frame frame) : frame_(std::move(frame)), inf_(frame_.spec()) {
    const auto& pa = frame_.action();
    jac_ = frame_.at_frame(pa.jacobian());
    Matrix F = frame_.at_frame(pa.jacobian_inv_t());
    for (size_t i = 0; i < F.rows(); ++i) {
        TotalVectorField v;
        for (size_t k = 0; k < F.cols(); ++k) v.coeffs.push_back(F(i, k));
        ops_.push_back(std::move(v));
    }
}

Expr InvariantCalculus::D(const std::vector<size_t>& word, const Expr& e) const {
    Expr r = e;
    for (auto it = word.rbegin(); it != word.rend(); ++it) r = D(*it, r);
    return r;
}

std::pair<Expr, Expr> InvariantCalculus::invariant_derivative(size_t alpha, const MultiIndex& K, size_t j) const {
    Expr d = D(j, frame_.invariant(alpha, K));
    return {d, d - frame_.invariant(alpha, K.plus(j))};
}

std::pair<Expr, Expr> InvariantCalculus::independent_derivative(size_t i, size_t j) const {
    Expr d = D(j, frame_.invariant_independent(i));
    return {d, d - Expr(i == j ? 1 : 0)};
}

CorrectionData correction_matrix(const InvariantCalculus& c) {
    const auto& f = c.frame();
    const auto& eqs = f.normalization().eqs;
    const size_t r = f.spec().r(), p = c.p();
    Matrix Phi(r, r), B(p, r);
    for (size_t m = 0; m < r; ++m) {
        for (size_t l = 0; l < r; ++l) Phi(m, l) = f.invariantize(prolonged_apply(c.infinitesimals(), l, eqs[m].lhs));
        for (size_t j = 0; j < p; ++j) B(j, m) = f.invariantize(c.ctx().total_derivative(eqs[m].lhs, j));
    }
    Matrix K;
    try {
        K = -(B * inverse(Phi).transpose());
    } catch (const SingularMatrix&) {
        throw BasisSolveFailed("phantom equations do not determine the correction matrix");
    }
    Matrix N(p, p);
    for (size_t i = 0; i < p; ++i)
        for (size_t j = 0; j < p; ++j) {
            Expr s;
            for (size_t l = 0; l < r; ++l) s += K(j, l) * f.invariantize(c.infinitesimals().xi(l, i));
            N(i, j) = s;
        }
    return {K, N};
}

Expr correction_M(const InvariantCalculus& c, const CorrectionData& k, size_t alpha, const MultiIndex& K, size_t j) {
    Expr s;
    for (size_t l = 0; l < k.K.cols(); ++l)
        if (!k.K(j, l).is_zero()) s += k.K(j, l) * c.frame().invariantize(c.infinitesimals().phi(l, alpha, K));
    return s;
}

CommutatorTensor commutator_tensor(const InvariantCalculus& c) {
    const size_t p = c.p();
    if (is_zero(det(c.jacobian()))) throw BasisSolveFailed("invariant operators are not independent");
    const auto& ops = c.operators();
    CommutatorTensor A(p, Matrix(p, p));
    for (size_t i = 0; i < p; ++i)
        for (size_t j = i + 1; j < p; ++j) {
            std::vector<Expr> br(p);
            for (size_t m = 0; m < p; ++m) br[m] = c.D(i, ops[j].coeffs[m]) - c.D(j, ops[i].coeffs[m]);
            for (size_t k = 0; k < p; ++k) {
                Expr s;
                for (size_t m = 0; m < p; ++m)
                    if (!br[m].is_zero()) s += br[m] * c.jacobian()(k, m);
                A[k](i, j) = s;
                A[k](j, i) = -s;
            }
        }
    return A;
}

CommutatorTensor commutator_tensor_formula(const InvariantCalculus& c, const CorrectionData& k) {
    const size_t p = c.p(), r = k.K.cols();
    const auto& inf = c.infinitesimals();
    // Xi[kk][l](i)
    std::vector<std::vector<std::vector<Expr>>> Xi(p, std::vector<std::vector<Expr>>(r, std::vector<Expr>(p)));
    for (size_t kk = 0; kk < p; ++kk)
        for (size_t l = 0; l < r; ++l)
            for (size_t i = 0; i < p; ++i) Xi[kk][l][i] = c.frame().invariantize(c.ctx().total_derivative(inf.xi(l, kk), i));
    CommutatorTensor A(p, Matrix(p, p));
    for (size_t kk = 0; kk < p; ++kk)
        for (size_t i = 0; i < p; ++i)
            for (size_t j = 0; j < p; ++j) {
                Expr s;
                for (size_t l = 0; l < r; ++l) s += k.K(j, l) * Xi[kk][l][i] - k.K(i, l) * Xi[kk][l][j];
                A[kk](i, j) = s;
            }
    return A;
}

// --- forms --------------------------------------------------------------------

DiffForm DiffForm::function(size_t p, const Expr& f) {
    DiffForm w{p, {}};
    if (!f.is_zero()) w.terms[{}] = f;
    return w;
}

DiffForm DiffForm::one_form(const std::vector<Expr>& coeffs) {
    DiffForm w{coeffs.size(), {}};
    for (size_t i = 0; i < coeffs.size(); ++i)
        if (!coeffs[i].is_zero()) w.terms[{i}] = coeffs[i];
    return w;
}

bool DiffForm::is_zero() const {
    return std::all_of(terms.begin(), terms.end(), [](const auto& t) { return nf::is_zero(t.second); });
}

Expr DiffForm::coeff(const std::vector<size_t>& idx) const {
    auto it = terms.find(idx);
    return it == terms.end() ? Expr() : it->second;
}

namespace {

void add_term(DiffForm& w, const std::vector<size_t>& idx, const Expr& c) {
    if (c.is_zero()) return;
    auto it = w.terms.find(idx);
    if (it == w.terms.end()) {
        w.terms.emplace(idx, c);
        return;
    }
    it->second += c;
    if (it->second.is_zero()) w.terms.erase(it);
}

// sort the index list; returns the sign of the permutation, 0 on a repeat
int canonical(std::vector<size_t>& idx) {
    int sign = 1;
    for (size_t i = 0; i < idx.size(); ++i)
        for (size_t j = 0; j + 1 < idx.size() - i; ++j) {
            if (idx[j] == idx[j + 1]) return 0;
            if (idx[j] > idx[j + 1]) {
                std::swap(idx[j], idx[j + 1]);
                sign = -sign;
            }
        }
    for (size_t j = 0; j + 1 < idx.size(); ++j)
        if (idx[j] == idx[j + 1]) return 0;
    return sign;
}

}  // namespace

DiffForm operator+(const DiffForm& a, const DiffForm& b) {
    DiffForm w = a;
    w.p = std::max(a.p, b.p);
    for (const auto& [k, v] : b.terms) add_term(w, k, v);
    return w;
}

DiffForm operator-(const DiffForm& a, const DiffForm& b) { return a + Expr(-1) * b; }

DiffForm operator*(const Expr& f, const DiffForm& a) {
    DiffForm w{a.p, {}};
    for (const auto& [k, v] : a.terms) add_term(w, k, f * v);
    return w;
}

DiffForm wedge(const DiffForm& a, const DiffForm& b) {
    DiffForm w{std::max(a.p, b.p), {}};
    for (const auto& [ka, va] : a.terms)
        for (const auto& [kb, vb] : b.terms) {
            std::vector<size_t> idx = ka;
            idx.insert(idx.end(), kb.begin(), kb.end());
            int s = canonical(idx);
            if (s != 0) add_term(w, idx, Expr(s) * va * vb);
        }
    return w;
}

DiffForm exterior_derivative(const JetContext& ctx, const DiffForm& w) {
    DiffForm out{w.p, {}};
    for (const auto& [k, v] : w.terms)
        for (size_t i = 0; i < w.p; ++i) {
            std::vector<size_t> idx{i};
            idx.insert(idx.end(), k.begin(), k.end());
            int s = canonical(idx);
            if (s != 0) add_term(out, idx, Expr(s) * ctx.total_derivative(v, i));
        }
    return out;
}

DiffForm interior(const TotalVectorField& v, const DiffForm& w) {
    DiffForm out{w.p, {}};
    for (const auto& [k, c] : w.terms)
        for (size_t s = 0; s < k.size(); ++s) {
            const Expr& f = v.coeffs.at(k[s]);
            if (f.is_zero()) continue;
            std::vector<size_t> idx = k;
            idx.erase(idx.begin() + static_cast<long>(s));
            add_term(out, idx, Expr(s % 2 == 0 ? 1 : -1) * f * c);
        }
    return out;
}

DiffForm lie_derivative(const JetContext& ctx, const TotalVectorField& v, const DiffForm& w) {
    return exterior_derivative(ctx, interior(v, w)) + interior(v, exterior_derivative(ctx, w));
}

std::string to_string(const DiffForm& w, const JetContext& ctx) {
    if (w.terms.empty()) return "0";
    std::string s;
    for (const auto& [k, c] : w.terms) {
        if (!s.empty()) s += " + ";
        s += "(" + to_string(c) + ")";
        for (size_t n = 0; n < k.size(); ++n) s += (n == 0 ? " d" : "^d") + ctx.independent_name(k[n]);
    }
    return s;
}

std::vector<DiffForm> invariant_one_forms(const InvariantCalculus& c) {
    std::vector<DiffForm> out;
    for (size_t i = 0; i < c.p(); ++i) {
        std::vector<Expr> row;
        for (size_t j = 0; j < c.p(); ++j) row.push_back(c.jacobian()(i, j));
        out.push_back(DiffForm::one_form(row));
    }
    return out;
}

DiffForm lie_derivative_form(const InvariantCalculus& c, size_t i, const DiffForm& w) {
    return lie_derivative(c.ctx(), c.operators().at(i), w);
}

std::vector<Expr> in_invariant_basis(const InvariantCalculus& c, const DiffForm& w) {
    std::vector<Expr> out;
    for (size_t k = 0; k < c.p(); ++k) {
        DiffForm v = interior(c.operators()[k], w);
        out.push_back(v.coeff({}));
    }
    return out;
}

// --- syzygies -------------------------------------------------------------------

Expr apply(const InvariantCalculus& c, const OpPoly& h, const Expr& arg) {
    Expr r;
    for (const auto& t : h) r += t.coeff * c.D(t.word, arg);
    return r;
}

std::vector<std::vector<OpPoly>> syzygy(const InvariantCalculus& c, const std::vector<Expr>& generators) {
    const auto& ctx = c.ctx();
    if (!ctx.has_dummy()) throw std::invalid_argument("syzygies need the dummy independent");
    const size_t t = ctx.dummy_index(), q = ctx.q();
    const auto& f = c.frame();
    std::vector<std::vector<OpPoly>> H;
    std::map<std::pair<size_t, std::vector<size_t>>, Expr> applied;
    auto T = [&](size_t beta, const std::vector<size_t>& w) -> const Expr& {
        auto key = std::make_pair(beta, w);
        auto it = applied.find(key);
        if (it == applied.end()) it = applied.emplace(key, c.D(w, f.invariant(beta, MultiIndex::of(ctx.p(), {t})))).first;
        return it->second;
    };
    for (const auto& kappa : generators) {
        std::vector<OpPoly> row(q);
        Expr E = c.D(t, kappa);
        const int bound = 2 * std::max(ctx.order_of(kappa), 1) + 2;
        for (int round = 0;; ++round) {
            if (round > bound) throw RewriteNotTerminating("syzygy rewriting exceeded its order bound");
            int top = -1;
            for (size_t b = 0; b < q; ++b)
                for (const auto& [K, s] : jets_in(ctx, E, b)) {
                    if (K.counts[t] == 0) continue;
                    if (K.counts[t] > 1) throw RewriteNotTerminating("expression is not linear in first tau-derivatives");
                    top = std::max(top, K.order() - 1);
                }
            if (top < 0) break;
            std::vector<MultiIndex> Ls;
            for (auto& L : ctx.indices_of_order(top))
                if (L.counts[t] == 0) Ls.push_back(L);
            for (size_t b = 0; b < q; ++b) {
                std::vector<Expr> rhs;
                bool any = false;
                for (auto& L : Ls) {
                    rhs.push_back(diff(E, ctx.jet(b, L.plus(t))));
                    any = any || !rhs.back().is_zero();
                }
                if (!any) continue;
                Matrix lam(Ls.size(), Ls.size());
                for (size_t w = 0; w < Ls.size(); ++w)
                    for (size_t l = 0; l < Ls.size(); ++l) lam(w, l) = diff(T(b, Ls[w].as_list()), ctx.jet(b, Ls[l].plus(t)));
                Matrix inv;
                try {
                    inv = inverse(lam);
                } catch (const SingularMatrix&) {
                    throw RewriteNotTerminating("leading terms of the operator words are dependent");
                }
                for (size_t w = 0; w < Ls.size(); ++w) {
                    Expr cw;
                    for (size_t l = 0; l < Ls.size(); ++l) cw += rhs[l] * inv(l, w);
                    if (cw.is_zero()) continue;
                    E -= cw * T(b, Ls[w].as_list());
                    row[b].push_back({Ls[w].as_list(), cw});
                }
            }
        }
        if (!is_zero(E)) throw RewriteNotTerminating("remainder is not expressible through the tau-invariants");
        for (auto& r : row)
            std::sort(r.begin(), r.end(), [](const OpTerm& a, const OpTerm& b) {
                if (a.word.size() != b.word.size()) return a.word.size() > b.word.size();
                return a.word < b.word;
            });
        H.push_back(std::move(row));
    }
    return H;
}

Expr dummy_commutator_residual(const InvariantCalculus& c, const CommutatorTensor& A, const std::vector<size_t>& K,
                               const Expr& f) {
    const size_t t = c.ctx().dummy_index(), m = K.size();
    Expr lhs = c.D(t, c.D(K, f));
    Expr rhs = c.D(K, c.D(t, f));
    for (size_t l = 0; l < m; ++l) {
        std::vector<size_t> head(K.begin(), K.begin() + static_cast<long>(l));
        std::vector<size_t> tail(K.begin() + static_cast<long>(l) + 1, K.end());
        Expr inner = c.D(tail, f);
        Expr mid;
        for (size_t n = 0; n < c.p(); ++n)
            if (!A[n](t, K[l]).is_zero()) mid += A[n](t, K[l]) * c.D(n, inner);
        rhs += c.D(head, mid);
    }
    return lhs - rhs;
}

}  // namespace nf
