// Lie group actions on jet space: prolongation, infinitesimals,
// characteristics and the Adjoint representation.
#pragma once

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "nframes/jetspace.hpp"
#include "nframes/matrix.hpp"

namespace nf {

struct SingularJacobian : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct GeneratorsNotIndependent : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GroupActionSpec {
    JetContextPtr ctx;
    std::vector<Symbol> params;       // free parameters a_1..a_r
    std::vector<mpq_class> identity;  // their values at the identity
    Bindings eliminated;              // constrained parameters in terms of free ones
    std::vector<Expr> xt;             // transformed base independents (dummy excluded)
    std::vector<Expr> ut;             // transformed dependents
    // optional composition law: parameters of g*h in terms of params (g) and hparams (h)
    std::vector<Symbol> hparams;
    std::vector<Expr> product;
    // optional standard matrix form of the group element (entries in params)
    std::optional<Matrix> matrix_form;

    size_t r() const { return params.size(); }
    // substitute `eliminated` into the action; call once after filling fields
    void finalize();
    Bindings identity_bindings() const;
    // transformed independent i (the dummy maps to itself)
    Expr x_tilde(size_t i) const;
    bool has_composition() const { return !product.empty(); }
    // parameter bindings for a group element given by values
    Bindings at(const std::vector<Expr>& values) const;
};

// Transformed jet coordinates u~^alpha_K, computed on demand and memoized.
class ProlongedAction {
public:
    explicit ProlongedAction(const GroupActionSpec& spec);

    const GroupActionSpec& spec() const { return spec_; }
    // total Jacobian d x~ / d x (p x p, dummy included)
    const Matrix& jacobian() const { return jac_; }
    const Matrix& jacobian_inv_t() const { return jac_inv_t_; }

    Expr transformed(size_t alpha, const MultiIndex& K) const;
    // D~_i e = sum_k (J^{-T})_{ik} D_k e
    Expr tilde_derivative(const Expr& e, size_t i) const;
    // g . e: every jet coordinate and independent replaced by its transform
    Expr transform(const Expr& e) const;
    void prolong_to(int order) const;

private:
    GroupActionSpec spec_;
    Matrix jac_, jac_inv_t_;
    mutable std::map<std::pair<size_t, std::vector<int>>, Expr> memo_;
};

ProlongedAction prolong(const GroupActionSpec& spec, int order);

// xi^i_j, phi^alpha_{K,j} by differentiation of the prolonged action at e.
class Infinitesimals {
public:
    explicit Infinitesimals(const GroupActionSpec& spec);
    const GroupActionSpec& spec() const { return spec_; }
    // xi^i_j for base and dummy independents (dummy entries are 0)
    const Expr& xi(size_t j, size_t i) const { return xi_.at(j).at(i); }
    Expr phi(size_t j, size_t alpha, const MultiIndex& K) const;
    // sum_i xi^i_j D_i + ... written on (x,u) only: row j of (Xi | Phi)
    std::vector<Expr> base_field(size_t j) const;
    // divergence of Xi_j, i.e. sum_i D_i xi^i_j
    Expr div_xi(size_t j) const;
    // classical prolongation formula D_K Q_j + sum_i xi^i_j u_{K,i}, used as a cross-check
    Expr phi_by_formula(size_t j, size_t alpha, const MultiIndex& K) const;
    const ProlongedAction& action() const { return pa_; }

private:
    GroupActionSpec spec_;
    ProlongedAction pa_;
    std::vector<std::vector<Expr>> xi_;
    mutable std::map<std::tuple<size_t, size_t, std::vector<int>>, Expr> memo_;
};

// pr v_j applied to F: sum_i xi^i_j dF/dx_i + sum phi^alpha_{K,j} dF/du^alpha_K
Expr prolonged_apply(const Infinitesimals& inf, size_t j, const Expr& F);

// Q^alpha_j = phi^alpha_j - sum_i u^alpha_i xi^i_j, one entry per dependent
std::vector<Expr> characteristic(const Infinitesimals& inf, size_t j);
// entry (j, K) = D_K Q^alpha_j
Matrix characteristic_matrix(const Infinitesimals& inf, size_t alpha, const std::vector<MultiIndex>& rows);

// row j: coefficients of g . v_j in the basis v_1..v_r (entries in params)
Matrix adjoint_rep(const Infinitesimals& inf);

}  // namespace nf
