// Euler operator, Noether conservation laws, and their factorization through
// the Adjoint representation of a moving frame.
#pragma once

#include <random>
#include <stdexcept>
#include <vector>

#include "nframes/invariantcalc.hpp"

namespace nf {

struct NotInvariant : std::runtime_error {
    size_t generator;
    Expr residual;
    NotInvariant(size_t j, Expr r)
        : std::runtime_error("Lagrangian is not invariant under generator " + std::to_string(j) + ": residual " +
                             to_string(r)),
          generator(j), residual(std::move(r)) {}
};
struct SingularMinors : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InvarianceFailed : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IdentityFailed : std::runtime_error {
    Expr residual;
    IdentityFailed(const std::string& what, Expr r) : std::runtime_error(what + ": " + to_string(r)), residual(std::move(r)) {}
};
struct ShapeMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NotMatrixGroup : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// E^alpha(L) = sum_K (-D)_K dL/du^alpha_K
Expr euler_operator(const JetContext& ctx, const Expr& L, size_t alpha);
std::vector<Expr> euler_lagrange(const JetContext& ctx, const Expr& L);

// pr v_j(L) + L Div Xi_j
Expr invariance_residual(const Infinitesimals& inf, size_t j, const Expr& L);
// throws NotInvariant
void check_invariance(const Infinitesimals& inf, const Expr& L);

// E^J(L) for every J with |J| >= 1 that is nonzero
std::vector<std::pair<MultiIndex, Expr>> higher_euler(const JetContext& ctx, const Expr& L, size_t alpha);

// r x p matrix of law components with sum_k D_k C^j_k = -Q_j . E(L).
// Higher order terms go through the higher Euler operators E^J, and each
// D_J(Q E^J) is shared between the letters of J in proportion to their counts.
Matrix noether_laws(const Infinitesimals& inf, const Expr& L);
// (-1)^{k-1} C^j_k
Matrix signed_laws(const Matrix& C);

// sum_k D_k C^j_k + Q_j . E(L), one entry per generator
std::vector<Expr> noether_residuals(const Infinitesimals& inf, const Expr& L, const Matrix& C);

struct LawBundle {
    Matrix C;       // r x p, classical components
    Matrix AdInv;   // Ad(rho)^{-1}
    Matrix V;       // r x p, columns are the vectors of invariants
    Matrix Minors;  // first minors of the frame Jacobian
    bool empty() const { return C.rows() == 0; }
};

// V = Ad(rho) C' M^{-1}; checks every entry of V and the reassembly
LawBundle structured_laws(const Frame& frame, const Matrix& C, int invariance_samples = 2);
// Ad(rho)^{-1} V M
Matrix reassemble(const LawBundle& b);

// invariantized D_K Q^alpha_j for the listed K (rows j)
Matrix invariant_characteristics(const Frame& frame, size_t alpha, const std::vector<MultiIndex>& rows);
// upsilon_k = (-1)^{k-1} (sum_alpha Qinv^alpha C^alpha_k + L Xi(J,I)_k);
// Qinv[alpha] is r x n_alpha, Cvec[alpha] is n_alpha x p
Matrix vectors_from_boundary(const Frame& frame, const Expr& Linv, const std::vector<Matrix>& Qinv,
                             const std::vector<Matrix>& Cvec);

// Z^k_l with d x~-hat_k = sum_l (-1)^{l-1} Z^k_l dx-hat_l, J = dx~/dx
Matrix pform_action(const Matrix& J);
// the same coefficients read off by expanding the wedge products
Matrix pform_action_by_wedge(const Matrix& J);

struct CheckReport {
    int samples = 0;
    std::vector<std::string> failures;
    bool ok() const { return failures.empty(); }
};

// C(g.z) W(g) == Ad(g) C(z) with W_{kl} = (-1)^{k-1} Z^k_l at random g, and C symbolic in z
CheckReport equivariance_check(const Infinitesimals& inf, const Matrix& C, int samples, std::mt19937_64& rng);
// Ad(g) Ad(h) == Ad(gh) at random pairs; needs the composition law
CheckReport adjoint_homomorphism_check(const GroupActionSpec& spec, const Matrix& Ad, int samples, std::mt19937_64& rng);
// Ad(rho(g.z))^{-1} == Ad(g) Ad(rho(z))^{-1}
CheckReport frame_equivariance_check(const Frame& frame, int samples, std::mt19937_64& rng);

// throws IdentityFailed unless every Noether residual and the structured reassembly vanish
void divergence_check(const LawBundle& b, const Infinitesimals& inf, const Expr& L);

// D_i rho rho^{-1} with rho in the group's matrix form; entries checked invariant
std::vector<Matrix> curvature_matrices(const InvariantCalculus& c, int invariance_samples = 2);

// divergence of a single law row (p components)
Expr divergence(const JetContext& ctx, const std::vector<Expr>& row);

}  // namespace nf
