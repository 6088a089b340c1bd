// Invariant differential operators, correction terms, commutators, invariant
// one-forms and their Lie derivatives, and syzygies with the dummy variable.
#pragma once

#include <map>
#include <stdexcept>
#include <vector>

#include "nframes/movingframe.hpp"

namespace nf {

struct BasisSolveFailed : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct RewriteNotTerminating : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class InvariantCalculus {
public:
    explicit InvariantCalculus(Frame frame);

    const Frame& frame() const { return frame_; }
    const JetContext& ctx() const { return *frame_.spec().ctx; }
    const Infinitesimals& infinitesimals() const { return inf_; }
    size_t p() const { return ops_.size(); }

    // D_i = sum_k (J^{-T})_{ik} D_k at the frame
    const std::vector<TotalVectorField>& operators() const { return ops_; }
    // Jacobian dx~/dx at the frame (the matrix of I(dx_i) in the dx basis)
    const Matrix& jacobian() const { return jac_; }

    Expr D(size_t i, const Expr& e) const { return apply_vector_field(ctx(), ops_.at(i), e); }
    // D_{w_1} ... D_{w_m} e, the last letter acting first
    Expr D(const std::vector<size_t>& word, const Expr& e) const;

    // (D_j I^alpha_K, M^alpha_{Kj})
    std::pair<Expr, Expr> invariant_derivative(size_t alpha, const MultiIndex& K, size_t j) const;
    // (D_j J^i, N_{ij})
    std::pair<Expr, Expr> independent_derivative(size_t i, size_t j) const;

private:
    Frame frame_;
    Infinitesimals inf_;
    std::vector<TotalVectorField> ops_;
    Matrix jac_;
};

struct CorrectionData {
    Matrix K;  // p x r
    Matrix N;  // N(i, j) = N_{ij} = sum_l K_{jl} xi^i_l(I)
};

// K from the phantom equations: 0 = I(D_j psi_m) + sum_l K_{jl} I(pr v_l psi_m)
CorrectionData correction_matrix(const InvariantCalculus& c);
// sum_l K_{jl} phi^alpha_{K,l}(I)
Expr correction_M(const InvariantCalculus& c, const CorrectionData& k, size_t alpha, const MultiIndex& K, size_t j);

// A[k](i, j) = A^k_{ij}
using CommutatorTensor = std::vector<Matrix>;
// direct bracket of the operators, re-expressed in the operator basis
CommutatorTensor commutator_tensor(const InvariantCalculus& c);
// sum_l K_{jl} Xi^k_{li} - K_{il} Xi^k_{lj}, Xi^k_{li} = I(D_i xi^k_l)
CommutatorTensor commutator_tensor_formula(const InvariantCalculus& c, const CorrectionData& k);

// Horizontal forms over dx_1..dx_p with expression coefficients; keys are
// strictly increasing index lists.
struct DiffForm {
    size_t p = 0;
    std::map<std::vector<size_t>, Expr> terms;

    static DiffForm zero(size_t p) { return DiffForm{p, {}}; }
    static DiffForm function(size_t p, const Expr& f);
    static DiffForm one_form(const std::vector<Expr>& coeffs);
    bool is_zero() const;
    Expr coeff(const std::vector<size_t>& idx) const;
};

DiffForm operator+(const DiffForm& a, const DiffForm& b);
DiffForm operator-(const DiffForm& a, const DiffForm& b);
DiffForm operator*(const Expr& f, const DiffForm& a);
DiffForm wedge(const DiffForm& a, const DiffForm& b);
// d(f dx_I) = sum_k D_k f dx_k ^ dx_I
DiffForm exterior_derivative(const JetContext& ctx, const DiffForm& w);
DiffForm interior(const TotalVectorField& v, const DiffForm& w);
// Cartan: d(V _| w) + V _| dw
DiffForm lie_derivative(const JetContext& ctx, const TotalVectorField& v, const DiffForm& w);
std::string to_string(const DiffForm& w, const JetContext& ctx);

// I(dx_i) = sum_j J_{ij} dx_j
std::vector<DiffForm> invariant_one_forms(const InvariantCalculus& c);
DiffForm lie_derivative_form(const InvariantCalculus& c, size_t i, const DiffForm& w);
// coefficients of a one-form in the I(dx_k) basis
std::vector<Expr> in_invariant_basis(const InvariantCalculus& c, const DiffForm& w);

// One entry of the syzygy operator: coefficient * D_{word}.
struct OpTerm {
    std::vector<size_t> word;  // non-decreasing base indices
    Expr coeff;
};
using OpPoly = std::vector<OpTerm>;
Expr apply(const InvariantCalculus& c, const OpPoly& h, const Expr& arg);

// H[j][beta]: D_tau kappa_j = sum_beta H[j][beta] (I^beta_tau)
std::vector<std::vector<OpPoly>> syzygy(const InvariantCalculus& c, const std::vector<Expr>& generators);

// D_{p+1} D_K f minus the right side of the commutator expansion over K
Expr dummy_commutator_residual(const InvariantCalculus& c, const CommutatorTensor& A, const std::vector<size_t>& K,
                               const Expr& f);

}  // namespace nf
