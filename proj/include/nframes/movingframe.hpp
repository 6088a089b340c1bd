// Right moving frames from normalization equations, invariantization and
// randomized invariance tests.
#pragma once

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "nframes/groupaction.hpp"

namespace nf {

struct NotSolvable : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct VerificationFailed : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// psi(z~) = value, with psi an expression in jet coordinates (usually a single coordinate)
struct NormalizationEq {
    Expr lhs;
    Expr value;
};

struct NormalizationSpec {
    std::vector<NormalizationEq> eqs;
};

// Frame values may involve one adjoined square root s with s^2 = square. This
// covers actions where -1 acts trivially, so the frame is fixed only up to sign.
struct FrameRoot {
    Symbol s;
    Expr square;
};

// symbol used for an adjoined root
Symbol root_symbol();

class Frame {
public:
    Frame(const GroupActionSpec& spec, NormalizationSpec norm, std::vector<Expr> rho,
          std::optional<FrameRoot> root = std::nullopt);

    const GroupActionSpec& spec() const { return pa_->spec(); }
    const NormalizationSpec& normalization() const { return norm_; }
    const ProlongedAction& action() const { return *pa_; }
    const std::vector<Expr>& rho() const { return rho_; }
    // parameter -> frame value, including eliminated parameters
    const Bindings& bindings() const { return bind_; }
    // expressions that must not vanish for the frame to be defined
    const std::vector<Expr>& conditions() const { return conditions_; }
    const std::optional<FrameRoot>& root() const { return root_; }
    // reduce modulo the adjoined root, if any
    Expr reduce(const Expr& e) const;

    // g . e at g = rho(z)
    Expr invariantize(const Expr& e) const;
    // I(u^alpha_K), memoized
    Expr invariant(size_t alpha, const MultiIndex& K) const;
    // J^i = I(x_i)
    Expr invariant_independent(size_t i) const;
    // any expression in group parameters evaluated at the frame
    Expr at_frame(const Expr& e) const { return reduce(substitute(e, bind_)); }
    Matrix at_frame(const Matrix& m) const;

private:
    std::shared_ptr<ProlongedAction> pa_;
    NormalizationSpec norm_;
    std::vector<Expr> rho_;
    Bindings bind_;
    std::vector<Expr> conditions_;
    std::optional<FrameRoot> root_;
    mutable std::map<std::pair<size_t, std::vector<int>>, Expr> memo_;
};

struct SolveOptions {
    // parameters to try first, by index; empty means heuristic
    std::vector<size_t> order;
    // candidate frame to verify when elimination fails (or instead of it)
    std::optional<std::vector<Expr>> supplied;
    std::optional<FrameRoot> supplied_root;
    bool prefer_supplied = false;
    int max_steps = 4000;
};

// transformed normalization equations minus their constants
std::vector<Expr> normalization_residuals(const ProlongedAction& pa, const NormalizationSpec& norm);

Frame solve_frame(const GroupActionSpec& spec, const NormalizationSpec& norm, const SolveOptions& opts = {});

// Throws VerificationFailed if rho does not satisfy the normalization.
Frame verify_frame(const GroupActionSpec& spec, const NormalizationSpec& norm, const std::vector<Expr>& rho,
                   std::optional<FrameRoot> root = std::nullopt);

// g.e - e vanishes for `group_samples` random group elements (each tested by is_zero)
bool is_invariant(const GroupActionSpec& spec, const Expr& e, int group_samples = 3);

// The action specialized to fixed numeric parameter values.
GroupActionSpec specialize(const GroupActionSpec& spec, const Bindings& values);

// random parameter values at which the action and eliminated parameters are defined
Bindings random_group_element(const GroupActionSpec& spec, std::mt19937_64& g);

}  // namespace nf
