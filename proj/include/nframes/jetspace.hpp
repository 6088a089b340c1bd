// Jet-bundle bookkeeping: multi-indices, jet coordinates and total derivatives.
#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "nframes/symcore.hpp"

namespace nf {

// Unordered tuple of independent indices stored as counts per independent.
struct MultiIndex {
    std::vector<int> counts;

    MultiIndex() = default;
    explicit MultiIndex(size_t p) : counts(p, 0) {}
    static MultiIndex of(size_t p, const std::vector<size_t>& indices);

    int order() const;
    MultiIndex plus(size_t i) const;
    std::optional<MultiIndex> minus(size_t i) const;
    // indices with multiplicity, ascending
    std::vector<size_t> as_list() const;
    bool empty() const { return order() == 0; }

    friend bool operator==(const MultiIndex& a, const MultiIndex& b) { return a.counts == b.counts; }
    friend bool operator!=(const MultiIndex& a, const MultiIndex& b) { return !(a == b); }
    // graded, then lexicographic on the index list
    friend bool operator<(const MultiIndex& a, const MultiIndex& b);
};

struct JetCoord {
    size_t alpha;
    MultiIndex K;
};

class JetContext {
public:
    // `dummy` adds an extra invariant independent (the variational parameter).
    JetContext(std::vector<std::string> independents, std::vector<std::string> dependents,
               bool dummy = false, std::string dummy_name = "tau");

    size_t p() const { return indep_.size(); }             // including the dummy
    size_t p_base() const { return indep_.size() - (dummy_ ? 1 : 0); }
    size_t q() const { return dep_names_.size(); }
    bool has_dummy() const { return dummy_; }
    size_t dummy_index() const { return indep_.size() - 1; }
    bool is_invariant_independent(size_t i) const { return dummy_ && i == dummy_index(); }

    Symbol independent(size_t i) const { return indep_.at(i); }
    const std::string& independent_name(size_t i) const { return indep_names_.at(i); }
    const std::string& dependent_name(size_t a) const { return dep_names_.at(a); }
    std::optional<size_t> independent_index(Symbol s) const;

    // u^alpha_K, created on first use
    Symbol jet(size_t alpha, const MultiIndex& K) const;
    Expr jet_expr(size_t alpha, const MultiIndex& K) const { return Expr(jet(alpha, K)); }
    Expr u(size_t alpha) const { return jet_expr(alpha, MultiIndex(p())); }
    std::optional<JetCoord> jet_info(Symbol s) const;
    int max_order() const;
    // highest jet order of any coordinate occurring in e (-1 if none)
    int order_of(const Expr& e) const;
    // all jet coordinates of order <= n, in a fixed order
    std::vector<JetCoord> coords_up_to(int n) const;
    // all multi-indices of order exactly n
    std::vector<MultiIndex> indices_of_order(int n) const;

    std::string jet_name(size_t alpha, const MultiIndex& K) const;
    // parse "u_xxy"-style names, independents, dependents
    std::optional<Expr> resolve(const std::string& name) const;

    Expr total_derivative(const Expr& e, size_t i) const;
    Expr iterated_derivative(const Expr& e, const MultiIndex& K) const;
    // D_i applied to a single atom
    Expr total_derivative_atom(Symbol s, size_t i) const;

private:
    std::vector<std::string> indep_names_, dep_names_;
    std::vector<Symbol> indep_;
    bool dummy_;
    mutable std::mutex mu_;
    mutable std::map<std::pair<size_t, std::vector<int>>, Symbol> jets_;
    mutable std::unordered_map<uint32_t, JetCoord> info_;
    mutable int max_order_ = 0;
};

using JetContextPtr = std::shared_ptr<JetContext>;

// f_1 D_1 + ... + f_p D_p
struct TotalVectorField {
    std::vector<Expr> coeffs;
};

Expr apply_vector_field(const JetContext& ctx, const TotalVectorField& v, const Expr& e);

// Euler-type helper: all jet coordinates of dependent alpha occurring in e
std::vector<std::pair<MultiIndex, Symbol>> jets_in(const JetContext& ctx, const Expr& e, size_t alpha);

}  // namespace nf
