#include "nframes/jetspace.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace nf {

MultiIndex MultiIndex::of(size_t p, const std::vector<size_t>& indices) {
    MultiIndex K(p);
    for (auto i : indices) K.counts.at(i) += 1;
    return K;
}

int MultiIndex::order() const { return std::accumulate(counts.begin(), counts.end(), 0); }

MultiIndex MultiIndex::plus(size_t i) const {
    MultiIndex K = *this;
    K.counts.at(i) += 1;
    return K;
}

std::optional<MultiIndex> MultiIndex::minus(size_t i) const {
    if (counts.at(i) == 0) return std::nullopt;
    MultiIndex K = *this;
    K.counts[i] -= 1;
    return K;
}

std::vector<size_t> MultiIndex::as_list() const {
    std::vector<size_t> out;
    for (size_t i = 0; i < counts.size(); ++i)
        for (int k = 0; k < counts[i]; ++k) out.push_back(i);
    return out;
}

bool operator<(const MultiIndex& a, const MultiIndex& b) {
    int oa = a.order(), ob = b.order();
    if (oa != ob) return oa < ob;
    return a.as_list() < b.as_list();
}

JetContext::JetContext(std::vector<std::string> independents, std::vector<std::string> dependents, bool dummy,
                       std::string dummy_name)
    : indep_names_(std::move(independents)), dep_names_(std::move(dependents)), dummy_(dummy) {
    if (dummy_) indep_names_.push_back(std::move(dummy_name));
    for (size_t i = 0; i < indep_names_.size(); ++i) {
        bool is_dummy = dummy_ && i + 1 == indep_names_.size();
        indep_.push_back(symbol(indep_names_[i], is_dummy ? SymbolKind::dummy : SymbolKind::independent));
    }
    for (size_t a = 0; a < dep_names_.size(); ++a) jet(a, MultiIndex(p()));
}

std::optional<size_t> JetContext::independent_index(Symbol s) const {
    for (size_t i = 0; i < indep_.size(); ++i)
        if (indep_[i] == s) return i;
    return std::nullopt;
}

std::string JetContext::jet_name(size_t alpha, const MultiIndex& K) const {
    std::string n = dep_names_.at(alpha);
    if (K.order() == 0) return n;
    n += "_";
    for (auto i : K.as_list()) n += indep_names_[i];
    return n;
}

Symbol JetContext::jet(size_t alpha, const MultiIndex& K) const {
    if (K.counts.size() != p()) throw std::invalid_argument("multi-index has wrong length");
    std::lock_guard<std::mutex> lk(mu_);
    auto key = std::make_pair(alpha, K.counts);
    auto it = jets_.find(key);
    if (it != jets_.end()) return it->second;
    Symbol s = symbol(jet_name(alpha, K), SymbolKind::dependent_jet);
    set_print_order(s, K.order());
    jets_.emplace(key, s);
    info_.emplace(s.id, JetCoord{alpha, K});
    max_order_ = std::max(max_order_, K.order());
    return s;
}

std::optional<JetCoord> JetContext::jet_info(Symbol s) const {
    std::lock_guard<std::mutex> lk(mu_);
    auto it = info_.find(s.id);
    if (it == info_.end()) return std::nullopt;
    return it->second;
}

int JetContext::max_order() const {
    std::lock_guard<std::mutex> lk(mu_);
    return max_order_;
}

int JetContext::order_of(const Expr& e) const {
    int o = -1;
    for (auto id : e.symbols()) {
        Symbol s{id};
        if (auto j = jet_info(s)) o = std::max(o, j->K.order());
        else if (const OpaqueInfo* op = opaque_info(s))
            for (const auto& a : op->args) o = std::max(o, order_of(a));
    }
    return o;
}

std::vector<MultiIndex> JetContext::indices_of_order(int n) const {
    std::vector<MultiIndex> out;
    std::function<void(size_t, int, MultiIndex&)> rec = [&](size_t i, int left, MultiIndex& K) {
        if (i + 1 == p()) {
            K.counts[i] = left;
            out.push_back(K);
            K.counts[i] = 0;
            return;
        }
        for (int c = left; c >= 0; --c) {
            K.counts[i] = c;
            rec(i + 1, left - c, K);
        }
        K.counts[i] = 0;
    };
    MultiIndex K(p());
    if (p() == 0) return {K};
    rec(0, n, K);
    return out;
}

std::vector<JetCoord> JetContext::coords_up_to(int n) const {
    std::vector<JetCoord> out;
    for (int o = 0; o <= n; ++o)
        for (size_t a = 0; a < q(); ++a)
            for (auto& K : indices_of_order(o)) out.push_back({a, K});
    return out;
}

std::optional<Expr> JetContext::resolve(const std::string& name) const {
    for (size_t i = 0; i < indep_names_.size(); ++i)
        if (indep_names_[i] == name) return Expr(indep_[i]);
    for (size_t a = 0; a < dep_names_.size(); ++a) {
        const std::string& d = dep_names_[a];
        if (name == d) return u(a);
        if (name.size() > d.size() + 1 && name.compare(0, d.size(), d) == 0 && name[d.size()] == '_') {
            std::string suffix = name.substr(d.size() + 1);
            MultiIndex K(p());
            std::function<bool(size_t)> parse = [&](size_t pos) -> bool {
                if (pos == suffix.size()) return true;
                for (size_t i = 0; i < indep_names_.size(); ++i) {
                    const auto& n = indep_names_[i];
                    if (suffix.compare(pos, n.size(), n) == 0) {
                        K.counts[i] += 1;
                        if (parse(pos + n.size())) return true;
                        K.counts[i] -= 1;
                    }
                }
                return false;
            };
            if (parse(0)) return jet_expr(a, K);
        }
    }
    return std::nullopt;
}

Expr JetContext::total_derivative_atom(Symbol s, size_t i) const {
    if (auto k = independent_index(s)) return *k == i ? Expr(1) : Expr();
    if (auto j = jet_info(s)) return jet_expr(j->alpha, j->K.plus(i));
    return Expr();
}

Expr JetContext::total_derivative(const Expr& e, size_t i) const {
    if (i >= p()) throw std::out_of_range("total_derivative: bad independent index");
    return apply_derivation(e, [this, i](Symbol s) { return total_derivative_atom(s, i); });
}

Expr JetContext::iterated_derivative(const Expr& e, const MultiIndex& K) const {
    Expr r = e;
    for (auto i : K.as_list()) r = total_derivative(r, i);
    return r;
}

Expr apply_vector_field(const JetContext& ctx, const TotalVectorField& v, const Expr& e) {
    Expr r;
    for (size_t i = 0; i < v.coeffs.size(); ++i) {
        if (v.coeffs[i].is_zero()) continue;
        r += v.coeffs[i] * ctx.total_derivative(e, i);
    }
    return r;
}

std::vector<std::pair<MultiIndex, Symbol>> jets_in(const JetContext& ctx, const Expr& e, size_t alpha) {
    std::vector<std::pair<MultiIndex, Symbol>> out;
    std::function<void(const Expr&)> walk = [&](const Expr& x) {
        for (auto id : x.symbols()) {
            Symbol s{id};
            if (auto j = ctx.jet_info(s)) {
                if (j->alpha == alpha &&
                    std::none_of(out.begin(), out.end(), [&](const auto& p) { return p.second == s; }))
                    out.emplace_back(j->K, s);
            } else if (const OpaqueInfo* op = opaque_info(s)) {
                for (const auto& a : op->args) walk(a);
            }
        }
    };
    walk(e);
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
}

}  // namespace nf
