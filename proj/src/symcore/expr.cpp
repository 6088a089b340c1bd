#include <deque>
#include <mutex>
#include <sstream>
#include <unordered_map>

#include "nframes/symcore.hpp"

namespace nf {

// ---------------------------------------------------------------------------
// symbol table

namespace {

struct SymEntry {
    std::string name;
    SymbolKind kind;
    int order = 0;
    std::unique_ptr<OpaqueInfo> op;
};

struct SymTable {
    std::mutex mu;
    std::deque<SymEntry> entries;
    std::unordered_map<std::string, uint32_t> index;
};

SymTable& table() {
    static SymTable t;
    return t;
}

std::string key_of(const std::string& name, SymbolKind kind) {
    return std::to_string(static_cast<int>(kind)) + ":" + name;
}

}  // namespace

const char* kind_name(SymbolKind k) {
    switch (k) {
        case SymbolKind::independent: return "independent";
        case SymbolKind::dependent_jet: return "dependent-jet";
        case SymbolKind::group_param: return "group-param";
        case SymbolKind::dummy: return "dummy";
        case SymbolKind::constant: return "constant";
        case SymbolKind::opaque: return "opaque";
    }
    return "?";
}

const std::string& Symbol::name() const {
    auto& t = table();
    std::lock_guard<std::mutex> lk(t.mu);
    return t.entries.at(id).name;
}

SymbolKind Symbol::kind() const {
    auto& t = table();
    std::lock_guard<std::mutex> lk(t.mu);
    return t.entries.at(id).kind;
}

Symbol symbol(const std::string& name, SymbolKind kind) {
    auto& t = table();
    std::lock_guard<std::mutex> lk(t.mu);
    auto key = key_of(name, kind);
    auto it = t.index.find(key);
    if (it != t.index.end()) return Symbol{it->second};
    uint32_t id = static_cast<uint32_t>(t.entries.size());
    t.entries.push_back(SymEntry{name, kind, 0, nullptr});
    t.index.emplace(key, id);
    return Symbol{id};
}

Symbol find_symbol(const std::string& name, SymbolKind kind) {
    auto& t = table();
    std::lock_guard<std::mutex> lk(t.mu);
    auto it = t.index.find(key_of(name, kind));
    return it == t.index.end() ? Symbol{} : Symbol{it->second};
}

void set_print_order(Symbol s, int order) {
    auto& t = table();
    std::lock_guard<std::mutex> lk(t.mu);
    t.entries.at(s.id).order = order;
}

int print_order(Symbol s) {
    auto& t = table();
    std::lock_guard<std::mutex> lk(t.mu);
    return t.entries.at(s.id).order;
}

Symbol opaque_atom(const std::string& fn, const std::vector<Expr>& args, const std::vector<int>& dcount_in) {
    std::vector<int> dc = dcount_in;
    dc.resize(args.size(), 0);
    std::string name = fn;
    for (size_t i = 0; i < dc.size(); ++i)
        for (int k = 0; k < dc[i]; ++k) name += "_" + std::to_string(i + 1);
    std::string key = name + "(";
    for (size_t i = 0; i < args.size(); ++i) key += (i ? ", " : "") + to_string(args[i]);
    key += ")";
    auto& t = table();
    std::lock_guard<std::mutex> lk(t.mu);
    auto full = key_of(key, SymbolKind::opaque);
    auto it = t.index.find(full);
    if (it != t.index.end()) return Symbol{it->second};
    uint32_t id = static_cast<uint32_t>(t.entries.size());
    SymEntry e{key, SymbolKind::opaque, 0, std::make_unique<OpaqueInfo>(OpaqueInfo{fn, args, dc})};
    t.entries.push_back(std::move(e));
    t.index.emplace(full, id);
    return Symbol{id};
}

Expr opaque(const std::string& fn, const std::vector<Expr>& args) { return Expr(opaque_atom(fn, args)); }

const OpaqueInfo* opaque_info(Symbol s) {
    auto& t = table();
    std::lock_guard<std::mutex> lk(t.mu);
    return t.entries.at(s.id).op.get();
}

// ---------------------------------------------------------------------------
// Expr

struct Expr::Rep {
    Poly num, den;
    size_t h;
};

namespace {

const Poly& poly_one() {
    static const Poly one(mpz_class(1));
    return one;
}

}  // namespace

Expr make_normal(Poly num, Poly den) {
    if (den.is_zero()) throw DegenerateExpression("division by an identically zero denominator");
    if (num.is_zero()) return Expr();
    if (!den.is_one()) {
        Poly g = gcd(num, den);
        if (!g.is_one()) {
            num = div_exact(num, g);
            den = div_exact(den, g);
        }
        if (den.lc() < 0) {
            num = -num;
            den = -den;
        }
    }
    size_t h = num.hash() * 31 + den.hash();
    return Expr(std::make_shared<const Expr::Rep>(Expr::Rep{std::move(num), std::move(den), h}));
}

// num/den already coprime
Expr make_raw(Poly num, Poly den) {
    if (num.is_zero()) return Expr();
    if (den.lc() < 0) {
        num = -num;
        den = -den;
    }
    return Expr::fraction_raw(std::move(num), std::move(den));
}

Expr Expr::fraction_raw(Poly num, Poly den) {
    size_t h = num.hash() * 31 + den.hash();
    return Expr(std::make_shared<const Rep>(Rep{std::move(num), std::move(den), h}));
}

Expr::Expr() {
    static const auto zero = std::make_shared<const Rep>(Rep{Poly(), poly_one(), 0});
    rep_ = zero;
}

Expr::Expr(long v) {
    if (v == 0) {
        *this = Expr();
        return;
    }
    *this = make_normal(Poly(mpz_class(v)), poly_one());
}

Expr::Expr(const mpq_class& q) { *this = make_normal(Poly(q.get_num()), Poly(q.get_den())); }

Expr::Expr(Symbol s) { *this = make_normal(Poly::var(s.id), poly_one()); }

Expr Expr::fraction(const Poly& num, const Poly& den) { return make_normal(num, den); }
Expr Expr::from_poly(const Poly& p) { return make_normal(p, poly_one()); }

const Poly& Expr::num() const { return rep_->num; }
const Poly& Expr::den() const { return rep_->den; }

mpq_class Expr::const_value() const {
    if (!is_const()) throw std::logic_error("const_value of a non-constant expression: " + to_string(*this));
    mpq_class q(num().const_value(), den().const_value());
    q.canonicalize();
    return q;
}

bool Expr::is_symbol() const {
    return den().is_one() && num().nterms() == 1 && num().nvars() == 1 && num().coeff(0) == 1 && num().mono(0)[0] == 1;
}

Symbol Expr::as_symbol() const {
    if (!is_symbol()) throw std::logic_error("not a symbol: " + to_string(*this));
    return Symbol{num().vars()[0]};
}

std::vector<uint32_t> Expr::symbols() const { return union_vars(num().vars(), den().vars()); }

bool Expr::depends_on(Symbol s) const { return num().has_var(s.id) || den().has_var(s.id); }

size_t Expr::hash() const { return rep_->h; }

bool operator==(const Expr& a, const Expr& b) {
    if (a.rep_ == b.rep_) return true;
    return a.rep_->h == b.rep_->h && a.num() == b.num() && a.den() == b.den();
}

Expr operator+(const Expr& a, const Expr& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (a.is_poly() && b.is_poly()) return make_normal(a.num() + b.num(), poly_one());
    if (a.den() == b.den()) return make_normal(a.num() + b.num(), a.den());
    if (a.is_poly()) return make_raw(a.num() * b.den() + b.num(), b.den());
    if (b.is_poly()) return make_raw(a.num() + b.num() * a.den(), a.den());
    Poly g = gcd(a.den(), b.den());
    if (g.is_one()) {
        Poly n = a.num() * b.den() + b.num() * a.den();
        return make_raw(std::move(n), a.den() * b.den());
    }
    Poly ad = div_exact(a.den(), g), bd = div_exact(b.den(), g);
    Poly n = a.num() * bd + b.num() * ad;
    if (n.is_zero()) return Expr();
    Poly h = gcd(n, g);
    if (!h.is_one()) {
        n = div_exact(n, h);
        return make_raw(std::move(n), div_exact(a.den(), h) * bd);
    }
    return make_raw(std::move(n), a.den() * bd);
}

Expr operator-(const Expr& a) {
    if (a.is_zero()) return a;
    return make_normal(-a.num(), a.den());
}

Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }

Expr operator*(const Expr& a, const Expr& b) {
    if (a.is_zero() || b.is_zero()) return Expr();
    if (a.is_one()) return b;
    if (b.is_one()) return a;
    if (a.is_poly() && b.is_poly()) return make_normal(a.num() * b.num(), poly_one());
    Poly g1 = b.is_poly() ? poly_one() : gcd(a.num(), b.den());
    Poly g2 = a.is_poly() ? poly_one() : gcd(b.num(), a.den());
    Poly an = g1.is_one() ? a.num() : div_exact(a.num(), g1);
    Poly bd = g1.is_one() ? b.den() : div_exact(b.den(), g1);
    Poly bn = g2.is_one() ? b.num() : div_exact(b.num(), g2);
    Poly ad = g2.is_one() ? a.den() : div_exact(a.den(), g2);
    return make_raw(an * bn, ad * bd);
}

namespace {
Expr inverse(const Expr& b) {
    if (b.is_zero()) throw DegenerateExpression("division by an identically zero expression");
    return make_raw(b.den(), b.num());
}
}  // namespace

Expr operator/(const Expr& a, const Expr& b) {
    if (b.is_zero()) throw DegenerateExpression("division by an identically zero expression");
    if (a.is_zero()) return a;
    if (b.is_one()) return a;
    return a * inverse(b);
}

Expr pow(const Expr& a, long n) {
    if (n == 0) return Expr(1);
    if (n < 0) return pow(inverse(a), -n);
    if (n == 1) return a;
    return make_raw(pow(a.num(), static_cast<unsigned>(n)), pow(a.den(), static_cast<unsigned>(n)));
}

Expr& Expr::operator+=(const Expr& o) { return *this = *this + o; }
Expr& Expr::operator-=(const Expr& o) { return *this = *this - o; }
Expr& Expr::operator*=(const Expr& o) { return *this = *this * o; }
Expr& Expr::operator/=(const Expr& o) { return *this = *this / o; }

Expr normal_form(const Expr& e) { return e; }

// ---------------------------------------------------------------------------
// random sampling

namespace {
std::mt19937_64& sampler() {
    thread_local std::mt19937_64 g(20240501ULL);
    return g;
}
thread_local unsigned long long g_seed = 20240501ULL;
}  // namespace

void set_sampling_seed(unsigned long long seed) {
    g_seed = seed;
    sampler().seed(seed);
}
unsigned long long sampling_seed() { return g_seed; }

mpq_class random_rational(std::mt19937_64& g) {
    std::uniform_int_distribution<long> num(-997, 997), den(1, 89);
    mpq_class q(num(g), den(g));
    q.canonicalize();
    return q;
}

mpq_class random_rational() { return random_rational(sampler()); }

// ---------------------------------------------------------------------------
// evaluation and zero test

mpq_class evaluate(const Expr& e, const std::map<Symbol, mpq_class>& values) {
    auto look = [&](uint32_t id) -> mpq_class {
        auto it = values.find(Symbol{id});
        if (it == values.end()) throw std::out_of_range("evaluate: no value for " + Symbol{id}.name());
        return it->second;
    };
    mpq_class d = eval(e.den(), look);
    if (d == 0) throw DegenerateExpression("denominator vanishes at evaluation point");
    return eval(e.num(), look) / d;
}

bool is_zero(const Expr& e, int samples) {
    const bool nf_zero = e.num().is_zero();
    auto ids = e.symbols();
    bool saw_nonzero = false;
    int done = 0;
    for (int attempt = 0; done < samples && attempt < samples * 10; ++attempt) {
        std::map<uint32_t, mpq_class> vals;
        for (auto id : ids) vals[id] = random_rational();
        auto look = [&](uint32_t id) { return vals.at(id); };
        mpq_class d = eval(e.den(), look);
        if (d == 0) continue;
        ++done;
        if (eval(e.num(), look) != 0) {
            saw_nonzero = true;
            break;
        }
    }
    if (nf_zero && saw_nonzero) throw std::logic_error("is_zero: normal form and sampling disagree");
    if (!nf_zero && !saw_nonzero && done > 0) throw std::logic_error("is_zero: nonzero normal form vanished at every sample");
    return nf_zero;
}

// ---------------------------------------------------------------------------
// derivations

namespace {

Expr derive(const Expr& e, const AtomDerivative& d, Symbol exact);

Expr atom_derivative(Symbol v, const AtomDerivative& d, Symbol exact) {
    if (v == exact) return Expr(1);
    const OpaqueInfo* op = opaque_info(v);
    if (!op) return d(v);
    Expr acc;
    for (size_t i = 0; i < op->args.size(); ++i) {
        Expr da = derive(op->args[i], d, exact);
        if (da.is_zero()) continue;
        auto dc = op->dcount;
        dc[i] += 1;
        acc += Expr(opaque_atom(op->fn, op->args, dc)) * da;
    }
    return acc;
}

Expr derive_poly(const Poly& p, const AtomDerivative& d, Symbol exact) {
    Poly poly_part;
    Expr rest;
    for (auto id : p.vars()) {
        Expr dv = atom_derivative(Symbol{id}, d, exact);
        if (dv.is_zero()) continue;
        Poly dp = diff(p, id);
        if (dv.is_poly()) poly_part = poly_part + dp * dv.num();
        else rest += Expr::from_poly(dp) * dv;
    }
    return Expr::from_poly(poly_part) + rest;
}

Expr derive(const Expr& e, const AtomDerivative& d, Symbol exact) {
    if (e.is_const()) return Expr();
    Expr dn = derive_poly(e.num(), d, exact);
    if (e.is_poly()) return dn;
    Expr dd = derive_poly(e.den(), d, exact);
    Expr D = Expr::from_poly(e.den());
    return (dn - e * dd) / D;
}

}  // namespace

Expr apply_derivation(const Expr& e, const AtomDerivative& d) { return derive(e, d, Symbol{}); }

Expr diff(const Expr& e, Symbol s) {
    return derive(e, [s](Symbol v) { return v == s ? Expr(1) : Expr(); }, s);
}

// ---------------------------------------------------------------------------
// substitution

namespace {

struct Frac {
    Poly n, d;
};

// substitute into a polynomial; `bound` maps column -> replacement
Frac subs_poly(const Poly& p, const std::vector<std::pair<size_t, Expr>>& bound) {
    const size_t n = p.nvars();
    if (bound.empty()) return {p, poly_one()};
    std::vector<int> col_slot(n, -1);
    for (size_t s = 0; s < bound.size(); ++s) col_slot[bound[s].first] = static_cast<int>(s);
    std::vector<uint32_t> free_vars;
    for (size_t k = 0; k < n; ++k)
        if (col_slot[k] < 0) free_vars.push_back(p.vars()[k]);
    const size_t nb = bound.size();
    std::vector<uint32_t> maxe(nb, 0);
    // group terms by their exponents on bound columns
    std::map<std::vector<uint32_t>, Poly::Builder> groups;
    std::vector<uint32_t> key(nb), row(free_vars.size());
    for (size_t i = 0; i < p.nterms(); ++i) {
        const uint32_t* m = p.mono(i);
        size_t f = 0;
        for (size_t k = 0; k < n; ++k) {
            if (col_slot[k] >= 0) key[col_slot[k]] = m[k];
            else row[f++] = m[k];
        }
        for (size_t s = 0; s < nb; ++s) maxe[s] = std::max(maxe[s], key[s]);
        auto it = groups.find(key);
        if (it == groups.end()) it = groups.emplace(key, Poly::Builder(free_vars)).first;
        it->second.add(row.data(), p.coeff(i));
    }
    // power tables
    std::vector<std::vector<Poly>> npow(nb), dpow(nb);
    for (size_t s = 0; s < nb; ++s) {
        const Expr& b = bound[s].second;
        npow[s].push_back(poly_one());
        dpow[s].push_back(poly_one());
        for (uint32_t k = 1; k <= maxe[s]; ++k) {
            npow[s].push_back(npow[s].back() * b.num());
            if (!b.is_poly()) dpow[s].push_back(dpow[s].back() * b.den());
        }
    }
    Poly total;
    for (auto& [k, bld] : groups) {
        Poly term = bld.finish();
        for (size_t s = 0; s < nb; ++s) {
            if (k[s]) term = term * npow[s][k[s]];
            if (!bound[s].second.is_poly() && maxe[s] > k[s]) term = term * dpow[s][maxe[s] - k[s]];
        }
        total = total + term;
    }
    Poly den = poly_one();
    for (size_t s = 0; s < nb; ++s)
        if (!bound[s].second.is_poly() && maxe[s]) den = den * dpow[s][maxe[s]];
    return {std::move(total), std::move(den)};
}

std::vector<std::pair<size_t, Expr>> bound_columns(const Poly& p, const Bindings& b,
                                                   std::map<uint32_t, std::optional<Expr>>& cache) {
    std::vector<std::pair<size_t, Expr>> out;
    for (size_t k = 0; k < p.nvars(); ++k) {
        uint32_t id = p.vars()[k];
        auto c = cache.find(id);
        if (c == cache.end()) {
            std::optional<Expr> r;
            auto it = b.find(Symbol{id});
            if (it != b.end()) {
                r = it->second;
            } else if (const OpaqueInfo* op = opaque_info(Symbol{id})) {
                std::vector<Expr> args;
                bool changed = false;
                for (const auto& a : op->args) {
                    args.push_back(substitute(a, b));
                    if (args.back() != a) changed = true;
                }
                if (changed) r = Expr(opaque_atom(op->fn, args, op->dcount));
            }
            c = cache.emplace(id, r).first;
        }
        if (c->second) out.emplace_back(k, *c->second);
    }
    return out;
}

}  // namespace

Expr substitute(const Expr& e, const Bindings& b) {
    if (b.empty() || e.is_const()) return e;
    std::map<uint32_t, std::optional<Expr>> cache;
    auto bn = bound_columns(e.num(), b, cache);
    auto bd = bound_columns(e.den(), b, cache);
    if (bn.empty() && bd.empty()) return e;
    Frac fn = subs_poly(e.num(), bn);
    Frac fd = subs_poly(e.den(), bd);
    Expr top = Expr::fraction(fn.n, fn.d);
    if (e.is_poly()) return top;
    Expr bottom = Expr::fraction(fd.n, fd.d);
    if (bottom.is_zero()) throw DegenerateExpression("substitution makes the denominator vanish");
    return top / bottom;
}

std::ostream& operator<<(std::ostream& os, const Expr& e) { return os << to_string(e); }

namespace {

// p(s) = P0 + s*P1 modulo s^2 = r
std::pair<Expr, Expr> split_root(const Poly& p, Symbol s, const Expr& r) {
    auto c = coeffs_in(p, s.id);
    Expr even, odd, rk(1);
    for (size_t k = 0; k < c.size(); ++k) {
        if (k > 0 && k % 2 == 0) rk *= r;
        if (c[k].is_zero()) continue;
        (k % 2 == 0 ? even : odd) += Expr::from_poly(c[k]) * rk;
    }
    return {even, odd};
}

}  // namespace

Expr reduce_root(const Expr& e, Symbol s, const Expr& r) {
    if (!e.depends_on(s)) return e;
    auto [n0, n1] = split_root(e.num(), s, r);
    auto [d0, d1] = split_root(e.den(), s, r);
    if (d1.is_zero()) return (n0 + Expr(s) * n1) / d0;
    Expr den = d0 * d0 - r * d1 * d1;
    if (den.is_zero()) throw DegenerateExpression("denominator vanishes modulo the adjoined root");
    return (n0 * d0 - r * n1 * d1 + Expr(s) * (n1 * d0 - n0 * d1)) / den;
}

}  // namespace nf
