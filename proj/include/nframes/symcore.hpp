// Exact symbolic kernel: symbols, rational-function expressions, derivatives,
// substitution and zero testing.
#pragma once

#include <gmpxx.h>

#include <functional>
#include <map>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "nframes/poly.hpp"

namespace nf {

struct DegenerateExpression : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class SymbolKind {
    independent,
    dependent_jet,
    group_param,
    dummy,
    constant,  // named problem constants (g, f, c1, ...)
    opaque,    // applied opaque function or one of its derivatives
};

const char* kind_name(SymbolKind k);

class Expr;

struct Symbol {
    uint32_t id = UINT32_MAX;
    bool valid() const { return id != UINT32_MAX; }
    const std::string& name() const;
    SymbolKind kind() const;
    friend bool operator==(Symbol a, Symbol b) { return a.id == b.id; }
    friend bool operator!=(Symbol a, Symbol b) { return a.id != b.id; }
    friend bool operator<(Symbol a, Symbol b) { return a.id < b.id; }
};

// Symbols are interned by (name, kind): asking twice returns the same atom.
Symbol symbol(const std::string& name, SymbolKind kind);
// lookup without creating; invalid Symbol if absent
Symbol find_symbol(const std::string& name, SymbolKind kind);

// Tag consulted by the printer to order factors (jet order for jet coordinates).
void set_print_order(Symbol s, int order);
int print_order(Symbol s);

class Expr {
public:
    Expr();
    Expr(long v);  // NOLINT(google-explicit-constructor)
    Expr(int v) : Expr(static_cast<long>(v)) {}  // NOLINT
    explicit Expr(const mpq_class& q);
    explicit Expr(Symbol s);
    // num/den with no further simplification assumed
    static Expr fraction(const Poly& num, const Poly& den);
    static Expr from_poly(const Poly& p);

    const Poly& num() const;
    const Poly& den() const;

    bool is_zero() const { return num().is_zero(); }
    bool is_const() const { return num().is_const() && den().is_const(); }
    bool is_one() const { return num().is_one() && den().is_one(); }
    bool is_poly() const { return den().is_one(); }
    mpq_class const_value() const;
    bool is_symbol() const;
    Symbol as_symbol() const;

    // every symbol id occurring in num or den (sorted)
    std::vector<uint32_t> symbols() const;
    bool depends_on(Symbol s) const;

    size_t hash() const;
    friend bool operator==(const Expr& a, const Expr& b);
    friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

    Expr& operator+=(const Expr& o);
    Expr& operator-=(const Expr& o);
    Expr& operator*=(const Expr& o);
    Expr& operator/=(const Expr& o);

private:
    struct Rep;
    std::shared_ptr<const Rep> rep_;
    explicit Expr(std::shared_ptr<const Rep> r) : rep_(std::move(r)) {}
    static Expr fraction_raw(Poly num, Poly den);
    friend Expr make_normal(Poly num, Poly den);
    friend Expr make_raw(Poly num, Poly den);
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr pow(const Expr& a, long n);

struct ExprHash {
    size_t operator()(const Expr& e) const { return e.hash(); }
};

// Canonical representative. Expr values are kept canonical by construction,
// so this is the identity; it exists so callers can state intent.
Expr normal_form(const Expr& e);

// Zero test: canonical numerator check cross-checked against evaluation at
// `samples` random rational points. Throws std::logic_error if they disagree.
bool is_zero(const Expr& e, int samples = 20);

// Partial derivative; opaque atoms contribute through the chain rule.
Expr diff(const Expr& e, Symbol s);

// Derivation defined by its value on plain atoms; opaque atoms use the chain rule.
using AtomDerivative = std::function<Expr(Symbol)>;
Expr apply_derivation(const Expr& e, const AtomDerivative& d);

using Bindings = std::map<Symbol, Expr>;
Expr substitute(const Expr& e, const Bindings& b);

// Reduce modulo s^2 = r (r free of s): the result is a + b*s with a, b free of s.
Expr reduce_root(const Expr& e, Symbol s, const Expr& r);

// Exact evaluation; throws DegenerateExpression on a vanishing denominator.
mpq_class evaluate(const Expr& e, const std::map<Symbol, mpq_class>& values);

// --- opaque functions -------------------------------------------------------
// F(args) and its partial derivatives. dcount[i] = number of derivatives taken
// in argument i. Each distinct (name, dcount, args) is one atom.
Symbol opaque_atom(const std::string& fn, const std::vector<Expr>& args, const std::vector<int>& dcount = {});
Expr opaque(const std::string& fn, const std::vector<Expr>& args);
struct OpaqueInfo {
    std::string fn;
    std::vector<Expr> args;
    std::vector<int> dcount;
};
const OpaqueInfo* opaque_info(Symbol s);

// --- printing ---------------------------------------------------------------
std::string to_string(const Expr& e);
std::string to_latex(const Expr& e);
std::string symbol_latex(Symbol s);
std::ostream& operator<<(std::ostream& os, const Expr& e);

// Random source shared by sampling checks; reseeded by callers for determinism.
void set_sampling_seed(unsigned long long seed);
unsigned long long sampling_seed();
mpq_class random_rational();
mpq_class random_rational(std::mt19937_64& g);

}  // namespace nf
