// Sparse multivariate polynomials over Z.
//
// A Poly keeps its own sorted list of variable ids and stores one dense
// exponent row per term. Terms are kept in strictly decreasing lex order
// (column 0 most significant) and every stored coefficient is nonzero.
#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nf {

class Poly {
public:
    Poly() = default;
    explicit Poly(const mpz_class& c);
    static Poly var(uint32_t id, uint32_t power = 1);

    bool is_zero() const { return cf_.empty(); }
    bool is_const() const { return vars_.empty(); }
    bool is_one() const { return vars_.empty() && cf_.size() == 1 && cf_[0] == 1; }
    size_t nterms() const { return cf_.size(); }
    size_t nvars() const { return vars_.size(); }
    const std::vector<uint32_t>& vars() const { return vars_; }
    const uint32_t* mono(size_t i) const { return ex_.data() + i * vars_.size(); }
    const mpz_class& coeff(size_t i) const { return cf_[i]; }
    const mpz_class& lc() const { return cf_.front(); }
    mpz_class const_value() const { return cf_.empty() ? mpz_class(0) : cf_[0]; }

    // exponent of variable `id` in term i (0 when absent)
    uint32_t exponent(size_t i, uint32_t id) const;
    uint32_t degree(uint32_t id) const;
    uint32_t total_degree() const;
    bool has_var(uint32_t id) const;

    mpz_class content() const;
    mpz_class max_norm() const;
    size_t max_bits() const;

    friend bool operator==(const Poly& a, const Poly& b) {
        return a.vars_ == b.vars_ && a.ex_ == b.ex_ && a.cf_ == b.cf_;
    }
    friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }
    size_t hash() const;

    // builder: append terms in any order, then call finish()
    struct Builder {
        std::vector<uint32_t> vars;
        std::vector<uint32_t> ex;
        std::vector<mpz_class> cf;
        explicit Builder(std::vector<uint32_t> v) : vars(std::move(v)) {}
        void add(const uint32_t* e, const mpz_class& c);
        Poly finish();
    };

    std::vector<uint32_t> vars_;
    std::vector<uint32_t> ex_;
    std::vector<mpz_class> cf_;

    void trim();
};

Poly operator+(const Poly& a, const Poly& b);
Poly operator-(const Poly& a, const Poly& b);
Poly operator-(const Poly& a);
Poly operator*(const Poly& a, const Poly& b);
Poly operator*(const Poly& a, const mpz_class& c);
Poly pow(const Poly& a, unsigned n);

// exact quotient of a by the integer c (caller guarantees divisibility)
Poly div_exact(const Poly& a, const mpz_class& c);
// quotient a/b if b divides a exactly in Z[vars], otherwise nullopt
std::optional<Poly> divide(const Poly& a, const Poly& b);
Poly div_exact(const Poly& a, const Poly& b);

Poly primitive_part(const Poly& a);
Poly diff(const Poly& a, uint32_t id);
// coefficients of a as a polynomial in variable id, index = power
std::vector<Poly> coeffs_in(const Poly& a, uint32_t id);
Poly from_coeffs(const std::vector<Poly>& c, uint32_t id);
Poly subs_int(const Poly& a, uint32_t id, const mpz_class& v);

// gcd with positive leading coefficient; gcd(0,0) = 0
Poly gcd(const Poly& a, const Poly& b);

// exact evaluation; `value` is looked up per variable id
template <class F>
mpq_class eval(const Poly& a, F&& value) {
    std::vector<mpq_class> vals;
    vals.reserve(a.nvars());
    for (auto v : a.vars()) vals.push_back(value(v));
    mpq_class sum = 0, t, p;
    for (size_t i = 0; i < a.nterms(); ++i) {
        t = a.coeff(i);
        const uint32_t* m = a.mono(i);
        for (size_t k = 0; k < a.nvars(); ++k) {
            if (m[k] == 0) continue;
            mpz_pow_ui(p.get_num_mpz_t(), vals[k].get_num_mpz_t(), m[k]);
            mpz_pow_ui(p.get_den_mpz_t(), vals[k].get_den_mpz_t(), m[k]);
            t *= p;
        }
        sum += t;
    }
    return sum;
}

// merge two sorted variable lists
std::vector<uint32_t> union_vars(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b);
// re-express a over a superset of its variables
Poly widen(const Poly& a, const std::vector<uint32_t>& vars);

}  // namespace nf
