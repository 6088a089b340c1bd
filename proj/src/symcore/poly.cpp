#include "nframes/poly.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace nf {

namespace {

int cmp_mono(const uint32_t* a, const uint32_t* b, size_t n) {
    for (size_t k = 0; k < n; ++k) {
        if (a[k] != b[k]) return a[k] > b[k] ? 1 : -1;
    }
    return 0;
}

// both operands already share the same variable list
Poly merge(const Poly& a, const Poly& b, bool subtract) {
    const size_t n = a.nvars();
    Poly r;
    r.vars_ = a.vars_;
    r.ex_.reserve(a.ex_.size() + b.ex_.size());
    r.cf_.reserve(a.nterms() + b.nterms());
    size_t i = 0, j = 0;
    while (i < a.nterms() || j < b.nterms()) {
        int c;
        if (i == a.nterms()) c = -1;
        else if (j == b.nterms()) c = 1;
        else c = cmp_mono(a.mono(i), b.mono(j), n);
        if (c > 0) {
            r.ex_.insert(r.ex_.end(), a.mono(i), a.mono(i) + n);
            r.cf_.push_back(a.cf_[i]);
            ++i;
        } else if (c < 0) {
            r.ex_.insert(r.ex_.end(), b.mono(j), b.mono(j) + n);
            r.cf_.push_back(subtract ? mpz_class(-b.cf_[j]) : b.cf_[j]);
            ++j;
        } else {
            mpz_class s = subtract ? mpz_class(a.cf_[i] - b.cf_[j]) : mpz_class(a.cf_[i] + b.cf_[j]);
            if (s != 0) {
                r.ex_.insert(r.ex_.end(), a.mono(i), a.mono(i) + n);
                r.cf_.push_back(std::move(s));
            }
            ++i;
            ++j;
        }
    }
    r.trim();
    return r;
}

// a * (c * m) where m is an exponent row over a's variables
Poly shift(const Poly& a, const uint32_t* m, const mpz_class& c) {
    Poly r = a;
    const size_t n = a.nvars();
    for (size_t i = 0; i < a.nterms(); ++i) {
        for (size_t k = 0; k < n; ++k) r.ex_[i * n + k] += m[k];
        r.cf_[i] *= c;
    }
    return r;
}

}  // namespace

Poly::Poly(const mpz_class& c) {
    if (c != 0) cf_.push_back(c);
}

Poly Poly::var(uint32_t id, uint32_t power) {
    Poly p;
    if (power == 0) return Poly(mpz_class(1));
    p.vars_ = {id};
    p.ex_ = {power};
    p.cf_ = {mpz_class(1)};
    return p;
}

uint32_t Poly::exponent(size_t i, uint32_t id) const {
    auto it = std::lower_bound(vars_.begin(), vars_.end(), id);
    if (it == vars_.end() || *it != id) return 0;
    return mono(i)[it - vars_.begin()];
}

uint32_t Poly::degree(uint32_t id) const {
    auto it = std::lower_bound(vars_.begin(), vars_.end(), id);
    if (it == vars_.end() || *it != id) return 0;
    size_t k = it - vars_.begin();
    uint32_t d = 0;
    for (size_t i = 0; i < nterms(); ++i) d = std::max(d, mono(i)[k]);
    return d;
}

uint32_t Poly::total_degree() const {
    uint32_t d = 0;
    for (size_t i = 0; i < nterms(); ++i) {
        uint32_t s = 0;
        for (size_t k = 0; k < nvars(); ++k) s += mono(i)[k];
        d = std::max(d, s);
    }
    return d;
}

bool Poly::has_var(uint32_t id) const { return std::binary_search(vars_.begin(), vars_.end(), id); }

mpz_class Poly::content() const {
    mpz_class g = 0;
    for (const auto& c : cf_) {
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
        if (g == 1) break;
    }
    return g;
}

mpz_class Poly::max_norm() const {
    mpz_class m = 0;
    for (const auto& c : cf_) {
        if (mpz_cmpabs(c.get_mpz_t(), m.get_mpz_t()) > 0) m = abs(c);
    }
    return m;
}

size_t Poly::max_bits() const {
    size_t b = 0;
    for (const auto& c : cf_) b = std::max(b, mpz_sizeinbase(c.get_mpz_t(), 2));
    return b;
}

size_t Poly::hash() const {
    size_t h = std::hash<size_t>()(cf_.size());
    auto mix = [&h](size_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
    for (auto v : vars_) mix(v);
    for (auto e : ex_) mix(e);
    for (const auto& c : cf_) mix(mpz_get_si(c.get_mpz_t()) ^ mpz_sizeinbase(c.get_mpz_t(), 2));
    return h;
}

void Poly::Builder::add(const uint32_t* e, const mpz_class& c) {
    if (c == 0) return;
    ex.insert(ex.end(), e, e + vars.size());
    cf.push_back(c);
}

Poly Poly::Builder::finish() {
    const size_t n = vars.size();
    std::vector<size_t> idx(cf.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
        return cmp_mono(ex.data() + a * n, ex.data() + b * n, n) > 0;
    });
    Poly r;
    r.vars_ = std::move(vars);
    r.ex_.reserve(ex.size());
    r.cf_.reserve(cf.size());
    for (size_t t = 0; t < idx.size();) {
        size_t i = idx[t];
        mpz_class s = cf[i];
        size_t u = t + 1;
        while (u < idx.size() && cmp_mono(ex.data() + idx[u] * n, ex.data() + i * n, n) == 0) {
            s += cf[idx[u]];
            ++u;
        }
        if (s != 0) {
            r.ex_.insert(r.ex_.end(), ex.data() + i * n, ex.data() + (i + 1) * n);
            r.cf_.push_back(std::move(s));
        }
        t = u;
    }
    r.trim();
    return r;
}

void Poly::trim() {
    const size_t n = vars_.size();
    if (n == 0) return;
    std::vector<bool> used(n, false);
    size_t nused = 0;
    for (size_t i = 0; i < nterms() && nused < n; ++i) {
        for (size_t k = 0; k < n; ++k) {
            if (!used[k] && ex_[i * n + k] != 0) {
                used[k] = true;
                ++nused;
            }
        }
    }
    if (nused == n) return;
    std::vector<uint32_t> nv;
    std::vector<uint32_t> ne;
    ne.reserve(nterms() * nused);
    for (size_t k = 0; k < n; ++k)
        if (used[k]) nv.push_back(vars_[k]);
    for (size_t i = 0; i < nterms(); ++i)
        for (size_t k = 0; k < n; ++k)
            if (used[k]) ne.push_back(ex_[i * n + k]);
    vars_ = std::move(nv);
    ex_ = std::move(ne);
}

std::vector<uint32_t> union_vars(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b) {
    if (a == b) return a;
    std::vector<uint32_t> r;
    r.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(r));
    return r;
}

Poly widen(const Poly& a, const std::vector<uint32_t>& vars) {
    if (a.vars_ == vars) return a;
    const size_t n = a.nvars(), m = vars.size();
    std::vector<size_t> pos(n);
    for (size_t k = 0; k < n; ++k) {
        auto it = std::lower_bound(vars.begin(), vars.end(), a.vars_[k]);
        if (it == vars.end() || *it != a.vars_[k]) throw std::logic_error("widen: not a superset");
        pos[k] = it - vars.begin();
    }
    Poly r;
    r.vars_ = vars;
    r.cf_ = a.cf_;
    r.ex_.assign(a.nterms() * m, 0);
    for (size_t i = 0; i < a.nterms(); ++i)
        for (size_t k = 0; k < n; ++k) r.ex_[i * m + pos[k]] = a.ex_[i * n + k];
    return r;
}

Poly operator+(const Poly& a, const Poly& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (a.vars_ == b.vars_) return merge(a, b, false);
    auto v = union_vars(a.vars_, b.vars_);
    return merge(widen(a, v), widen(b, v), false);
}

Poly operator-(const Poly& a, const Poly& b) {
    if (b.is_zero()) return a;
    if (a.vars_ == b.vars_) return merge(a, b, true);
    auto v = union_vars(a.vars_, b.vars_);
    return merge(widen(a, v), widen(b, v), true);
}

Poly operator-(const Poly& a) {
    Poly r = a;
    for (auto& c : r.cf_) c = -c;
    return r;
}

Poly operator*(const Poly& a, const mpz_class& c) {
    if (c == 0) return Poly();
    Poly r = a;
    for (auto& x : r.cf_) x *= c;
    return r;
}

Poly operator*(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return Poly();
    if (a.is_const()) return b * a.cf_[0];
    if (b.is_const()) return a * b.cf_[0];
    auto v = union_vars(a.vars_, b.vars_);
    Poly wa = widen(a, v), wb = widen(b, v);
    if (wa.nterms() == 1) return shift(wb, wa.mono(0), wa.cf_[0]);
    if (wb.nterms() == 1) return shift(wa, wb.mono(0), wb.cf_[0]);
    const Poly& small = wa.nterms() <= wb.nterms() ? wa : wb;
    const Poly& big = wa.nterms() <= wb.nterms() ? wb : wa;
    // each row of `small` shifts `big` without disturbing its order, so sum shifted copies
    if (small.nterms() <= 8) {
        Poly acc;
        for (size_t i = 0; i < small.nterms(); ++i) {
            Poly s = shift(big, small.mono(i), small.cf_[i]);
            acc = acc.is_zero() ? std::move(s) : merge(acc, s, false);
            if (acc.vars_ != v && !acc.is_zero()) acc = widen(acc, v);
        }
        acc.trim();
        return acc;
    }
    const size_t n = v.size();
    Poly::Builder bld(v);
    bld.ex.reserve(wa.nterms() * wb.nterms() * n);
    bld.cf.reserve(wa.nterms() * wb.nterms());
    std::vector<uint32_t> row(n);
    for (size_t i = 0; i < wa.nterms(); ++i) {
        for (size_t j = 0; j < wb.nterms(); ++j) {
            for (size_t k = 0; k < n; ++k) row[k] = wa.mono(i)[k] + wb.mono(j)[k];
            bld.ex.insert(bld.ex.end(), row.begin(), row.end());
            bld.cf.push_back(wa.cf_[i] * wb.cf_[j]);
        }
    }
    return bld.finish();
}

Poly pow(const Poly& a, unsigned n) {
    Poly r(mpz_class(1)), base = a;
    while (n) {
        if (n & 1) r = r * base;
        n >>= 1;
        if (n) base = base * base;
    }
    return r;
}

Poly div_exact(const Poly& a, const mpz_class& c) {
    Poly r = a;
    for (auto& x : r.cf_) mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), c.get_mpz_t());
    return r;
}

std::optional<Poly> divide(const Poly& a, const Poly& b) {
    if (b.is_zero()) throw std::domain_error("polynomial division by zero");
    if (a.is_zero()) return Poly();
    if (b.is_const()) {
        Poly r = a;
        for (auto& x : r.cf_) {
            if (!mpz_divisible_p(x.get_mpz_t(), b.cf_[0].get_mpz_t())) return std::nullopt;
            mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), b.cf_[0].get_mpz_t());
        }
        return r;
    }
    for (auto v : b.vars_) {
        if (a.degree(v) < b.degree(v)) return std::nullopt;
    }
    if (b.nterms() == 1) {
        Poly bb = widen(b, a.vars_);
        Poly r = a;
        const size_t n = a.nvars();
        for (size_t i = 0; i < a.nterms(); ++i) {
            for (size_t k = 0; k < n; ++k) {
                if (r.ex_[i * n + k] < bb.ex_[k]) return std::nullopt;
                r.ex_[i * n + k] -= bb.ex_[k];
            }
            if (!mpz_divisible_p(r.cf_[i].get_mpz_t(), bb.cf_[0].get_mpz_t())) return std::nullopt;
            mpz_divexact(r.cf_[i].get_mpz_t(), r.cf_[i].get_mpz_t(), bb.cf_[0].get_mpz_t());
        }
        r.trim();
        return r;
    }
    const auto& v = a.vars_;
    const size_t n = v.size();
    Poly bb = widen(b, v);
    Poly rem = a;
    Poly::Builder q(v);
    std::vector<uint32_t> m(n);
    mpz_class c;
    while (!rem.is_zero()) {
        if (rem.vars_ != v) rem = widen(rem, v);
        const uint32_t* lr = rem.mono(0);
        const uint32_t* lb = bb.mono(0);
        for (size_t k = 0; k < n; ++k) {
            if (lr[k] < lb[k]) return std::nullopt;
            m[k] = lr[k] - lb[k];
        }
        if (!mpz_divisible_p(rem.cf_[0].get_mpz_t(), bb.cf_[0].get_mpz_t())) return std::nullopt;
        mpz_divexact(c.get_mpz_t(), rem.cf_[0].get_mpz_t(), bb.cf_[0].get_mpz_t());
        q.add(m.data(), c);
        rem = merge(rem, shift(bb, m.data(), c), true);
    }
    return q.finish();
}

Poly div_exact(const Poly& a, const Poly& b) {
    auto q = divide(a, b);
    if (!q) throw std::logic_error("div_exact: not divisible");
    return *q;
}

Poly primitive_part(const Poly& a) {
    if (a.is_zero()) return a;
    mpz_class c = a.content();
    if (a.lc() < 0) c = -c;
    return c == 1 ? a : div_exact(a, c);
}

Poly diff(const Poly& a, uint32_t id) {
    auto it = std::lower_bound(a.vars_.begin(), a.vars_.end(), id);
    if (it == a.vars_.end() || *it != id) return Poly();
    const size_t k = it - a.vars_.begin(), n = a.nvars();
    Poly r;
    r.vars_ = a.vars_;
    for (size_t i = 0; i < a.nterms(); ++i) {
        uint32_t e = a.mono(i)[k];
        if (e == 0) continue;
        r.ex_.insert(r.ex_.end(), a.mono(i), a.mono(i) + n);
        r.ex_[r.ex_.size() - n + k] = e - 1;
        r.cf_.push_back(a.cf_[i] * e);
    }
    r.trim();
    return r;
}

std::vector<Poly> coeffs_in(const Poly& a, uint32_t id) {
    auto it = std::lower_bound(a.vars_.begin(), a.vars_.end(), id);
    if (it == a.vars_.end() || *it != id) return {a};
    const size_t k = it - a.vars_.begin(), n = a.nvars();
    std::vector<uint32_t> rest;
    for (size_t j = 0; j < n; ++j)
        if (j != k) rest.push_back(a.vars_[j]);
    std::vector<Poly> out(a.degree(id) + 1);
    for (auto& p : out) p.vars_ = rest;
    for (size_t i = 0; i < a.nterms(); ++i) {
        Poly& p = out[a.mono(i)[k]];
        for (size_t j = 0; j < n; ++j)
            if (j != k) p.ex_.push_back(a.mono(i)[j]);
        p.cf_.push_back(a.cf_[i]);
    }
    for (auto& p : out) {
        if (p.is_zero()) p = Poly();
        else p.trim();
    }
    return out;
}

Poly from_coeffs(const std::vector<Poly>& c, uint32_t id) {
    Poly r;
    for (size_t k = c.size(); k-- > 0;) {
        if (c[k].is_zero()) continue;
        r = r + c[k] * Poly::var(id, static_cast<uint32_t>(k));
    }
    return r;
}

Poly subs_int(const Poly& a, uint32_t id, const mpz_class& v) {
    auto cs = coeffs_in(a, id);
    if (cs.size() == 1) return cs[0];
    Poly r = cs.back();
    for (size_t k = cs.size() - 1; k-- > 0;) r = r * v + cs[k];
    return r;
}

}  // namespace nf
