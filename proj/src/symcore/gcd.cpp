// Multivariate gcd over Z.
//
// Order of attack: contents and monomial factors, variables present in only one
// operand, a modular coprimality test, the heuristic gcd of Char, Geddes and
// Gonnet, and finally a primitive pseudo-remainder sequence.
#include <algorithm>
#include <random>
#include <stdexcept>

#include "nframes/poly.hpp"

namespace nf {

namespace {

using u64 = unsigned long long;
using u128 = unsigned __int128;
constexpr u64 kPrime = (1ULL << 61) - 1;

u64 mulmod(u64 a, u64 b) {
    u128 p = static_cast<u128>(a) * b;
    u64 lo = static_cast<u64>(p & kPrime), hi = static_cast<u64>(p >> 61);
    u64 s = lo + hi;
    return s >= kPrime ? s - kPrime : s;
}
u64 addmod(u64 a, u64 b) {
    u64 s = a + b;
    return s >= kPrime ? s - kPrime : s;
}
u64 submod(u64 a, u64 b) { return a >= b ? a - b : a + kPrime - b; }
u64 powmod(u64 a, u64 e) {
    u64 r = 1;
    while (e) {
        if (e & 1) r = mulmod(r, a);
        a = mulmod(a, a);
        e >>= 1;
    }
    return r;
}
u64 invmod(u64 a) { return powmod(a, kPrime - 2); }
u64 zmod(const mpz_class& c) {
    static const mpz_class P(std::to_string(kPrime));
    mpz_class r;
    mpz_fdiv_r(r.get_mpz_t(), c.get_mpz_t(), P.get_mpz_t());
    return mpz_get_ui(r.get_mpz_t());
}

std::mt19937_64& rng() {
    thread_local std::mt19937_64 g(0x5eed1234ULL);
    return g;
}

// image of p in Z_p[t], t = variable at column k, all other columns evaluated at vals
std::vector<u64> univariate_image(const Poly& p, size_t k, const std::vector<u64>& vals) {
    std::vector<u64> out(p.degree(p.vars()[k]) + 1, 0);
    for (size_t i = 0; i < p.nterms(); ++i) {
        u64 t = zmod(p.coeff(i));
        const uint32_t* m = p.mono(i);
        for (size_t j = 0; j < p.nvars(); ++j) {
            if (j == k || m[j] == 0) continue;
            t = mulmod(t, powmod(vals[j], m[j]));
        }
        out[m[k]] = addmod(out[m[k]], t);
    }
    while (!out.empty() && out.back() == 0) out.pop_back();
    return out;
}

size_t modgcd_degree(std::vector<u64> a, std::vector<u64> b) {
    if (a.size() < b.size()) std::swap(a, b);
    while (!b.empty()) {
        u64 inv = invmod(b.back());
        while (a.size() >= b.size() && !a.empty()) {
            u64 f = mulmod(a.back(), inv);
            size_t off = a.size() - b.size();
            for (size_t i = 0; i < b.size(); ++i) a[off + i] = submod(a[off + i], mulmod(f, b[i]));
            while (!a.empty() && a.back() == 0) a.pop_back();
        }
        std::swap(a, b);
    }
    return a.empty() ? 0 : a.size() - 1;
}

// true when A and B (same variables) certainly have no nonconstant common factor
bool surely_coprime(const Poly& A, const Poly& B) {
    const size_t n = A.nvars();
    std::uniform_int_distribution<u64> dist(1, kPrime - 1);
    for (size_t k = 0; k < n; ++k) {
        uint32_t id = A.vars()[k];
        size_t da = A.degree(id), db = B.degree(id);
        bool decided = false;
        for (int attempt = 0; attempt < 3 && !decided; ++attempt) {
            std::vector<u64> vals(n);
            for (auto& v : vals) v = dist(rng());
            auto ia = univariate_image(A, k, vals);
            auto ib = univariate_image(B, k, vals);
            if (ia.size() != da + 1 || ib.size() != db + 1) continue;
            if (modgcd_degree(ia, ib) > 0) return false;
            decided = true;
        }
        if (!decided) return false;
    }
    return true;
}

Poly normalize_sign(Poly p) {
    if (!p.is_zero() && p.lc() < 0) p = -p;
    return p;
}

Poly gcd_prim(const Poly& A, const Poly& B);

Poly gcd_many(Poly g, const std::vector<Poly>& cs) {
    for (const auto& c : cs) {
        if (c.is_zero()) continue;
        g = gcd(g, c);
        if (g.is_one()) break;
    }
    return g;
}

mpz_class isqrt(const mpz_class& x) {
    mpz_class r;
    mpz_sqrt(r.get_mpz_t(), x.get_mpz_t());
    return r;
}

Poly symmetric_mod(const Poly& h, const mpz_class& xi) {
    Poly r = h;
    mpz_class half = xi / 2;
    for (auto& c : r.cf_) {
        mpz_fdiv_r(c.get_mpz_t(), c.get_mpz_t(), xi.get_mpz_t());
        if (c > half) c -= xi;
    }
    // drop zero coefficients
    Poly::Builder b(r.vars_);
    for (size_t i = 0; i < r.nterms(); ++i) b.add(r.mono(i), r.cf_[i]);
    return b.finish();
}

Poly interpolate(Poly h, const mpz_class& xi, uint32_t id) {
    Poly G;
    uint32_t i = 0;
    while (!h.is_zero()) {
        Poly g = symmetric_mod(h, xi);
        if (!g.is_zero()) G = G + g * Poly::var(id, i);
        h = div_exact(h - g, xi);
        ++i;
    }
    return G;
}

constexpr size_t kHeuBitLimit = 60000;

std::optional<Poly> heu_gcd(const Poly& f, const Poly& g) {
    if (f.is_const() || g.is_const()) return Poly(gcd(f.content(), g.content()));
    uint32_t x = f.vars()[0];
    mpz_class fn = f.max_norm(), gn = g.max_norm();
    mpz_class B = 2 * std::min(fn, gn) + 29;
    mpz_class xi = std::max(mpz_class(std::min(B, mpz_class(99 * isqrt(B)))),
                            mpz_class(2 * std::min(mpz_class(fn / abs(f.lc())), mpz_class(gn / abs(g.lc()))) + 2));
    for (int attempt = 0; attempt < 6; ++attempt) {
        if (mpz_sizeinbase(xi.get_mpz_t(), 2) * std::max(f.total_degree(), g.total_degree()) > kHeuBitLimit)
            return std::nullopt;
        Poly ff = subs_int(f, x, xi), gg = subs_int(g, x, xi);
        if (!ff.is_zero() && !gg.is_zero() && ff.max_bits() < kHeuBitLimit && gg.max_bits() < kHeuBitLimit) {
            Poly h = gcd(ff, gg);
            Poly cand = primitive_part(interpolate(h, xi, x));
            if (!cand.is_zero() && !cand.is_const() && divide(f, cand) && divide(g, cand)) return cand;
            if (cand.is_const()) {
                // a constant image gcd still needs confirming only through the modular test
            }
        }
        xi = 73794 * xi * isqrt(isqrt(xi)) / 27011;
    }
    return std::nullopt;
}

std::vector<Poly> prem_coeffs(std::vector<Poly> a, const std::vector<Poly>& b) {
    const size_t db = b.size() - 1;
    const Poly& lb = b.back();
    while (a.size() >= b.size()) {
        Poly la = a.back();
        size_t off = a.size() - b.size();
        for (auto& c : a) c = c * lb;
        for (size_t i = 0; i <= db; ++i) a[off + i] = a[off + i] - la * b[i];
        while (!a.empty() && a.back().is_zero()) a.pop_back();
        (void)off;
    }
    return a;
}

std::vector<Poly> pp_coeffs(const std::vector<Poly>& c) {
    Poly g;
    for (const auto& x : c) {
        if (x.is_zero()) continue;
        g = g.is_zero() ? normalize_sign(x) : gcd(g, x);
        if (g.is_one()) return c;
    }
    std::vector<Poly> out;
    for (const auto& x : c) out.push_back(div_exact(x, g));
    return out;
}

Poly prs_gcd(const Poly& A, const Poly& B) {
    uint32_t x = A.vars()[0];
    uint32_t best = UINT32_MAX;
    for (auto v : A.vars()) {
        uint32_t d = std::max(A.degree(v), B.degree(v));
        if (d < best) {
            best = d;
            x = v;
        }
    }
    auto ca = coeffs_in(A, x), cb = coeffs_in(B, x);
    Poly conta = gcd_many(Poly(), ca), contb = gcd_many(Poly(), cb);
    Poly c = gcd(conta, contb);
    auto a = pp_coeffs(ca), b = pp_coeffs(cb);
    if (a.size() < b.size()) std::swap(a, b);
    std::vector<Poly> result;
    while (true) {
        auto r = prem_coeffs(a, b);
        if (r.empty()) {
            result = b;
            break;
        }
        if (r.size() == 1) {
            result = {Poly(mpz_class(1))};
            break;
        }
        a = std::move(b);
        b = pp_coeffs(r);
    }
    Poly g = from_coeffs(pp_coeffs(result), x);
    return normalize_sign(g * c);
}

Poly gcd_prim(const Poly& A, const Poly& B) {
    if (A.is_const() || B.is_const()) return Poly(mpz_class(1));
    if (A == B) return normalize_sign(A);
    for (auto v : A.vars()) {
        if (!B.has_var(v)) return normalize_sign(gcd_many(B, coeffs_in(A, v)));
    }
    for (auto v : B.vars()) {
        if (!A.has_var(v)) return normalize_sign(gcd_many(A, coeffs_in(B, v)));
    }
    if (A.nterms() == 1 || B.nterms() == 1) return Poly(mpz_class(1));
    if (surely_coprime(A, B)) return Poly(mpz_class(1));
    if (auto h = heu_gcd(A, B)) return normalize_sign(*h);
    return prs_gcd(A, B);
}

}  // namespace

Poly gcd(const Poly& a, const Poly& b) {
    if (a.is_zero()) return normalize_sign(b);
    if (b.is_zero()) return normalize_sign(a);
    mpz_class ca = a.content(), cb = b.content();
    mpz_class c = gcd(ca, cb);
    if (a.is_const() || b.is_const()) return Poly(c);
    Poly A = div_exact(a, ca), B = div_exact(b, cb);
    // strip monomial factors
    auto vars = union_vars(A.vars(), B.vars());
    Poly wa = widen(A, vars), wb = widen(B, vars);
    const size_t n = vars.size();
    std::vector<uint32_t> ma(n, UINT32_MAX), mb(n, UINT32_MAX), mg(n);
    for (size_t i = 0; i < wa.nterms(); ++i)
        for (size_t k = 0; k < n; ++k) ma[k] = std::min(ma[k], wa.mono(i)[k]);
    for (size_t i = 0; i < wb.nterms(); ++i)
        for (size_t k = 0; k < n; ++k) mb[k] = std::min(mb[k], wb.mono(i)[k]);
    bool any = false;
    for (size_t k = 0; k < n; ++k) {
        mg[k] = std::min(ma[k], mb[k]);
        if (ma[k] || mb[k]) any = true;
    }
    if (any) {
        auto strip = [&](Poly& p, const std::vector<uint32_t>& m) {
            for (size_t i = 0; i < p.nterms(); ++i)
                for (size_t k = 0; k < n; ++k) p.ex_[i * n + k] -= m[k];
            p.trim();
        };
        strip(wa, ma);
        strip(wb, mb);
    }
    Poly g = gcd_prim(wa.is_zero() ? wa : wa, wb);
    Poly mono(mpz_class(1));
    bool has_mono = false;
    for (size_t k = 0; k < n; ++k) {
        if (mg[k]) {
            mono = mono * Poly::var(vars[k], mg[k]);
            has_mono = true;
        }
    }
    if (has_mono) g = g * mono;
    return normalize_sign(g * c);
}

}  // namespace nf
