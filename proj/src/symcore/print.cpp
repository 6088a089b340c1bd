#include <algorithm>
#include <sstream>
#include <tuple>

#include "nframes/symcore.hpp"

namespace nf {

namespace {

int kind_rank(SymbolKind k) {
    switch (k) {
        case SymbolKind::group_param: return 0;
        case SymbolKind::constant: return 1;
        case SymbolKind::independent: return 2;
        case SymbolKind::dummy: return 3;
        case SymbolKind::dependent_jet: return 4;
        case SymbolKind::opaque: return 5;
    }
    return 6;
}

struct Factor {
    Symbol s;
    uint32_t e;
};

using RankKey = std::tuple<int, int, std::string>;

RankKey rank_of(Symbol s) { return {kind_rank(s.kind()), print_order(s), s.name()}; }

struct Term {
    mpz_class c;
    std::vector<Factor> f;
    std::vector<RankKey> keys;
    uint32_t deg = 0;
};

std::vector<Term> sorted_terms(const Poly& p) {
    std::vector<RankKey> vkeys;
    for (auto id : p.vars()) vkeys.push_back(rank_of(Symbol{id}));
    std::vector<size_t> order(p.nvars());
    for (size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return vkeys[a] < vkeys[b]; });
    std::vector<Term> terms;
    for (size_t i = 0; i < p.nterms(); ++i) {
        Term t;
        t.c = p.coeff(i);
        for (size_t k : order) {
            uint32_t e = p.mono(i)[k];
            if (!e) continue;
            t.f.push_back({Symbol{p.vars()[k]}, e});
            t.keys.push_back(vkeys[k]);
            t.deg += e;
        }
        terms.push_back(std::move(t));
    }
    std::stable_sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) {
        if (a.deg != b.deg) return a.deg > b.deg;
        size_t n = std::min(a.f.size(), b.f.size());
        for (size_t k = 0; k < n; ++k) {
            if (a.keys[k] != b.keys[k]) return a.keys[k] < b.keys[k];
            if (a.f[k].e != b.f[k].e) return a.f[k].e > b.f[k].e;
        }
        return a.f.size() > b.f.size();
    });
    return terms;
}

std::string poly_text(const Poly& p) {
    if (p.is_zero()) return "0";
    std::string out;
    bool first = true;
    for (const auto& t : sorted_terms(p)) {
        mpz_class c = t.c;
        if (first) {
            if (c < 0) {
                out += "-";
                c = -c;
            }
        } else {
            out += c < 0 ? " - " : " + ";
            c = abs(c);
        }
        first = false;
        std::string body;
        for (const auto& f : t.f) {
            if (!body.empty()) body += "*";
            body += f.s.name();
            if (f.e != 1) body += "^" + std::to_string(f.e);
        }
        if (body.empty()) out += c.get_str();
        else if (c == 1) out += body;
        else out += c.get_str() + "*" + body;
    }
    return out;
}

bool single_atom(const Poly& p) {
    return p.nterms() == 1 && p.coeff(0) == 1 && p.nvars() == 1;
}

std::string latex_name_part(const std::string& s) {
    static const char* greek[] = {"alpha", "beta", "gamma", "delta", "epsilon", "kappa", "lambda", "mu",
                                  "nu", "xi", "rho", "sigma", "tau", "phi", "psi", "omega", "theta", "eta"};
    for (const char* g : greek)
        if (s == g) return std::string("\\") + g;
    if (s == "Omega") return "\\Omega";
    return s;
}

std::string poly_latex(const Poly& p) {
    if (p.is_zero()) return "0";
    std::string out;
    bool first = true;
    for (const auto& t : sorted_terms(p)) {
        mpz_class c = t.c;
        if (first) {
            if (c < 0) {
                out += "-";
                c = -c;
            }
        } else {
            out += c < 0 ? " - " : " + ";
            c = abs(c);
        }
        first = false;
        std::string body;
        for (const auto& f : t.f) {
            if (!body.empty()) body += " ";
            std::string nm = symbol_latex(f.s);
            if (f.e != 1) {
                if (nm.find('_') != std::string::npos || nm.find('(') != std::string::npos) nm = "\\left(" + nm + "\\right)";
                nm += "^{" + std::to_string(f.e) + "}";
            }
            body += nm;
        }
        if (body.empty()) out += c.get_str();
        else if (c == 1) out += body;
        else out += c.get_str() + " " + body;
    }
    return out;
}

}  // namespace

std::string symbol_latex(Symbol s) {
    if (const OpaqueInfo* op = opaque_info(s)) {
        std::string out = latex_name_part(op->fn);
        std::string sub;
        for (size_t i = 0; i < op->dcount.size(); ++i)
            for (int k = 0; k < op->dcount[i]; ++k) sub += std::to_string(i + 1);
        if (!sub.empty()) out += "_{" + sub + "}";
        out += "\\left(";
        for (size_t i = 0; i < op->args.size(); ++i) out += (i ? ", " : "") + to_latex(op->args[i]);
        return out + "\\right)";
    }
    const std::string& n = s.name();
    auto us = n.find('_');
    if (us == std::string::npos || us == 0) return latex_name_part(n);
    std::string base = n.substr(0, us), sub = n.substr(us + 1);
    std::string subl;
    // jet suffixes spell independent names; greek ones get their macro
    for (size_t i = 0; i < sub.size();) {
        if (sub.compare(i, 3, "tau") == 0) {
            subl += "\\tau ";
            i += 3;
        } else {
            subl += sub[i++];
        }
    }
    while (!subl.empty() && subl.back() == ' ') subl.pop_back();
    return latex_name_part(base) + "_{" + subl + "}";
}

std::string to_string(const Expr& e) {
    if (e.is_poly()) return poly_text(e.num());
    std::string n = poly_text(e.num());
    if (e.num().nterms() > 1) n = "(" + n + ")";
    std::string d = poly_text(e.den());
    bool atom = e.den().is_const() || single_atom(e.den());
    if (!atom) d = "(" + d + ")";
    return n + "/" + d;
}

std::string to_latex(const Expr& e) {
    if (e.is_poly()) return poly_latex(e.num());
    Poly n = e.num();
    std::string sign;
    if (n.lc() < 0 && n.nterms() == 1) {
        sign = "-";
        n = -n;
    }
    return sign + "\\frac{" + poly_latex(n) + "}{" + poly_latex(e.den()) + "}";
}

}  // namespace nf
