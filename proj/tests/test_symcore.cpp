#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <map>
#include <random>

#include "nframes/parse.hpp"
#include "nframes/symcore.hpp"

using namespace nf;

namespace {

struct Vars {
    Expr x = Expr(symbol("x", SymbolKind::independent));
    Expr y = Expr(symbol("y", SymbolKind::independent));
    Expr u = Expr(symbol("u", SymbolKind::dependent_jet));
    Expr ux = Expr(symbol("u_x", SymbolKind::dependent_jet));
    Expr uy = Expr(symbol("u_y", SymbolKind::dependent_jet));
    Expr uxx = Expr(symbol("u_xx", SymbolKind::dependent_jet));
    Expr uxy = Expr(symbol("u_xy", SymbolKind::dependent_jet));
    Expr uyy = Expr(symbol("u_yy", SymbolKind::dependent_jet));
    Expr a = Expr(symbol("a", SymbolKind::group_param));
    Expr b = Expr(symbol("b", SymbolKind::group_param));
    Expr c = Expr(symbol("c", SymbolKind::group_param));
    Expr d = Expr(symbol("d", SymbolKind::group_param));
    std::vector<Expr> all() const { return {x, y, u, ux, uy, uxx, uxy, uyy, a, b, c, d}; }
};

Expr P(const std::string& s) {
    Vars v;
    std::map<std::string, Expr> m;
    for (auto& e : v.all()) m.emplace(e.as_symbol().name(), e);
    return parse_expr(s, [&](const std::string& n) -> std::optional<Expr> {
        auto it = m.find(n);
        if (it == m.end()) return std::nullopt;
        return it->second;
    });
}

// expression tree evaluated independently of the kernel's normal form
struct Tree {
    enum Op { Const, Var, Add, Sub, Mul, Div, Pow } op;
    long k = 0;
    int var = 0;
    std::shared_ptr<Tree> l, r;
};

std::shared_ptr<Tree> random_tree(std::mt19937_64& g, int depth, int nvars) {
    std::uniform_int_distribution<int> pick(0, 9);
    auto t = std::make_shared<Tree>();
    int p = depth <= 0 ? pick(g) % 2 : pick(g);
    switch (p) {
        case 0:
            t->op = Tree::Const;
            t->k = std::uniform_int_distribution<long>(-5, 5)(g);
            return t;
        case 1:
        case 2:
            t->op = Tree::Var;
            t->var = std::uniform_int_distribution<int>(0, nvars - 1)(g);
            return t;
        case 3:
        case 4: t->op = Tree::Add; break;
        case 5: t->op = Tree::Sub; break;
        case 6:
        case 7: t->op = Tree::Mul; break;
        case 8: t->op = Tree::Div; break;
        default:
            t->op = Tree::Pow;
            t->k = std::uniform_int_distribution<long>(-2, 3)(g);
            t->l = random_tree(g, depth - 1, nvars);
            return t;
    }
    t->l = random_tree(g, depth - 1, nvars);
    t->r = random_tree(g, depth - 1, nvars);
    return t;
}

std::optional<Expr> build(const Tree& t, const std::vector<Expr>& vars) {
    switch (t.op) {
        case Tree::Const: return Expr(t.k);
        case Tree::Var: return vars[t.var];
        case Tree::Pow: {
            auto l = build(*t.l, vars);
            if (!l || (t.k < 0 && l->is_zero())) return std::nullopt;
            return pow(*l, t.k);
        }
        default: break;
    }
    auto l = build(*t.l, vars), r = build(*t.r, vars);
    if (!l || !r) return std::nullopt;
    switch (t.op) {
        case Tree::Add: return *l + *r;
        case Tree::Sub: return *l - *r;
        case Tree::Mul: return *l * *r;
        case Tree::Div:
            if (r->is_zero()) return std::nullopt;
            return *l / *r;
        default: return std::nullopt;
    }
}

std::optional<mpq_class> eval_tree(const Tree& t, const std::vector<mpq_class>& pt) {
    switch (t.op) {
        case Tree::Const: return mpq_class(t.k);
        case Tree::Var: return pt[t.var];
        case Tree::Pow: {
            auto l = eval_tree(*t.l, pt);
            if (!l) return std::nullopt;
            if (t.k < 0 && *l == 0) return std::nullopt;
            mpq_class r = 1;
            for (long i = 0; i < std::labs(t.k); ++i) r *= *l;
            if (t.k < 0) r = 1 / r;
            return r;
        }
        default: break;
    }
    auto l = eval_tree(*t.l, pt), r = eval_tree(*t.r, pt);
    if (!l || !r) return std::nullopt;
    switch (t.op) {
        case Tree::Add: return mpq_class(*l + *r);
        case Tree::Sub: return mpq_class(*l - *r);
        case Tree::Mul: return mpq_class(*l * *r);
        case Tree::Div:
            if (*r == 0) return std::nullopt;
            return mpq_class(*l / *r);
        default: return std::nullopt;
    }
}

std::vector<Expr> random_exprs(int count, unsigned seed, int depth = 4) {
    Vars v;
    auto pool = std::vector<Expr>{v.x, v.y, v.ux, v.uy, v.a};
    std::mt19937_64 g(seed);
    std::vector<Expr> out;
    while (static_cast<int>(out.size()) < count) {
        auto t = random_tree(g, depth, static_cast<int>(pool.size()));
        if (auto e = build(*t, pool)) out.push_back(*e);
    }
    return out;
}

}  // namespace

TEST_CASE("normal form cancels and orders") {
    Vars v;
    CHECK((v.x * v.ux + v.y * v.uy) - (v.y * v.uy + v.x * v.ux) == Expr());
    Expr q = (v.ux * v.ux - v.uy * v.uy) / (v.ux - v.uy);
    CHECK(q == v.ux + v.uy);
    CHECK(q.is_poly());
    CHECK_THROWS_AS((void)(v.x / (v.x - v.x)), DegenerateExpression);
}

TEST_CASE("normal form is idempotent and agrees with tree evaluation") {
    Vars v;
    auto pool = std::vector<Expr>{v.x, v.y, v.ux, v.uy, v.a};
    std::mt19937_64 g(7);
    int checked = 0;
    while (checked < 100) {
        auto t = random_tree(g, 4, 5);
        auto e = build(*t, pool);
        if (!e) continue;
        CHECK(normal_form(normal_form(*e)) == normal_form(*e));
        // evaluate both the tree and the normal form at a random point
        for (int s = 0; s < 3; ++s) {
            std::vector<mpq_class> pt;
            std::map<Symbol, mpq_class> vals;
            for (auto& p : pool) {
                pt.push_back(random_rational(g));
                vals[p.as_symbol()] = pt.back();
            }
            auto tv = eval_tree(*t, pt);
            if (!tv) continue;
            try {
                CHECK(evaluate(*e, vals) == *tv);
            } catch (const DegenerateExpression&) {
                // the reduced form can only be more defined than the tree
                CHECK(false);
            }
        }
        ++checked;
    }
}

TEST_CASE("is_zero examples") {
    Vars v;
    CHECK(is_zero(v.ux * v.uy - v.uy * v.ux));
    CHECK_FALSE(is_zero(v.uxx * v.uyy - v.uxy * v.uxy));
    Expr f = (v.a * v.x + v.b) / (v.c * v.x + v.d);
    Expr fp = diff(f, v.x.as_symbol());
    CHECK(is_zero(fp * pow(v.c * v.x + v.d, 2) - (v.a * v.d - v.b * v.c)));
}

TEST_CASE("is_zero agrees with sampling on a random corpus") {
    auto es = random_exprs(60, 11);
    for (size_t i = 0; i + 1 < es.size(); i += 2) {
        Expr s = es[i] * es[i + 1] - es[i + 1] * es[i];
        CHECK(is_zero(s));
        CHECK(is_zero(es[i] - es[i]));
        if (!es[i].is_zero()) CHECK_FALSE(is_zero(es[i] + 1 - es[i] * 0 - es[i] + es[i]));
    }
}

TEST_CASE("diff examples") {
    Vars v;
    CHECK(diff(v.x * v.x * v.uxx, v.x.as_symbol()) == 2 * v.x * v.uxx);
    Expr f = (v.a * v.x + v.b) / (v.c * v.x + v.d);
    CHECK(diff(f, v.a.as_symbol()) == v.x / (v.c * v.x + v.d));
    Expr kappa = Expr(symbol("kappa", SymbolKind::constant));
    Expr dk = Expr(symbol("kappa_s", SymbolKind::constant));
    Expr L = opaque("L", {kappa, dk});
    Expr Lk = diff(L, kappa.as_symbol());
    CHECK(Lk == Expr(opaque_atom("L", {kappa, dk}, {1, 0})));
    CHECK(to_string(Lk) == "L_1(kappa, kappa_s)");
    CHECK(diff(Lk, dk.as_symbol()) == Expr(opaque_atom("L", {kappa, dk}, {1, 1})));
    // chain rule through a compound argument
    Expr G = opaque("G", {v.x * v.ux});
    CHECK(diff(G, v.ux.as_symbol()) == v.x * Expr(opaque_atom("G", {v.x * v.ux}, {1})));
}

TEST_CASE("diff obeys linearity, product and quotient rules") {
    Vars v;
    auto es = random_exprs(45, 23, 3);
    Symbol s = v.x.as_symbol();
    for (size_t i = 0; i + 2 < es.size(); i += 3) {
        const Expr &f = es[i], &g = es[i + 1], &h = es[i + 2];
        CHECK(diff(2 * f - 3 * g, s) == 2 * diff(f, s) - 3 * diff(g, s));
        CHECK(diff(f * g, s) == diff(f, s) * g + f * diff(g, s));
        if (!h.is_zero()) CHECK(diff(f / h, s) == (diff(f, s) * h - f * diff(h, s)) / (h * h));
    }
}

TEST_CASE("substitute examples") {
    Vars v;
    Bindings fr{{v.a.as_symbol(), v.ux / (v.x * v.ux + v.y * v.uy)}, {v.b.as_symbol(), v.uy / (v.x * v.ux + v.y * v.uy)}};
    CHECK(substitute(v.a * v.x + v.b * v.y, fr) == Expr(1));
    Expr e = v.a * v.x + v.b;
    CHECK(substitute(e, fr) == (v.ux * v.x + v.uy) / (v.x * v.ux + v.y * v.uy));
    CHECK(substitute(e, {}) == e);
    Expr sq = v.x * v.x;
    Expr once = substitute(sq, {{v.x.as_symbol(), v.x + 1}});
    CHECK(once == v.x * v.x + 2 * v.x + 1);
    CHECK(substitute(once, {{v.x.as_symbol(), v.x - 1}}) == sq);
    // simultaneous, not sequential
    CHECK(substitute(v.x - v.y, {{v.x.as_symbol(), v.y}, {v.y.as_symbol(), v.x}}) == v.y - v.x);
    CHECK_THROWS_AS(substitute(1 / (v.x - v.y), {{v.x.as_symbol(), v.y}}), DegenerateExpression);
}

TEST_CASE("gcd recovers planted common factors") {
    auto es = random_exprs(40, 31, 3);
    for (size_t i = 0; i + 2 < es.size(); i += 3) {
        Poly f = es[i].num(), g = es[i + 1].num() + es[i].den(), h = es[i + 2].num() + Poly(mpz_class(1));
        if (f.is_zero() || g.is_zero() || h.is_zero()) continue;
        Poly G = gcd(f * g, f * h);
        CHECK(divide(G, primitive_part(f)).has_value());
        CHECK(divide(f * g, G).has_value());
        CHECK(divide(f * h, G).has_value());
        Poly cg = div_exact(f * g, G), ch = div_exact(f * h, G);
        Poly rest = gcd(cg, ch);
        CHECK(rest.is_const());
    }
}

TEST_CASE("gcd with huge coefficients goes through the remainder sequence") {
    mpz_class N;
    mpz_ui_pow_ui(N.get_mpz_t(), 10, 7000);
    Poly x = Poly::var(0);
    Poly common = x * N + Poly(mpz_class(3));
    Poly f = common * (x * x + x * N), g = common * (x * x * x + Poly(mpz_class(5)));
    Poly G = gcd(f, g);
    CHECK(G == common);
}

TEST_CASE("printing and parsing") {
    Vars v;
    Expr a = v.ux / (v.x * v.ux + v.y * v.uy);
    CHECK(to_string(a) == "u_x/(x*u_x + y*u_y)");
    CHECK(to_string(-v.uy / (v.x * v.ux + v.y * v.uy)) == "-u_y/(x*u_x + y*u_y)");
    CHECK(P("u_x/(x*u_x + y*u_y)") == a);
    CHECK(P("(u_x^2*u_yy - 2*u_x*u_y*u_xy + u_y^2*u_xx)/(x*u_x+y*u_y)^2") ==
          (v.ux * v.ux * v.uyy - 2 * v.ux * v.uy * v.uxy + v.uy * v.uy * v.uxx) / pow(v.x * v.ux + v.y * v.uy, 2));
    CHECK(P("x^-2") == 1 / (v.x * v.x));
    CHECK(P("3/2*x") == Expr(mpq_class(3, 2)) * v.x);
    for (auto& e : random_exprs(50, 41)) CHECK(P(to_string(e)) == e);
    try {
        P("x + * y");
        CHECK(false);
    } catch (const ParseError& err) {
        CHECK(err.pos == 4);
    }
    CHECK_THROWS_AS(P("x + q"), ParseError);
    CHECK(to_latex(a) == "\\frac{u_{x}}{x u_{x} + y u_{y}}");
}
