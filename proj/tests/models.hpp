// Example actions built directly in C++ for unit tests.
#pragma once

#include <map>
#include <string>

#include "nframes/groupaction.hpp"
#include "nframes/parse.hpp"

namespace nft {

using namespace nf;

struct Model {
    JetContextPtr ctx;
    GroupActionSpec g;
    std::map<std::string, Expr> names;

    Expr operator()(const std::string& text) const {
        return parse_expr(text, [this](const std::string& n) -> std::optional<Expr> {
            auto it = names.find(n);
            if (it != names.end()) return it->second;
            return ctx->resolve(n);
        });
    }
    Symbol param(const std::string& n) const { return names.at(n).as_symbol(); }
    void add_constants(const std::vector<std::string>& cs) {
        for (auto& c : cs) names[c] = Expr(symbol(c, SymbolKind::constant));
    }
    void add_params(const std::vector<std::string>& ps) {
        for (auto& p : ps) {
            Symbol s = symbol(p, SymbolKind::group_param);
            names[p] = Expr(s);
        }
    }
};

// [[a b][c d]] with d = (1+bc)/a; h = [[al be][ga de]]
inline void sl2_params(Model& m) {
    m.add_params({"a", "b", "c", "d", "al", "be", "ga", "de"});
    for (auto n : {"a", "b", "c"}) m.g.params.push_back(m.param(n));
    for (auto n : {"al", "be", "ga"}) m.g.hparams.push_back(m.param(n));
    m.g.identity = {1, 0, 0};
    m.g.eliminated[m.param("d")] = m("(1+b*c)/a");
    Bindings h{{m.param("de"), m("(1+be*ga)/al")}};
    for (auto t : {"a*al + b*ga", "a*be + b*de", "c*al + d*ga"})
        m.g.product.push_back(substitute(substitute(m(t), m.g.eliminated), h));
    m.g.matrix_form = Matrix{{m("a"), m("b")}, {m("c"), m("d")}};
}

inline Model sl2_linear(bool tau = false) {
    Model m;
    m.ctx = std::make_shared<JetContext>(std::vector<std::string>{"x", "y"}, std::vector<std::string>{"u"}, tau);
    m.g.ctx = m.ctx;
    sl2_params(m);
    m.g.xt = {m("a*x + b*y"), m("c*x + d*y")};
    m.g.ut = {m("u")};
    m.g.finalize();
    return m;
}

inline Model sl2_projective() {
    Model m;
    m.ctx = std::make_shared<JetContext>(std::vector<std::string>{"x"}, std::vector<std::string>{"u"});
    m.g.ctx = m.ctx;
    sl2_params(m);
    m.g.xt = {m("(a*x + b)/(c*x + d)")};
    m.g.ut = {m("u")};
    m.g.finalize();
    return m;
}

inline Model shallow_water(bool tau = false) {
    Model m;
    m.ctx = std::make_shared<JetContext>(std::vector<std::string>{"a", "b", "t"},
                                         std::vector<std::string>{"x", "y", "u", "v"}, tau);
    m.g.ctx = m.ctx;
    m.add_params({"alpha", "beta", "gamma", "delta"});
    for (auto n : {"alpha", "beta", "gamma"}) m.g.params.push_back(m.param(n));
    m.g.identity = {1, 0, 0};
    m.g.eliminated[m.param("delta")] = m("(1+beta*gamma)/alpha");
    m.g.xt = {m("alpha*a + beta*b"), m("gamma*a + delta*b"), m("t")};
    m.g.ut = {m("x"), m("y"), m("u"), m("v")};
    m.g.finalize();
    return m;
}

// shallow water Lagrangian with linear P and R
inline Expr shallow_water_lagrangian(Model& m) {
    m.add_constants({"g", "c1", "c2", "c3", "c4", "c5", "c6"});
    m.names["h"] = m("1/(x_a*y_b - x_b*y_a)");
    m.names["P"] = m("c1*x + c2*y + c3");
    m.names["R"] = m("c4*x + c5*y + c6");
    return m("(u - R)*x_t + (v + P)*y_t - (u^2 + v^2 + g*h)/2");
}

inline Model sl3_linear(bool tau = false) {
    Model m;
    m.ctx = std::make_shared<JetContext>(std::vector<std::string>{"x", "y", "z"},
                                         std::vector<std::string>{"u", "v", "w"}, tau);
    m.g.ctx = m.ctx;
    std::vector<std::string> all, hall;
    for (int i = 1; i <= 3; ++i)
        for (int j = 1; j <= 3; ++j) {
            all.push_back("a" + std::to_string(i) + std::to_string(j));
            hall.push_back("h" + std::to_string(i) + std::to_string(j));
        }
    m.add_params(all);
    m.add_params(hall);
    for (int k = 0; k < 8; ++k) {
        m.g.params.push_back(m.param(all[k]));
        m.g.hparams.push_back(m.param(hall[k]));
    }
    m.g.identity = {1, 0, 0, 0, 1, 0, 0, 0};
    m.g.eliminated[m.param("a33")] =
        m("(1 - a31*(a12*a23 - a13*a22) + a32*(a11*a23 - a13*a21))/(a11*a22 - a12*a21)");
    Bindings h{{m.param("h33"), m("(1 - h31*(h12*h23 - h13*h22) + h32*(h11*h23 - h13*h21))/(h11*h22 - h12*h21)")}};
    for (int k = 0; k < 8; ++k) {
        int i = k / 3 + 1, j = k % 3 + 1;
        std::string t;
        for (int l = 1; l <= 3; ++l)
            t += (l > 1 ? " + " : "") + std::string("a") + std::to_string(i) + std::to_string(l) + "*h" +
                 std::to_string(l) + std::to_string(j);
        m.g.product.push_back(substitute(substitute(m(t), m.g.eliminated), h));
    }
    Matrix A(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) A(i, j) = m.names.at(all[3 * i + j]);
    m.g.matrix_form = A;
    m.g.xt = {m("a11*x + a12*y + a13*z"), m("a21*x + a22*y + a23*z"), m("a31*x + a32*y + a33*z")};
    m.g.ut = {m("u"), m("v"), m("w")};
    m.g.finalize();
    return m;
}

}  // namespace nft
