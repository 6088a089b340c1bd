#include "nframes/parse.hpp"

#include <cctype>

namespace nf {

namespace {

class Reader {
public:
    Reader(const std::string& s, const Resolver& r) : s_(s), resolve_(r) {}

    Expr run() {
        Expr e = sum();
        skip();
        if (i_ != s_.size()) throw ParseError(std::string("unexpected '") + s_[i_] + "'", i_);
        return e;
    }

private:
    const std::string& s_;
    const Resolver& resolve_;
    size_t i_ = 0;

    void skip() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    }
    bool eat(char c) {
        skip();
        if (i_ < s_.size() && s_[i_] == c) {
            ++i_;
            return true;
        }
        return false;
    }

    Expr sum() {
        Expr e = product();
        while (true) {
            if (eat('+')) e = e + product();
            else if (eat('-')) e = e - product();
            else return e;
        }
    }

    Expr product() {
        Expr e = unary();
        while (true) {
            size_t at = i_;
            if (eat('*')) {
                e = e * unary();
            } else if (eat('/')) {
                skip();
                at = i_;
                Expr d = unary();
                if (d.is_zero()) throw ParseError("division by zero", at);
                e = e / d;
            } else {
                (void)at;
                return e;
            }
        }
    }

    Expr unary() {
        if (eat('-')) return -unary();
        if (eat('+')) return unary();
        return power();
    }

    Expr power() {
        Expr base = primary();
        if (eat('^')) {
            skip();
            size_t at = i_;
            Expr ex = unary();
            if (!ex.is_const() || ex.const_value().get_den() != 1) throw ParseError("exponent must be an integer", at);
            long n = ex.const_value().get_num().get_si();
            if (n < 0 && base.is_zero()) throw ParseError("zero raised to a negative power", at);
            return pow(base, n);
        }
        return base;
    }

    Expr primary() {
        skip();
        if (i_ >= s_.size()) throw ParseError("unexpected end of expression", i_);
        char c = s_[i_];
        if (c == '(') {
            ++i_;
            Expr e = sum();
            if (!eat(')')) throw ParseError("expected ')'", i_);
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t st = i_;
            while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
            return Expr(mpq_class(mpz_class(s_.substr(st, i_ - st))));
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            size_t st = i_;
            while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_')) ++i_;
            std::string name = s_.substr(st, i_ - st);
            skip();
            if (i_ < s_.size() && s_[i_] == '(') {
                ++i_;
                std::vector<Expr> args;
                if (!eat(')')) {
                    do {
                        args.push_back(sum());
                    } while (eat(','));
                    if (!eat(')')) throw ParseError("expected ')' after arguments", i_);
                }
                return call(name, args, st);
            }
            auto r = resolve_(name);
            if (!r) throw ParseError("unknown symbol '" + name + "'", st);
            return *r;
        }
        throw ParseError(std::string("unexpected '") + c + "'", i_);
    }

    Expr call(const std::string& name, const std::vector<Expr>& args, size_t at) {
        // F_1_2 means the derivative of F in arguments 1 and 2
        std::string base = name;
        std::vector<int> dc(args.size(), 0);
        while (true) {
            auto us = base.rfind('_');
            if (us == std::string::npos || us + 1 >= base.size()) break;
            std::string tail = base.substr(us + 1);
            bool digits = !tail.empty();
            for (char ch : tail) digits = digits && std::isdigit(static_cast<unsigned char>(ch));
            if (!digits) break;
            size_t k = std::stoul(tail);
            if (k < 1 || k > args.size()) throw ParseError("derivative index out of range in '" + name + "'", at);
            dc[k - 1] += 1;
            base = base.substr(0, us);
        }
        if (args.empty()) throw ParseError("function '" + name + "' needs arguments", at);
        return Expr(opaque_atom(base, args, dc));
    }
};

}  // namespace

Expr parse_expr(const std::string& text, const Resolver& resolve) { return Reader(text, resolve).run(); }

}  // namespace nf
