// Infix expression reader: + - * / ^, parentheses, integers, identifiers and
// applied opaque functions F(a, b) (derivatives written F_1_2(a, b)).
#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

#include "nframes/symcore.hpp"

namespace nf {

struct ParseError : std::runtime_error {
    size_t pos;
    ParseError(const std::string& msg, size_t p)
        : std::runtime_error(msg + " at position " + std::to_string(p)), pos(p) {}
};

// maps an identifier to its expression; nullopt means unknown
using Resolver = std::function<std::optional<Expr>(const std::string&)>;

Expr parse_expr(const std::string& text, const Resolver& resolve);

}  // namespace nf
