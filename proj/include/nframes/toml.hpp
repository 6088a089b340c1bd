// Reader for the TOML subset used by problem files: [tables], comments, and
// values that are strings, integers, booleans or arrays of strings.
#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace nf {

struct TomlError : std::runtime_error {
    size_t line, column;
    TomlError(const std::string& msg, size_t l, size_t c)
        : std::runtime_error("line " + std::to_string(l) + ", column " + std::to_string(c) + ": " + msg), line(l),
          column(c) {}
};

struct TomlValue {
    enum class Kind { string, integer, boolean, array };
    Kind kind = Kind::string;
    std::string str;
    long long integer = 0;
    bool boolean = false;
    std::vector<std::string> array;
    size_t line = 0;
};

using TomlTable = std::map<std::string, TomlValue>;

struct TomlDocument {
    // table name -> keys; keys before the first header live under ""
    std::map<std::string, TomlTable> tables;
    std::vector<std::string> order;  // tables in order of appearance
};

TomlDocument parse_toml(const std::string& text);

}  // namespace nf
