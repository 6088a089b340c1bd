#include "nframes/toml.hpp"

#include <cctype>

namespace nf {

namespace {

class Reader {
public:
    explicit Reader(const std::string& t) : t_(t) {}

    TomlDocument run() {
        TomlDocument doc;
        std::string table;
        doc.tables[table];
        while (true) {
            skip_blank_lines();
            if (eof()) break;
            if (peek() == '[') {
                get();
                skip_ws();
                table = bare_key();
                skip_ws();
                expect(']');
                if (doc.tables.count(table) && table != "") fail("table [" + table + "] defined twice");
                doc.tables[table];
                doc.order.push_back(table);
            } else {
                size_t l = line_;
                std::string key = peek() == '"' ? basic_string() : bare_key();
                skip_ws();
                expect('=');
                skip_ws();
                TomlValue v = value();
                v.line = l;
                auto& tab = doc.tables[table];
                if (tab.count(key)) fail("duplicate key '" + key + "'");
                tab[key] = std::move(v);
            }
            end_of_line();
        }
        return doc;
    }

private:
    const std::string& t_;
    size_t i_ = 0, line_ = 1, col_ = 1;

    bool eof() const { return i_ >= t_.size(); }
    char peek() const { return eof() ? '\0' : t_[i_]; }
    char get() {
        char c = t_[i_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }
    [[noreturn]] void fail(const std::string& msg) const { throw TomlError(msg, line_, col_); }
    void expect(char c) {
        if (peek() != c) fail(std::string("expected '") + c + "'");
        get();
    }
    void skip_ws() {
        while (!eof() && (peek() == ' ' || peek() == '\t')) get();
    }
    void skip_comment() {
        if (peek() == '#')
            while (!eof() && peek() != '\n') get();
    }
    void skip_blank_lines() {
        while (!eof()) {
            skip_ws();
            skip_comment();
            if (peek() == '\n' || peek() == '\r')
                get();
            else
                break;
        }
    }
    // whitespace, comments and newlines inside arrays
    void skip_all() {
        while (!eof()) {
            skip_ws();
            skip_comment();
            if (peek() == '\n' || peek() == '\r')
                get();
            else
                break;
        }
    }
    void end_of_line() {
        skip_ws();
        skip_comment();
        if (peek() == '\r') get();
        if (!eof() && peek() != '\n') fail("unexpected text after value");
        if (!eof()) get();
    }
    std::string bare_key() {
        std::string k;
        while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-'))
            k += get();
        if (k.empty()) fail("expected a key");
        return k;
    }
    std::string basic_string() {
        expect('"');
        std::string s;
        while (true) {
            if (eof() || peek() == '\n') fail("unterminated string");
            char c = get();
            if (c == '"') break;
            if (c == '\\') {
                if (eof()) fail("unterminated escape");
                char e = get();
                switch (e) {
                    case 'n': s += '\n'; break;
                    case 't': s += '\t'; break;
                    case '"': s += '"'; break;
                    case '\\': s += '\\'; break;
                    default: fail(std::string("unsupported escape \\") + e);
                }
            } else {
                s += c;
            }
        }
        return s;
    }
    std::string literal_string() {
        expect('\'');
        std::string s;
        while (true) {
            if (eof() || peek() == '\n') fail("unterminated string");
            char c = get();
            if (c == '\'') break;
            s += c;
        }
        return s;
    }
    std::string any_string() { return peek() == '\'' ? literal_string() : basic_string(); }

    TomlValue value() {
        TomlValue v;
        char c = peek();
        if (c == '"' || c == '\'') {
            v.kind = TomlValue::Kind::string;
            v.str = any_string();
        } else if (c == '[') {
            v.kind = TomlValue::Kind::array;
            get();
            skip_all();
            while (peek() != ']') {
                if (peek() != '"' && peek() != '\'') fail("arrays may only hold strings");
                v.array.push_back(any_string());
                skip_all();
                if (peek() == ',') {
                    get();
                    skip_all();
                } else if (peek() != ']') {
                    fail("expected ',' or ']'");
                }
            }
            get();
        } else if (c == 't' || c == 'f') {
            std::string w = bare_key();
            if (w != "true" && w != "false") fail("expected a value");
            v.kind = TomlValue::Kind::boolean;
            v.boolean = w == "true";
        } else if (c == '-' || c == '+' || std::isdigit(static_cast<unsigned char>(c))) {
            std::string d;
            d += get();
            while (!eof() && (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '_'))
                if (char x = get(); x != '_') d += x;
            try {
                v.integer = std::stoll(d);
            } catch (const std::exception&) {
                fail("bad integer '" + d + "'");
            }
            v.kind = TomlValue::Kind::integer;
        } else {
            fail("expected a value");
        }
        return v;
    }
};

}  // namespace

TomlDocument parse_toml(const std::string& text) { return Reader(text).run(); }

}  // namespace nf
