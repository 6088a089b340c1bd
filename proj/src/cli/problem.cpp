#include "nframes/problem.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "nframes/toml.hpp"

namespace nf {

namespace {

const std::map<std::string, std::set<std::string>> kKeys = {
    {"variables", {"independents", "dependents", "dummy", "dummy_name"}},
    {"group",
     {"params", "identity", "eliminated", "action", "composition_params", "composition_eliminated", "product",
      "matrix"}},
    {"normalization", {"equations"}},
    {"lagrangian", {"constants", "definitions", "density", "volume"}},
    {"syzygy", {"generators"}},
    {"tasks", {"run"}},
};

const std::vector<std::pair<std::string, TaskKind>> kTasks = {
    {"frame", TaskKind::frame}, {"invariants", TaskKind::invariants}, {"operators", TaskKind::operators},
    {"forms", TaskKind::forms}, {"syzygies", TaskKind::syzygies},     {"el", TaskKind::el},
    {"laws", TaskKind::laws},   {"structured", TaskKind::structured}, {"verify", TaskKind::verify},
};

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t"), b = s.find_last_not_of(" \t");
    return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

// "name = expression"
std::pair<std::string, std::string> split_eq(const std::string& s, size_t line) {
    auto k = s.find('=');
    if (k == std::string::npos) throw ProblemError("expected 'name = expression' in \"" + s + "\"", line);
    std::string lhs = trim(s.substr(0, k)), rhs = trim(s.substr(k + 1));
    if (lhs.empty() || rhs.empty()) throw ProblemError("empty side in \"" + s + "\"", line);
    return {lhs, rhs};
}

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    int depth = 0;
    std::string cur;
    for (char c : s) {
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (c == ',' && depth == 0) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

class Loader {
public:
    explicit Loader(const TomlDocument& d) : doc_(d) {}

    Problem run() {
        check_keys();
        variables();
        group();
        normalization();
        lagrangian();
        syzygy();
        tasks();
        return std::move(p_);
    }

private:
    const TomlDocument& doc_;
    Problem p_;

    const TomlValue* get(const std::string& table, const std::string& key) const {
        auto t = doc_.tables.find(table);
        if (t == doc_.tables.end()) return nullptr;
        auto k = t->second.find(key);
        return k == t->second.end() ? nullptr : &k->second;
    }
    const TomlValue& need(const std::string& table, const std::string& key) const {
        if (auto v = get(table, key)) return *v;
        throw ProblemError("missing key '" + key + "' in [" + table + "]", 0);
    }
    std::vector<std::string> strings(const std::string& table, const std::string& key, bool required = false) const {
        const TomlValue* v = required ? &need(table, key) : get(table, key);
        if (!v) return {};
        if (v->kind != TomlValue::Kind::array) throw ProblemError("'" + key + "' must be an array of strings", v->line);
        return v->array;
    }
    size_t line_of(const std::string& table, const std::string& key) const {
        auto v = get(table, key);
        return v ? v->line : 0;
    }
    Expr expr(const std::string& text, size_t line) const {
        try {
            return p_.parse(text);
        } catch (const ParseError& e) {
            throw ProblemError(std::string("in \"") + text + "\": " + e.what(), line);
        }
    }

    void check_keys() const {
        for (const auto& [name, tab] : doc_.tables) {
            if (name.empty()) {
                if (!tab.empty()) throw ProblemError("key '" + tab.begin()->first + "' outside any table", tab.begin()->second.line);
                continue;
            }
            auto allowed = kKeys.find(name);
            if (allowed == kKeys.end()) throw ProblemError("unknown table [" + name + "]", 0);
            for (const auto& [k, v] : tab)
                if (!allowed->second.count(k)) throw ProblemError("unknown key '" + k + "' in [" + name + "]", v.line);
        }
    }

    void add_name(const std::string& n, Expr e, size_t line) {
        if (p_.names.count(n) || p_.ctx->resolve(n)) throw ProblemError("name '" + n + "' is already in use", line);
        p_.names[n] = std::move(e);
    }

    void variables() {
        auto ind = strings("variables", "independents", true), dep = strings("variables", "dependents", true);
        if (ind.empty() || dep.empty()) throw ProblemError("need at least one independent and one dependent", line_of("variables", "independents"));
        bool dummy = false;
        std::string dname = "tau";
        if (auto v = get("variables", "dummy")) {
            if (v->kind != TomlValue::Kind::boolean) throw ProblemError("'dummy' must be true or false", v->line);
            dummy = v->boolean;
        }
        if (auto v = get("variables", "dummy_name")) dname = v->str;
        p_.ctx = std::make_shared<JetContext>(ind, dep, dummy, dname);
        p_.group.ctx = p_.ctx;
    }

    void group() {
        size_t l = line_of("group", "params");
        for (auto& n : strings("group", "params", true)) {
            Symbol s = symbol(n, SymbolKind::group_param);
            add_name(n, Expr(s), l);
            p_.group.params.push_back(s);
        }
        auto id = strings("group", "identity", true);
        if (id.size() != p_.group.params.size())
            throw ProblemError("'identity' needs one value per parameter", line_of("group", "identity"));
        for (auto& v : id) {
            try {
                p_.group.identity.push_back(mpq_class(trim(v)));
            } catch (const std::exception&) {
                throw ProblemError("identity value '" + v + "' is not a rational number", line_of("group", "identity"));
            }
        }
        auto elim = strings("group", "eliminated");
        std::vector<std::pair<Symbol, std::string>> pending;
        for (auto& e : elim) {
            auto [n, rhs] = split_eq(e, line_of("group", "eliminated"));
            Symbol s = symbol(n, SymbolKind::group_param);
            add_name(n, Expr(s), line_of("group", "eliminated"));
            pending.emplace_back(s, rhs);
        }
        for (auto& [s, rhs] : pending) p_.group.eliminated[s] = expr(rhs, line_of("group", "eliminated"));

        size_t la = line_of("group", "action");
        auto action = strings("group", "action", true);
        const size_t p = p_.ctx->p_base(), q = p_.ctx->q();
        p_.group.xt.assign(p, Expr());
        p_.group.ut.assign(q, Expr());
        std::vector<bool> seen(p + q, false);
        for (auto& a : action) {
            auto [n, rhs] = split_eq(a, la);
            Expr e = expr(rhs, la);
            bool found = false;
            for (size_t i = 0; i < p && !found; ++i)
                if (p_.ctx->independent_name(i) == n) {
                    if (seen[i]) throw ProblemError("'" + n + "' transformed twice", la);
                    p_.group.xt[i] = e;
                    seen[i] = found = true;
                }
            for (size_t a2 = 0; a2 < q && !found; ++a2)
                if (p_.ctx->dependent_name(a2) == n) {
                    if (seen[p + a2]) throw ProblemError("'" + n + "' transformed twice", la);
                    p_.group.ut[a2] = e;
                    seen[p + a2] = found = true;
                }
            if (!found) throw ProblemError("'" + n + "' is not a variable of the problem", la);
        }
        for (size_t i = 0; i < p + q; ++i)
            if (!seen[i])
                throw ProblemError("no transformation given for '" +
                                       (i < p ? p_.ctx->independent_name(i) : p_.ctx->dependent_name(i - p)) + "'",
                                   la);

        auto hp = strings("group", "composition_params");
        if (!hp.empty()) {
            size_t lc = line_of("group", "composition_params");
            if (hp.size() != p_.group.params.size()) throw ProblemError("'composition_params' needs one name per parameter", lc);
            for (auto& n : hp) {
                Symbol s = symbol(n, SymbolKind::group_param);
                add_name(n, Expr(s), lc);
                p_.group.hparams.push_back(s);
            }
            Bindings hel;
            std::vector<std::pair<Symbol, std::string>> hpend;
            for (auto& e : strings("group", "composition_eliminated")) {
                auto [n, rhs] = split_eq(e, line_of("group", "composition_eliminated"));
                Symbol s = symbol(n, SymbolKind::group_param);
                add_name(n, Expr(s), line_of("group", "composition_eliminated"));
                hpend.emplace_back(s, rhs);
            }
            for (auto& [s, rhs] : hpend) hel[s] = expr(rhs, line_of("group", "composition_eliminated"));
            auto prod = strings("group", "product", true);
            if (prod.size() != hp.size()) throw ProblemError("'product' needs one expression per parameter", line_of("group", "product"));
            for (auto& e : prod)
                p_.group.product.push_back(substitute(substitute(expr(e, line_of("group", "product")), p_.group.eliminated), hel));
        } else if (get("group", "product")) {
            throw ProblemError("'product' needs 'composition_params'", line_of("group", "product"));
        }

        auto rows = strings("group", "matrix");
        if (!rows.empty()) {
            size_t lm = line_of("group", "matrix");
            Matrix M(rows.size(), rows.size());
            for (size_t i = 0; i < rows.size(); ++i) {
                auto cells = split_commas(rows[i]);
                if (cells.size() != rows.size()) throw ProblemError("'matrix' must be square", lm);
                for (size_t j = 0; j < cells.size(); ++j) M(i, j) = expr(cells[j], lm);
            }
            p_.group.matrix_form = M;
        }
        p_.group.finalize();
    }

    void normalization() {
        size_t l = line_of("normalization", "equations");
        for (auto& e : strings("normalization", "equations", true)) {
            auto [lhs, rhs] = split_eq(e, l);
            p_.normalization.eqs.push_back({expr(lhs, l), expr(rhs, l)});
        }
    }

    void lagrangian() {
        if (doc_.tables.find("lagrangian") == doc_.tables.end()) return;
        size_t lc = line_of("lagrangian", "constants");
        for (auto& n : strings("lagrangian", "constants")) add_name(trim(n), Expr(symbol(trim(n), SymbolKind::constant)), lc);
        size_t ld = line_of("lagrangian", "definitions");
        for (auto& d : strings("lagrangian", "definitions")) {
            auto [n, rhs] = split_eq(d, ld);
            Expr e = expr(rhs, ld);
            add_name(n, e, ld);
        }
        const TomlValue& dv = need("lagrangian", "density");
        Expr L = expr(dv.str, dv.line);
        if (auto v = get("lagrangian", "volume")) L = L * expr(v->str, v->line);
        p_.lagrangian = L;
    }

    void syzygy() {
        size_t l = line_of("syzygy", "generators");
        for (auto& g : strings("syzygy", "generators")) p_.syzygy_generators.push_back(expr(g, l));
    }

    void tasks() {
        size_t l = line_of("tasks", "run");
        for (auto& t : strings("tasks", "run")) {
            try {
                p_.tasks.push_back(parse_task(t));
            } catch (const ProblemError& e) {
                throw ProblemError(e.what(), l);
            }
        }
    }
};

}  // namespace

const char* task_name(TaskKind k) {
    for (auto& [n, kk] : kTasks)
        if (kk == k) return n.c_str();
    return "?";
}

Task parse_task(const std::string& s) {
    std::istringstream in(s);
    std::string word;
    in >> word;
    for (auto& [n, k] : kTasks)
        if (n == word) {
            Task t{k, 0};
            int order;
            if (in >> order) {
                if (k != TaskKind::invariants || order < 0) throw ProblemError("bad task argument in '" + s + "'", 0);
                t.order = order;
            }
            std::string extra;
            if (in >> extra) throw ProblemError("unexpected text in task '" + s + "'", 0);
            return t;
        }
    throw ProblemError("unknown task '" + s + "'", 0);
}

Resolver Problem::resolver() const {
    return [this](const std::string& n) -> std::optional<Expr> {
        auto it = names.find(n);
        if (it != names.end()) return it->second;
        return ctx->resolve(n);
    };
}

Expr Problem::parse(const std::string& text) const { return parse_expr(text, resolver()); }

Problem load_problem(const std::string& text) {
    TomlDocument doc;
    try {
        doc = parse_toml(text);
    } catch (const TomlError& e) {
        ProblemError pe(e.what(), 0);
        pe.line = e.line;
        throw pe;
    }
    return Loader(doc).run();
}

Problem load_problem_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ProblemError("cannot open " + path, 0);
    std::stringstream ss;
    ss << in.rdbuf();
    return load_problem(ss.str());
}

}  // namespace nf
