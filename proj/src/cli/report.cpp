#include "nframes/report.hpp"

#include <algorithm>
#include <chrono>
#include <iomanip>
#include <ostream>
#include <random>

#include "json.hpp"
#include "nframes/noether.hpp"

namespace nf {

namespace {

std::string name_of(Symbol s) { return to_string(Expr(s)); }

std::string word_name(const JetContext& ctx, const std::vector<size_t>& w) {
    if (w.empty()) return "1";
    std::string s = "D_";
    for (auto i : w) s += ctx.independent_name(i);
    return s;
}

std::string idx(const std::string& a, const std::string& b) { return "[" + a + "][" + b + "]"; }

class Session {
public:
    Session(const Problem& p, const RunOptions& o) : p_(p), o_(o), rng_(o.seed) {}

    void run_task(const Task& t, TaskReport& r) {
        switch (t.kind) {
            case TaskKind::frame: frame_task(r); break;
            case TaskKind::invariants: invariants_task(t.order ? t.order : o_.max_order, r); break;
            case TaskKind::operators: operators_task(r); break;
            case TaskKind::forms: forms_task(r); break;
            case TaskKind::syzygies: syzygies_task(r); break;
            case TaskKind::el: el_task(r); break;
            case TaskKind::laws: laws_task(r); break;
            case TaskKind::structured: structured_task(r); break;
            case TaskKind::verify: verify_task(r); break;
        }
    }

private:
    const Problem& p_;
    const RunOptions& o_;
    std::mt19937_64 rng_;
    std::optional<Frame> frame_;
    std::optional<InvariantCalculus> calc_;
    std::optional<Infinitesimals> inf_;
    std::optional<Matrix> laws_;
    std::optional<LawBundle> bundle_;

    const JetContext& ctx() const { return *p_.ctx; }
    const Frame& frame() {
        if (!frame_) frame_ = solve_frame(p_.group, p_.normalization);
        return *frame_;
    }
    const InvariantCalculus& calc() {
        if (!calc_) calc_.emplace(frame());
        return *calc_;
    }
    const Infinitesimals& inf() {
        if (!inf_) inf_.emplace(p_.group);
        return *inf_;
    }
    const Expr& lagrangian() const {
        if (!p_.lagrangian) throw ProblemError("the problem has no [lagrangian] section", 0);
        return *p_.lagrangian;
    }
    const Matrix& laws() {
        if (!laws_) laws_ = noether_laws(inf(), lagrangian());
        return *laws_;
    }
    const LawBundle& bundle() {
        if (!bundle_) bundle_ = structured_laws(frame(), laws());
        return *bundle_;
    }
    std::string gen(size_t j) const { return name_of(p_.group.params.at(j)); }

    void frame_task(TaskReport& r) {
        const Frame& f = frame();
        for (size_t j = 0; j < f.rho().size(); ++j) r.results.push_back({gen(j), f.rho()[j]});
        if (f.root()) r.results.push_back({name_of(f.root()->s) + "^2", f.root()->square});
        for (size_t i = 0; i < f.conditions().size(); ++i)
            r.results.push_back({"nonzero[" + std::to_string(i) + "]", f.conditions()[i]});
    }

    void invariants_task(int order, TaskReport& r) {
        const Frame& f = frame();
        for (size_t i = 0; i < ctx().p_base(); ++i)
            r.results.push_back({"I(" + ctx().independent_name(i) + ")", f.invariant_independent(i)});
        for (size_t a = 0; a < ctx().q(); ++a)
            for (int o = 0; o <= order; ++o)
                for (const auto& K : ctx().indices_of_order(o)) {
                    if (ctx().has_dummy() && K.counts[ctx().dummy_index()] > 0) continue;
                    r.results.push_back({"I(" + ctx().jet_name(a, K) + ")", f.invariant(a, K)});
                }
    }

    void operators_task(TaskReport& r) {
        const auto& c = calc();
        for (size_t i = 0; i < c.p(); ++i)
            for (size_t k = 0; k < c.p(); ++k) {
                const Expr& e = c.operators()[i].coeffs[k];
                if (!e.is_zero())
                    r.results.push_back({"calD_" + ctx().independent_name(i) + "[D_" + ctx().independent_name(k) + "]", e});
            }
    }

    void forms_task(TaskReport& r) {
        const auto& c = calc();
        auto forms = invariant_one_forms(c);
        auto form = [&](size_t i) { return "I(d" + ctx().independent_name(i) + ")"; };
        for (size_t i = 0; i < forms.size(); ++i)
            for (size_t k = 0; k < c.p(); ++k) {
                Expr e = forms[i].coeff({k});
                if (!e.is_zero()) r.results.push_back({form(i) + "[d" + ctx().independent_name(k) + "]", e});
            }
        for (size_t i = 0; i < c.p(); ++i)
            for (size_t j = 0; j < forms.size(); ++j) {
                auto coeffs = in_invariant_basis(c, lie_derivative_form(c, i, forms[j]));
                for (size_t k = 0; k < coeffs.size(); ++k)
                    if (!coeffs[k].is_zero())
                        r.results.push_back({"calD_" + ctx().independent_name(i) + " " + form(j) + "[" + form(k) + "]", coeffs[k]});
            }
    }

    void syzygies_task(TaskReport& r) {
        if (!ctx().has_dummy()) throw ProblemError("syzygies need 'dummy = true' in [variables]", 0);
        if (p_.syzygy_generators.empty()) throw ProblemError("syzygies need [syzygy] generators", 0);
        const auto& c = calc();
        std::vector<Expr> gens;
        for (const auto& g : p_.syzygy_generators) gens.push_back(frame().invariantize(g));
        auto H = syzygy(c, gens);
        for (size_t j = 0; j < H.size(); ++j)
            for (size_t b = 0; b < H[j].size(); ++b)
                for (const auto& t : H[j][b])
                    r.results.push_back({"H" + idx(std::to_string(j), ctx().dependent_name(b)) + " " + word_name(ctx(), t.word),
                                         t.coeff});
    }

    void el_task(TaskReport& r) {
        auto E = euler_lagrange(ctx(), lagrangian());
        for (size_t a = 0; a < E.size(); ++a) r.results.push_back({"E(" + ctx().dependent_name(a) + ")", E[a]});
    }

    void laws_task(TaskReport& r) {
        const Matrix& C = laws();
        for (size_t j = 0; j < C.rows(); ++j)
            for (size_t k = 0; k < C.cols(); ++k) r.results.push_back({"C" + idx(gen(j), ctx().independent_name(k)), C(j, k)});
    }

    void structured_task(TaskReport& r) {
        const LawBundle& b = bundle();
        for (size_t i = 0; i < b.AdInv.rows(); ++i)
            for (size_t j = 0; j < b.AdInv.cols(); ++j)
                r.results.push_back({"AdInv" + idx(std::to_string(i), std::to_string(j)), b.AdInv(i, j)});
        for (size_t j = 0; j < b.V.rows(); ++j)
            for (size_t k = 0; k < b.V.cols(); ++k)
                r.results.push_back({"V" + idx(gen(j), ctx().independent_name(k)), b.V(j, k)});
        for (size_t i = 0; i < b.Minors.rows(); ++i)
            for (size_t j = 0; j < b.Minors.cols(); ++j)
                r.results.push_back({"M" + idx(std::to_string(i), std::to_string(j)), b.Minors(i, j)});
    }

    void add_report(TaskReport& r, const std::string& what, const CheckReport& c) {
        r.checks.push_back(what + ": " + std::to_string(c.samples) + " samples, " + std::to_string(c.failures.size()) +
                           " failures");
        if (!c.ok()) r.ok = false;
    }

    void verify_task(TaskReport& r) {
        const Frame& f = frame();
        auto res = normalization_residuals(f.action(), p_.normalization);
        for (size_t i = 0; i < res.size(); ++i)
            r.residuals.push_back({"normalization[" + std::to_string(i) + "]", f.at_frame(res[i])});
        add_report(r, "frame equivariance", frame_equivariance_check(f, o_.samples, rng_));
        if (p_.group.has_composition())
            add_report(r, "adjoint homomorphism", adjoint_homomorphism_check(p_.group, adjoint_rep(inf()), o_.samples, rng_));
        if (!p_.lagrangian) return;
        auto nres = noether_residuals(inf(), lagrangian(), laws());
        for (size_t j = 0; j < nres.size(); ++j) r.residuals.push_back({"noether[" + gen(j) + "]", nres[j]});
        add_report(r, "law equivariance", equivariance_check(inf(), laws(), o_.samples, rng_));
        const LawBundle& b = bundle();
        Matrix diff = reassemble(b) - signed_laws(b.C);
        for (size_t j = 0; j < diff.rows(); ++j)
            for (size_t k = 0; k < diff.cols(); ++k)
                r.residuals.push_back({"reassembly" + idx(gen(j), ctx().independent_name(k)), diff(j, k)});
    }
};

std::string latex_text(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '_' || c == '#' || c == '%' || c == '&' || c == '$' || c == '{' || c == '}') out += '\\';
        if (c == '^') {
            out += "\\^{}";
            continue;
        }
        out += c;
    }
    return out;
}

}  // namespace

bool Report::ok() const {
    return std::all_of(tasks.begin(), tasks.end(), [](const TaskReport& t) { return t.ok; });
}

Report run(const Problem& problem, const RunOptions& opts, const std::string& source) {
    set_sampling_seed(opts.seed);
    Report rep;
    rep.source = source;
    rep.seed = opts.seed;
    std::vector<Task> tasks = opts.tasks ? *opts.tasks : problem.tasks;
    std::stable_sort(tasks.begin(), tasks.end(), [](const Task& a, const Task& b) { return a.kind < b.kind; });
    tasks.erase(std::unique(tasks.begin(), tasks.end(),
                            [](const Task& a, const Task& b) { return a.kind == b.kind && a.order == b.order; }),
                tasks.end());
    Session s(problem, opts);
    for (const auto& t : tasks) {
        TaskReport r;
        r.name = task_name(t.kind);
        if (t.order) r.name += " " + std::to_string(t.order);
        auto start = std::chrono::steady_clock::now();
        try {
            s.run_task(t, r);
            for (const auto& e : r.residuals)
                if (!is_zero(e.value)) r.ok = false;
        } catch (const std::exception& e) {
            r.ok = false;
            r.error = e.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        rep.tasks.push_back(std::move(r));
    }
    return rep;
}

void emit(const Report& r, Format f, std::ostream& os) {
    switch (f) {
        case Format::text: {
            os << "# nframes report\n";
            if (!r.source.empty()) os << "source: " << r.source << "\n";
            os << "seed: " << r.seed << "\n";
            for (const auto& t : r.tasks) {
                os << "\n[" << t.name << "] " << (t.ok ? "ok" : "FAILED") << " (" << std::fixed << std::setprecision(3)
                   << t.seconds << " s)\n";
                if (!t.error.empty()) os << "error: " << t.error << "\n";
                for (const auto& e : t.results) os << e.label << " = " << to_string(e.value) << "\n";
                for (const auto& e : t.residuals) os << "residual " << e.label << " = " << to_string(e.value) << "\n";
                for (const auto& c : t.checks) os << "check " << c << "\n";
            }
            os << "\nstatus: " << (r.ok() ? "pass" : "fail") << "\n";
            break;
        }
        case Format::latex: {
            os << "\\documentclass{article}\n\\usepackage{amsmath}\n\\allowdisplaybreaks\n\\begin{document}\n";
            os << "\\section*{nframes report}\n";
            if (!r.source.empty()) os << "Source: \\texttt{" << latex_text(r.source) << "}\\\\\n";
            os << "Seed: " << r.seed << "\n";
            for (const auto& t : r.tasks) {
                os << "\\subsection*{" << latex_text(t.name) << " (" << (t.ok ? "ok" : "failed") << ")}\n";
                if (!t.error.empty()) os << "Error: \\verb|" << t.error << "|\n";
                auto block = [&](const std::vector<Entry>& es, const std::string& prefix) {
                    if (es.empty()) return;
                    os << "\\begin{align*}\n";
                    for (size_t i = 0; i < es.size(); ++i)
                        os << "\\text{" << latex_text(prefix + es[i].label) << "} &= " << to_latex(es[i].value)
                           << (i + 1 < es.size() ? " \\\\\n" : "\n");
                    os << "\\end{align*}\n";
                };
                block(t.results, "");
                block(t.residuals, "residual ");
                for (const auto& c : t.checks) os << "Check " << latex_text(c) << ".\\\\\n";
            }
            os << "\\end{document}\n";
            break;
        }
        case Format::json: {
            nlohmann::ordered_json j;
            j["source"] = r.source;
            j["seed"] = r.seed;
            j["ok"] = r.ok();
            j["tasks"] = nlohmann::ordered_json::array();
            for (const auto& t : r.tasks) {
                nlohmann::ordered_json jt;
                jt["task"] = t.name;
                jt["status"] = t.ok ? "ok" : "failed";
                if (!t.error.empty()) jt["error"] = t.error;
                auto list = [](const std::vector<Entry>& es) {
                    auto a = nlohmann::ordered_json::array();
                    for (const auto& e : es) a.push_back({{"label", e.label}, {"value", to_string(e.value)}});
                    return a;
                };
                jt["results"] = list(t.results);
                jt["residuals"] = list(t.residuals);
                jt["checks"] = t.checks;
                j["tasks"].push_back(jt);
            }
            os << j.dump(2) << "\n";
            break;
        }
    }
}

std::vector<ParsedEntry> read_json_results(const std::string& json, const Problem& problem) {
    auto j = nlohmann::json::parse(json);
    Resolver base = problem.resolver();
    Resolver res = [&](const std::string& n) -> std::optional<Expr> {
        if (auto e = base(n)) return e;
        if (n == name_of(root_symbol())) return Expr(root_symbol());
        return std::nullopt;
    };
    std::vector<ParsedEntry> out;
    for (const auto& t : j.at("tasks"))
        for (const char* key : {"results", "residuals"})
            for (const auto& e : t.at(key))
                out.push_back({t.at("task").get<std::string>(), e.at("label").get<std::string>(),
                               parse_expr(e.at("value").get<std::string>(), res)});
    return out;
}

}  // namespace nf
