#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "nframes/report.hpp"
#include "nframes/toml.hpp"

using namespace nf;

namespace {

const std::string kFixtures = NF_FIXTURES;

std::string fixture(const std::string& name) { return kFixtures + "/" + name; }

std::string emit_to_string(const Report& r, Format f) {
    std::ostringstream os;
    emit(r, f, os);
    return os.str();
}

const Entry* find(const TaskReport& t, const std::string& label) {
    for (const auto& e : t.results)
        if (e.label == label) return &e;
    return nullptr;
}

int exit_code(const std::string& args) {
    std::string cmd = std::string(NF_BINARY) + " " + args + " > /dev/null 2>&1";
    int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

const char* kSmall = R"(
[variables]
independents = ["x", "y"]
dependents = ["u"]

[group]
params = ["a", "b", "c"]
identity = ["1", "0", "0"]
eliminated = ["d = (1 + b*c)/a"]
action = ["x = a*x + b*y", "y = c*x + d*y", "u = u"]

[normalization]
equations = ["x = 1", "y = 0", "u_y = 0"]

[tasks]
run = []
)";

std::string with_tasks(const std::string& run) {
    std::string s = kSmall;
    return s.replace(s.find("run = []"), 8, "run = " + run);
}

}  // namespace

TEST_CASE("toml subset") {
    auto d = parse_toml("# c\n[a]\nx = \"s\" # tail\ny = 'lit'\nn = -3\nb = true\nv = [\n \"p\", # one\n \"q\",\n]\n");
    REQUIRE(d.tables.count("a"));
    auto& t = d.tables["a"];
    CHECK(t["x"].str == "s");
    CHECK(t["y"].str == "lit");
    CHECK(t["n"].integer == -3);
    CHECK(t["b"].boolean);
    CHECK(t["v"].array == std::vector<std::string>{"p", "q"});
    CHECK(t["v"].line == 7);
    CHECK_THROWS_AS(parse_toml("[a]\nx = \"open\n"), TomlError);
    CHECK_THROWS_AS(parse_toml("[a]\nx = 1\nx = 2\n"), TomlError);
    CHECK_THROWS_AS(parse_toml("[a\n"), TomlError);
    try {
        parse_toml("[a]\n\nx = @\n");
        FAIL("no error");
    } catch (const TomlError& e) {
        CHECK(e.line == 3);
    }
}

TEST_CASE("problem files: input errors") {
    CHECK_NOTHROW(load_problem(kSmall));
    std::string s = kSmall;
    CHECK_THROWS_AS(load_problem(s + "[extra]\nk = 1\n"), ProblemError);
    CHECK_THROWS_AS(load_problem(std::string(kSmall).replace(s.find("[tasks]"), 7, "[tasks]\nspeed = 2")), ProblemError);
    CHECK_THROWS_AS(load_problem(with_tasks("[\"fly\"]")), ProblemError);
    CHECK_THROWS_AS(load_problem(std::string(kSmall).replace(s.find("u = u"), 5, "w = u")), ProblemError);
    CHECK_THROWS_AS(load_problem(std::string(kSmall).replace(s.find("a*x + b*y"), 9, "a*x + b*")), ProblemError);
    try {
        load_problem(std::string(kSmall).replace(s.find("[tasks]"), 7, "[tasks]\nspeed = 2"));
    } catch (const ProblemError& e) {
        CHECK(e.line > 0);
    }
    CHECK(parse_task("invariants 3").order == 3);
    CHECK(parse_task(" laws ").kind == TaskKind::laws);
    CHECK_THROWS_AS(parse_task("laws 2"), ProblemError);
}

TEST_CASE("frame in text form") {
    Problem p = load_problem(with_tasks("[\"frame\"]"));
    Report r = run(p, {});
    REQUIRE(r.tasks.size() == 1);
    CHECK(r.ok());
    std::string text = emit_to_string(r, Format::text);
    CHECK(text.find("a = u_x/(x*u_x + y*u_y)") != std::string::npos);
    CHECK(text.find("c = -y") != std::string::npos);
}

TEST_CASE("empty task list gives a header-only report") {
    Report r = run(load_problem(kSmall), {}, "small.toml");
    CHECK(r.tasks.empty());
    CHECK(r.ok());
    std::string text = emit_to_string(r, Format::text);
    CHECK(text.find("# nframes report") == 0);
    CHECK(text.find("status: pass") != std::string::npos);
    std::string tex = emit_to_string(r, Format::latex);
    CHECK(tex.find("\\documentclass") != std::string::npos);
    CHECK(tex.find("\\end{document}") != std::string::npos);
    std::string js = emit_to_string(r, Format::json);
    CHECK(js.find("\"tasks\": []") != std::string::npos);
}

TEST_CASE("tasks run once in dependency order") {
    RunOptions o;
    o.tasks = std::vector<Task>{parse_task("operators"), parse_task("frame"), parse_task("operators")};
    Report r = run(load_problem(kSmall), o);
    REQUIRE(r.tasks.size() == 2);
    CHECK(r.tasks[0].name == "frame");
    CHECK(r.tasks[1].name == "operators");
}

TEST_CASE("a task without a Lagrangian fails but the others still run") {
    Report r = run(load_problem(with_tasks("[\"frame\", \"el\"]")), {});
    REQUIRE(r.tasks.size() == 2);
    CHECK(r.tasks[0].ok);
    CHECK(!r.tasks[1].ok);
    CHECK(!r.tasks[1].error.empty());
    CHECK(!r.ok());
}

TEST_CASE("json output is deterministic and reparses to the same expressions") {
    Problem p = load_problem_file(fixture("sl2_linear_monge_ampere.toml"));
    RunOptions o;
    o.seed = 7;
    std::string a = emit_to_string(run(p, o, "ma"), Format::json);
    std::string b = emit_to_string(run(load_problem_file(fixture("sl2_linear_monge_ampere.toml")), o, "ma"), Format::json);
    CHECK(a == b);
    CHECK(a.find("\"seed\": 7") != std::string::npos);

    Report r = run(p, o, "ma");
    auto parsed = read_json_results(a, p);
    size_t n = 0;
    for (const auto& t : r.tasks) n += t.results.size() + t.residuals.size();
    REQUIRE(parsed.size() == n);
    size_t i = 0;
    for (const auto& t : r.tasks) {
        for (const auto* list : {&t.results, &t.residuals})
            for (const auto& e : *list) {
                CHECK(parsed[i].task == t.name);
                CHECK(parsed[i].label == e.label);
                CHECK(parsed[i].value == e.value);
                ++i;
            }
    }
}

TEST_CASE("json round trip through the frame root") {
    Problem p = load_problem_file(fixture("sl2_projective.toml"));
    RunOptions o;
    o.tasks = std::vector<Task>{parse_task("frame"), parse_task("structured")};
    Report r = run(p, o);
    auto parsed = read_json_results(emit_to_string(r, Format::json), p);
    REQUIRE(!parsed.empty());
    CHECK(to_string(parsed[0].value) == "rt");
    size_t i = 0;
    for (const auto& t : r.tasks)
        for (const auto& e : t.results) CHECK(parsed[i++].value == e.value);
}

TEST_CASE("shallow water fixture passes laws, structured and verify") {
    Problem p = load_problem_file(fixture("shallow_water.toml"));
    Report r = run(p, {});
    CHECK(r.ok());
    for (const auto& t : r.tasks) {
        INFO(t.name << ": " << t.error);
        CHECK(t.ok);
    }
    const TaskReport& s = r.tasks[4];
    REQUIRE(s.name == "structured");
    CHECK(find(s, "V[gamma][a]")->value.is_zero());
    CHECK(find(s, "V[gamma][t]")->value.is_zero());
    CHECK(find(s, "M[0][0]")->value == p.parse("x_b/(a*x_a + b*x_b)"));
}

TEST_CASE("CLI exit codes") {
    CHECK(exit_code("run " + fixture("sl2_linear_monge_ampere.toml")) == 0);
    CHECK(exit_code("run " + fixture("sl2_projective.toml") + " --tasks frame,el --format latex") == 0);
    CHECK(exit_code("run " + fixture("sl2_projective.toml") + " --format xml") == 2);
    CHECK(exit_code("run " + fixture("sl2_projective.toml") + " --tasks frame,fly") == 2);
    CHECK(exit_code("run " + fixture("missing.toml")) == 2);
    CHECK(exit_code("") == 2);

    std::string bad = std::string(NF_WORKDIR) + "/not_invariant.toml";
    std::ofstream(bad) << with_tasks("[\"laws\"]") << "\n[lagrangian]\ndensity = \"u_x^2\"\n";
    CHECK(exit_code("run " + bad) == 1);
}
