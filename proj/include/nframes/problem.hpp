// Problem files: variables, group action, normalization, Lagrangian and tasks.
#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nframes/movingframe.hpp"
#include "nframes/parse.hpp"

namespace nf {

// Input errors, annotated with the line of the offending key when known.
struct ProblemError : std::runtime_error {
    size_t line;
    ProblemError(const std::string& msg, size_t l)
        : std::runtime_error(l ? "line " + std::to_string(l) + ": " + msg : msg), line(l) {}
};

enum class TaskKind { frame, invariants, operators, forms, syzygies, el, laws, structured, verify };

struct Task {
    TaskKind kind;
    int order = 0;  // for invariants; 0 means the run default
};

const char* task_name(TaskKind k);
// "frame", "invariants 3", ...; throws ProblemError
Task parse_task(const std::string& s);

struct Problem {
    JetContextPtr ctx;
    GroupActionSpec group;
    NormalizationSpec normalization;
    std::optional<Expr> lagrangian;
    std::vector<Expr> syzygy_generators;
    std::vector<Task> tasks;
    // parameters, constants and definitions by name
    std::map<std::string, Expr> names;

    Expr parse(const std::string& text) const;
    Resolver resolver() const;
};

Problem load_problem(const std::string& text);
Problem load_problem_file(const std::string& path);

}  // namespace nf
