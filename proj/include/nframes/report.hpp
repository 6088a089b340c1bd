// Running the tasks of a problem file and writing the results.
#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nframes/problem.hpp"

namespace nf {

constexpr unsigned long long kDefaultSeed = 20240611ULL;

struct RunOptions {
    std::optional<std::vector<Task>> tasks;  // overrides the file's task list
    unsigned long long seed = kDefaultSeed;
    int max_order = 2;  // order for "invariants" without an argument
    int samples = 20;   // random group elements per equivariance check
};

struct Entry {
    std::string label;
    Expr value;
};

struct TaskReport {
    std::string name;
    bool ok = true;
    std::string error;
    std::vector<Entry> results;
    std::vector<Entry> residuals;  // must all vanish
    std::vector<std::string> checks;
    double seconds = 0;
};

struct Report {
    std::string source;
    unsigned long long seed = kDefaultSeed;
    std::vector<TaskReport> tasks;
    bool ok() const;
};

// Tasks run in dependency order, each at most once.
Report run(const Problem& problem, const RunOptions& opts, const std::string& source = "");

enum class Format { text, latex, json };
void emit(const Report& r, Format f, std::ostream& os);

// (task, label, value) triples read back from json output
struct ParsedEntry {
    std::string task, label;
    Expr value;
};
std::vector<ParsedEntry> read_json_results(const std::string& json, const Problem& problem);

}  // namespace nf
