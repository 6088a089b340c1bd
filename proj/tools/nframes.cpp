// nframes run <file> [--tasks t1,t2] [--format text|latex|json] [--seed N] [--max-order N]
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "nframes/report.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Moving frames, invariants and Noether laws for variational problems"};
    app.require_subcommand(1);
    auto* run = app.add_subcommand("run", "run the tasks of a problem file");
    std::string file, tasks, format = "text";
    unsigned long long seed = nf::kDefaultSeed;
    int max_order = 2;
    bool tasks_given = false;
    run->add_option("file", file, "problem file (.toml)")->required();
    auto* topt = run->add_option("--tasks", tasks, "comma separated tasks, e.g. frame,\"invariants 2\"");
    run->add_option("--format", format, "text, latex or json")->check(CLI::IsMember({"text", "latex", "json"}));
    run->add_option("--seed", seed, "seed for sampled checks");
    run->add_option("--max-order", max_order, "jet order for the invariants task")->check(CLI::NonNegativeNumber);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    tasks_given = topt->count() > 0;

    nf::Problem problem;
    nf::RunOptions opts;
    opts.seed = seed;
    opts.max_order = max_order;
    try {
        problem = nf::load_problem_file(file);
        if (tasks_given) {
            std::vector<nf::Task> ts;
            std::stringstream ss(tasks);
            std::string t;
            while (std::getline(ss, t, ','))
                if (t.find_first_not_of(" \t") != std::string::npos) ts.push_back(nf::parse_task(t));
            opts.tasks = ts;
        }
    } catch (const std::exception& e) {
        std::cerr << "nframes: " << file << ": " << e.what() << "\n";
        return 2;
    }
    nf::Report rep = nf::run(problem, opts, file);
    nf::Format f = format == "json" ? nf::Format::json : format == "latex" ? nf::Format::latex : nf::Format::text;
    nf::emit(rep, f, std::cout);
    return rep.ok() ? 0 : 1;
}
