// Runs every acceptance criterion and prints one line per criterion.
// Exit status is 0 only when all of them pass.

#include "banrep/acceptance.hpp"
#include "banrep/cli.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <sstream>

int main(int argc, char** argv) {
    using namespace banrep;
    CLI::App app{"acceptance suite"};
    acceptance::Options opt;
    int only = 0;
    app.add_option("--seed", opt.seed, "seed for the randomized instances");
    app.add_option("--criterion", only, "run a single criterion")->check(CLI::Range(0, acceptance::kCriterionCount));
    app.add_option("--scratch", opt.scratch, "directory for the determinism runs");
    CLI11_PARSE(app, argc, argv);

    opt.cli = [](const std::vector<std::string>& args) {
        std::ostringstream sink;
        return cli::run(args, sink, sink);
    };

    int passed = 0;
    int total = 0;
    for (int id = 1; id <= acceptance::kCriterionCount; ++id) {
        if (only != 0 && id != only) continue;
        const auto r = acceptance::run_criterion(id, opt);
        std::cout << acceptance::summary_line(r) << std::endl;
        ++total;
        if (r.passed()) ++passed;
    }
    std::cout << passed << "/" << total << " criteria passed" << std::endl;
    return passed == total ? 0 : 1;
}
