// Validation gate: runs the ten numbered criteria and prints one line per
// criterion.  Exit status is the number of failures (0 = all green).
//
//   sqha_acceptance                     run everything
//   sqha_acceptance --criterion 6       run a single criterion
//   sqha_acceptance --qp-prefactor-scale 1.1
//                                       mutate the curvature prefactor; the
//                                       convergence criterion must then fail

#include "sqha/acceptance.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

int main(int argc, char** argv) {
    int only = 0;
    sqha::AcceptanceOptions opt;

    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--criterion" && i + 1 < argc) {
            only = std::atoi(argv[++i]);
        } else if (arg == "--qp-prefactor-scale" && i + 1 < argc) {
            opt.qp_prefactor_scale = std::atof(argv[++i]);
        } else if (arg == "--help" || arg == "-h") {
            std::printf("usage: %s [--criterion N] [--qp-prefactor-scale X]\n", argv[0]);
            return 0;
        } else {
            std::fprintf(stderr, "unknown argument: %s\n", arg.c_str());
            return 2;
        }
    }

    std::vector<sqha::CriterionResult> results;
    if (only != 0) {
        results.push_back(sqha::run_criterion(only, opt));
    } else {
        results = sqha::run_acceptance(opt);
    }

    int failures = 0;
    for (const sqha::CriterionResult& r : results) {
        std::printf("%s\n", sqha::format_criterion_line(r).c_str());
        std::fflush(stdout);
        if (!r.passed) ++failures;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(results.size()) - failures,
                results.size());
    return failures;
}
