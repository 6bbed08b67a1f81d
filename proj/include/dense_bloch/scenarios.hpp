#ifndef DENSE_BLOCH_SCENARIOS_HPP
#define DENSE_BLOCH_SCENARIOS_HPP

#include <string>
#include <vector>

#include "dense_bloch/config.hpp"

// Scenario runners behind the command-line interface. Exit codes:
// 0 success, 2 configuration error, 3 numerical non-convergence,
// 4 Markov-validity flag raised (outputs are still written).

namespace dense_bloch {

struct RunResult {
    int exit_code = 0;
    std::vector<std::string> output_files;
    std::vector<std::string> warnings;
};

RunResult run_scenario(const RunConfig& config);

// Schema check without execution; returns the resolved-groups report.
std::string validate_report(const RunConfig& config);

} // namespace dense_bloch

#endif
