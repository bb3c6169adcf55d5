#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "hmlab/config.hpp"
#include "hmlab/experiments.hpp"

namespace hmlab {

enum ExitCode : int { kExitPass = 0, kExitCriteria = 1, kExitConfig = 2, kExitResource = 3 };

struct StageSelection {
    bool geometry = true;
    bool lattice = true;
    bool whitney = true;
    bool solve = true;
    bool functionals = true;
    bool experiments = true;

    static StageSelection only(const std::string& stage);
};

struct RunResult {
    int exit_code = kExitPass;
    Json summary = Json::object();  // per-stage results, also written to run.json
    std::vector<ExperimentReport> reports;
    std::vector<std::string> errors;
};

// Runs geometry -> lattice -> whitney -> solve -> functionals -> experiments,
// writing artifacts under config.output_dir. Completed stages are reported
// even when a later stage fails.
RunResult run(const RunConfig& config, const StageSelection& stages = {}, std::ostream* log = nullptr);

}  // namespace hmlab
