/*
* Copyright (C) 2026 The matrosov Authors
*
* Licensed under the Apache License, Version 2.0 (the "License");
* you may not use this file except in compliance with the License.
* You may obtain a copy of the License at
*
*     http://www.apache.org/licenses/LICENSE-2.0
*
* Unless required by applicable law or agreed to in writing, software
* distributed under the License is distributed on an "AS IS" BASIS,
* WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
* See the License for the specific language governing permissions and
* limitations under the License.
*/
#ifndef MATROSOV_PIPELINE_HPP
#define MATROSOV_PIPELINE_HPP

#include "matrosov/plants.hpp"
#include "matrosov/scenario.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace matrosov
{

/// verdict is one of pass, fail, error, skipped
struct StageOutcome {
    std::string name;
    std::string verdict;
    std::string message;
};

struct RunOptions {
    std::string timestamp; ///< empty means the current UTC time
    std::ostream* log = nullptr; ///< one line per stage when set
};

struct RunResult {
    int exitCode = 0; ///< 0 when every selected stage passed, 1 otherwise
    std::vector<StageOutcome> stages;
    std::filesystem::path outDir;

    const StageOutcome* stage(const std::string& name) const;
};

/// stage names in execution order
const std::vector<std::string>& pipeline_stages();

HeatFunction build_heat(const HeatSpec& spec, int dim, int restrictedDim);
ChannelNetworkConfig build_channel_config(const Scenario& scenario);
TimeVaryingSystem build_plant(const Scenario& scenario);

/**
 * @brief Runs the selected stages and writes scenario.json, trajectories.csv,
 * pe_profile.csv, violations.csv and summary.json into outDir. A stage that
 * errors skips the stages depending on it; the others still run.
 */
RunResult run_scenario(const Scenario& scenario, const std::filesystem::path& outDir, const RunOptions& options = {});

} // namespace matrosov

#endif // MATROSOV_PIPELINE_HPP
