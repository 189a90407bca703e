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
#include "matrosov/pipeline.hpp"
#include "matrosov/scenario.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;

#ifndef MATROSOV_SCENARIO_DIR
#define MATROSOV_SCENARIO_DIR "scenarios"
#endif

namespace
{

constexpr int exit_usage = 2;

fs::path resolve_scenario(const std::string& arg, const fs::path& catalog)
{
    if (fs::exists(arg)) {
        return arg;
    }
    for (const auto& candidate : {catalog / arg, catalog / (arg + ".json")}) {
        if (fs::exists(candidate)) {
            return candidate;
        }
    }
    return arg;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Matrosov-type stability checks for time-varying plants"};
    app.require_subcommand(1);

    std::string catalog = MATROSOV_SCENARIO_DIR;
    app.add_option("--catalog", catalog, "scenario directory")->capture_default_str();

    auto* run = app.add_subcommand("run", "run every selected stage of a scenario");
    std::string scenarioArg;
    std::string outArg;
    std::optional<std::uint64_t> seed;
    std::optional<double> dt;
    std::optional<double> horizon;
    std::string timestamp;
    bool quiet = false;
    run->add_option("scenario", scenarioArg, "scenario file or catalog name")->required();
    run->add_option("--out", outArg, "output directory (default: $MATROSOV_OUT/<name> or matrosov_out/<name>)");
    run->add_option("--seed", seed, "override the scenario seed");
    run->add_option("--dt", dt, "override the simulation step")->check(CLI::PositiveNumber);
    run->add_option("--horizon", horizon, "override the stability horizon")->check(CLI::PositiveNumber);
    run->add_option("--timestamp", timestamp, "fixed timestamp written to summary.json");
    run->add_flag("-q,--quiet", quiet, "no per-stage log");

    auto* list = app.add_subcommand("list", "list the bundled scenarios");

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::Success& e) {
        return app.exit(e);
    }
    catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    }

    if (*list) {
        std::vector<std::string> problems;
        const auto entries = matrosov::list_catalog(catalog, &problems);
        for (const auto& e : entries) {
            std::cout << e.name << (e.demo ? "  [demo, no checker]" : "") << "  " << e.path.filename().string()
                      << "\n    " << e.description << '\n';
        }
        for (const auto& p : problems) {
            std::cerr << "warning: " << p << '\n';
        }
        return entries.empty() && !problems.empty() ? exit_usage : 0;
    }

    matrosov::Scenario scenario;
    const fs::path path = resolve_scenario(scenarioArg, catalog);
    try {
        scenario = matrosov::load_scenario(path);
        if (seed) {
            scenario.seed = *seed;
        }
        if (dt) {
            scenario.grids.dt = *dt;
        }
        if (horizon) {
            scenario.grids.horizon = *horizon;
        }
        matrosov::validate(scenario);
    }
    catch (const matrosov::ScenarioError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    }

    fs::path out = outArg;
    if (out.empty()) {
        const char* env = std::getenv("MATROSOV_OUT");
        out             = fs::path(env && *env ? env : "matrosov_out") / scenario.name;
    }

    matrosov::RunOptions options;
    options.timestamp = timestamp;
    options.log       = quiet ? nullptr : &std::cout;
    try {
        const auto result = matrosov::run_scenario(scenario, out, options);
        if (!quiet) {
            std::cout << (result.exitCode == 0 ? "PASS" : "FAIL") << "  outputs in " << out.string() << '\n';
        }
        return result.exitCode;
    }
    catch (const matrosov::ScenarioError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    }
    catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
