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
#include "json.hpp"

#include <catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace
{

struct Result {
    int code = -1;
    std::string out;
};

/// runs the CLI through the shell with stderr folded into the captured output
Result cli(const std::string& args, const std::string& env = "")
{
    const std::string cmd = env + " '" + std::string(MATROSOV_CLI_PATH) + "' " + args + " 2>&1";
    Result r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p);
    char buf[4096];
    while (const auto n = fread(buf, 1, sizeof buf, p)) {
        r.out.append(buf, n);
    }
    const int status = pclose(p);
    r.code           = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

fs::path scratch(const std::string& name)
{
    const auto d = fs::temp_directory_path() / ("matrosov_test_cli_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::string read_file(const fs::path& p)
{
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

const std::string small = R"({
  "name": "small",
  "plant": { "kind": "chained3" },
  "heat": { "kind": "quadratic_sine", "kappa": 10.0 },
  "grids": { "t0": [0.0, 2.5], "icCount": 4, "dt": 0.02, "horizon": 20.0,
             "simulateCount": 2, "simulateHorizon": 2.0 },
  "checks": { "peHorizon": 30.0, "trajectories": 2, "boundHorizon": 1.0, "nuSamples": 500,
              "assumptions": false, "gains": false, "ugs": false, "uga": false }
}
)";

fs::path write_small(const fs::path& dir)
{
    std::ofstream(dir / "small.json") << small;
    return dir / "small.json";
}

} // namespace

TEST_CASE("list shows at least six scenarios and flags the demo", "[cli]")
{
    const auto r = cli("list");
    CHECK(r.code == 0);
    int lines = 0;
    std::istringstream in(r.out);
    for (std::string l; std::getline(in, l);) {
        lines += (!l.empty() && l[0] != ' ') ? 1 : 0;
    }
    CHECK(lines >= 6);
    CHECK(r.out.find("cascade_demo  [demo, no checker]") != std::string::npos);
}

TEST_CASE("list of an empty catalog succeeds with no entries", "[cli]")
{
    const auto d = scratch("empty");
    const auto r = cli("--catalog '" + d.string() + "' list");
    CHECK(r.code == 0);
    CHECK(r.out.empty());
}

TEST_CASE("usage and scenario errors exit with 2", "[cli]")
{
    CHECK(cli("").code == 2);
    CHECK(cli("frobnicate").code == 2);
    CHECK(cli("run").code == 2);
    CHECK(cli("run /nonexistent/scenario.json").code == 2);
    const auto d = scratch("bad");
    std::ofstream(d / "bad.json") << "{\n  \"name\": \"bad\",\n  \"plant\": {\"kind\": \"chained3\"},\n  \"colour\": 1\n}\n";
    const auto r = cli("run '" + (d / "bad.json").string() + "' --out '" + (d / "o").string() + "'");
    CHECK(r.code == 2);
    CHECK(r.out.find("line 4") != std::string::npos);
    std::ofstream(d / "malformed.json") << "{ \"name\": ";
    CHECK(cli("run '" + (d / "malformed.json").string() + "'").code == 2);
    CHECK(cli("run '" + write_small(d).string() + "' --dt -1").code == 2);
}

TEST_CASE("run writes byte-identical summaries for a fixed timestamp", "[cli]")
{
    const auto d    = scratch("repro");
    const auto path = write_small(d);
    const auto a    = cli("run -q '" + path.string() + "' --timestamp T0 --out '" + (d / "a").string() + "'");
    const auto b    = cli("run -q '" + path.string() + "' --timestamp T0 --out '" + (d / "b").string() + "'");
    CHECK(a.code == 0);
    CHECK(b.code == 0);
    CHECK(read_file(d / "a" / "summary.json") == read_file(d / "b" / "summary.json"));
    CHECK(read_file(d / "a" / "trajectories.csv") == read_file(d / "b" / "trajectories.csv"));
    CHECK(read_file(d / "a" / "trajectories.csv").rfind("t,x1,x2,x3\n", 0) == 0);
    CHECK(read_file(d / "a" / "pe_profile.csv").rfind("radius,", 0) == 0);
    CHECK(read_file(d / "a" / "violations.csv").rfind("stage,index,t,margin\n", 0) == 0);
    const auto summary = nlohmann::json::parse(read_file(d / "a" / "summary.json"));
    CHECK(summary["timestamp"] == "T0");
    CHECK(summary["verdict"] == "pass");
    CHECK(summary["exitCode"] == 0);
}

TEST_CASE("overrides reach the resolved scenario", "[cli]")
{
    const auto d    = scratch("override");
    const auto path = write_small(d);
    const auto r    = cli("run -q '" + path.string() + "' --seed 99 --dt 0.05 --horizon 7 --out '" + (d / "o").string() + "'");
    CHECK(r.code == 0);
    const auto s = nlohmann::json::parse(read_file(d / "o" / "scenario.json"));
    CHECK(s["seed"] == 99);
    CHECK(s["grids"]["dt"] == 0.05);
    CHECK(s["grids"]["horizon"] == 7.0);
    CHECK(nlohmann::json::parse(read_file(d / "o" / "summary.json"))["seed"] == 99);
}

TEST_CASE("MATROSOV_OUT selects the output root", "[cli]")
{
    const auto d    = scratch("env");
    const auto path = write_small(d);
    const auto r    = cli("run -q '" + path.string() + "'", "MATROSOV_OUT='" + (d / "root").string() + "'");
    CHECK(r.code == 0);
    CHECK(fs::exists(d / "root" / "small" / "summary.json"));
}

TEST_CASE("catalog names resolve and the demo runs", "[cli]")
{
    const auto d = scratch("demo");
    const auto r = cli("run cascade_demo --timestamp T0 --out '" + d.string() + "'");
    CHECK(r.code == 0);
    CHECK(r.out.find("demo, no checker") != std::string::npos);
    const auto summary = nlohmann::json::parse(read_file(d / "summary.json"));
    CHECK(summary["demo"] == true);
}

TEST_CASE("a failing verdict exits with 1", "[cli]")
{
    const auto d    = scratch("fail");
    auto text       = small;
    text.replace(text.find("quadratic_sine"), 14, "zero");
    std::ofstream(d / "dead.json") << text;
    const auto r = cli("run -q '" + (d / "dead.json").string() + "' --out '" + (d / "o").string() + "'");
    CHECK(r.code == 1);
}
