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
#ifndef MATROSOV_SCENARIO_HPP
#define MATROSOV_SCENARIO_HPP

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace matrosov
{

struct HeatSpec {
    std::string kind = "quadratic_sine";
    double kappa     = 1.0;
    double omega     = 1.0;
    bool operator==(const HeatSpec&) const = default;
};

/// gB(t, x) = value + amplitude sin(omega t)
struct OffsetSpec {
    double value     = 0.0;
    double amplitude = 0.0;
    double omega     = 1.0;
    bool operator==(const OffsetSpec&) const = default;
};

struct BlockSpec {
    int dim  = 1;
    double a = 1.0;
    double b = 1.0;
    bool operator==(const BlockSpec&) const = default;
};

struct ChannelSpec {
    HeatSpec gA;
    OffsetSpec gB;
    bool operator==(const ChannelSpec&) const = default;
};

struct PlantSpec {
    std::string kind = "chained3"; ///< chained3, chainedN, skew, channels, cascade
    int n            = 3;
    double k1        = 1.0;
    std::vector<double> kPrime;
    int m            = 2;
    std::vector<double> k;
    std::vector<BlockSpec> blocks;
    std::vector<ChannelSpec> channels;
    std::string sigma = "tanh";
    double coupling   = 1.0;
    bool operator==(const PlantSpec&) const = default;
};

struct RegionSettings {
    double Delta = 2.0;
    double delta = 0.1;
    bool operator==(const RegionSettings&) const = default;
};

struct GridSettings {
    std::vector<double> t0 = {0.0};
    int icCount            = 10;
    double icRadius        = 1.0;
    std::vector<std::vector<double>> ics; ///< explicit unit-ball ICs, scaled by icRadius
    double dt              = 1e-2;
    double horizon         = 20.0;
    std::vector<double> ugsRadii = {1.0};
    int simulateCount      = 3;
    double simulateHorizon = 20.0;
    int recordEvery        = 10;
    bool operator==(const GridSettings&) const = default;
};

struct CheckSettings {
    bool simulate         = true;
    bool pe               = true;
    bool family           = true;
    bool derivativeBounds = true;
    bool assumptions      = true;
    bool gains            = true;
    bool ugs              = true;
    bool uga              = true;

    double sigma       = 0.05;
    double ugaSpread   = 0.1; ///< accepted relative spread of the settling time across t0
    double ugsSpread   = 0.05;
    std::vector<double> etas = {1e-1, 1e-2, 1e-3};
    int samples        = 200000;
    int nuSamples      = 20000;
    int trajectories   = 10;
    double boundDt     = 1e-2;
    double boundHorizon = 10.0;
    double peHorizon   = 200.0;
    double peT         = 6.283185307179586;
    double peMu        = 0.5;
    double peDelta     = 0.0;
    double pePoint     = 0.5; ///< radius of the probe point
    bool operator==(const CheckSettings&) const = default;
};

struct Scenario {
    std::string name;
    std::string description;
    bool demo = false; ///< demo plants run simulation and stability stages only
    PlantSpec plant;
    HeatSpec heat;
    RegionSettings region;
    GridSettings grids;
    CheckSettings checks;
    std::uint64_t seed = 1;
    bool operator==(const Scenario&) const = default;
};

/// parse or validation problem; line is 1-based, 0 when unknown
class ScenarioError : public std::runtime_error
{
public:
    ScenarioError(const std::string& what, int line)
        : std::runtime_error(what)
        , m_line(line)
    {
    }
    int line() const
    {
        return m_line;
    }

private:
    int m_line;
};

Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::filesystem::path& path);
/// canonical JSON text; parse_scenario(to_json(s)) == s
std::string to_json(const Scenario& scenario);
/// throws ScenarioError on inconsistent fields
void validate(const Scenario& scenario);

struct CatalogEntry {
    std::filesystem::path path;
    std::string name;
    std::string description;
    bool demo = false;
};

/// *.json files of a directory sorted by name; unreadable files are reported in problems
std::vector<CatalogEntry> list_catalog(const std::filesystem::path& dir, std::vector<std::string>* problems = nullptr);

} // namespace matrosov

#endif // MATROSOV_SCENARIO_HPP
