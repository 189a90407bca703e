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
#include "matrosov/scenario.hpp"

#include "json.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace matrosov
{

namespace
{

using nlohmann::json;
using nlohmann::ordered_json;

int line_at(const std::string& text, std::size_t byte)
{
    byte = std::min(byte, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

[[noreturn]] void fail_at(int line, const std::string& msg)
{
    std::ostringstream out;
    if (line > 0) {
        out << "line " << line << ": ";
    }
    out << msg;
    throw ScenarioError(out.str(), line);
}

/// strict reader of one JSON object; key positions are located in the source text for diagnostics
class Reader
{
public:
    Reader(const json& j, const std::string& text, std::size_t from, std::string path)
        : m_j(j)
        , m_text(text)
        , m_from(from)
        , m_path(std::move(path))
    {
        if (!m_j.is_object()) {
            fail_at(line_at(m_text, m_from), (m_path.empty() ? std::string("scenario") : m_path) + " must be an object");
        }
    }

    bool has(const std::string& key) const
    {
        return m_j.contains(key);
    }

    std::size_t pos(const std::string& key) const
    {
        const auto p = m_text.find('"' + key + '"', m_from);
        return p == std::string::npos ? m_from : p;
    }

    [[noreturn]] void fail(const std::string& key, const std::string& msg) const
    {
        fail_at(line_at(m_text, pos(key)), name(key) + ": " + msg);
    }

    std::string name(const std::string& key) const
    {
        return m_path.empty() ? key : m_path + "." + key;
    }

    void get(const std::string& key, double& out)
    {
        if (const json* v = take(key)) {
            if (!v->is_number()) {
                fail(key, "expected a number");
            }
            out = v->get<double>();
        }
    }
    void get(const std::string& key, int& out)
    {
        if (const json* v = take(key)) {
            if (!v->is_number_integer()) {
                fail(key, "expected an integer");
            }
            out = v->get<int>();
        }
    }
    void get(const std::string& key, std::uint64_t& out)
    {
        if (const json* v = take(key)) {
            if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0)) {
                fail(key, "expected a nonnegative integer");
            }
            out = v->get<std::uint64_t>();
        }
    }
    void get(const std::string& key, bool& out)
    {
        if (const json* v = take(key)) {
            if (!v->is_boolean()) {
                fail(key, "expected true or false");
            }
            out = v->get<bool>();
        }
    }
    void get(const std::string& key, std::string& out)
    {
        if (const json* v = take(key)) {
            if (!v->is_string()) {
                fail(key, "expected a string");
            }
            out = v->get<std::string>();
        }
    }
    void get(const std::string& key, std::vector<double>& out)
    {
        if (const json* v = take(key)) {
            if (!v->is_array()) {
                fail(key, "expected an array of numbers");
            }
            out.clear();
            for (const auto& e : *v) {
                if (!e.is_number()) {
                    fail(key, "expected an array of numbers");
                }
                out.push_back(e.get<double>());
            }
        }
    }
    void get(const std::string& key, std::vector<std::vector<double>>& out)
    {
        if (const json* v = take(key)) {
            if (!v->is_array()) {
                fail(key, "expected an array of number arrays");
            }
            out.clear();
            for (const auto& row : *v) {
                if (!row.is_array()) {
                    fail(key, "expected an array of number arrays");
                }
                std::vector<double> r;
                for (const auto& e : row) {
                    if (!e.is_number()) {
                        fail(key, "expected an array of number arrays");
                    }
                    r.push_back(e.get<double>());
                }
                out.push_back(std::move(r));
            }
        }
    }

    /// object child; false when absent
    bool child(const std::string& key, const std::function<void(Reader&)>& body)
    {
        const json* v = take(key);
        if (!v) {
            return false;
        }
        Reader r(*v, m_text, pos(key), name(key));
        body(r);
        r.finish();
        return true;
    }

    /// array of objects
    bool children(const std::string& key, const std::function<void(Reader&)>& body)
    {
        const json* v = take(key);
        if (!v) {
            return false;
        }
        if (!v->is_array()) {
            fail(key, "expected an array of objects");
        }
        std::size_t from = pos(key);
        for (std::size_t i = 0; i < v->size(); ++i) {
            const auto brace = m_text.find('{', from + 1);
            from             = brace == std::string::npos ? from : brace;
            Reader r((*v)[i], m_text, from, name(key) + "[" + std::to_string(i) + "]");
            body(r);
            r.finish();
        }
        return true;
    }

    void finish() const
    {
        for (const auto& item : m_j.items()) {
            if (!m_used.count(item.key())) {
                fail(item.key(), "unknown field");
            }
        }
    }

private:
    const json* take(const std::string& key)
    {
        m_used.insert(key);
        auto it = m_j.find(key);
        return it == m_j.end() ? nullptr : &*it;
    }

    const json& m_j;
    const std::string& m_text;
    std::size_t m_from;
    std::string m_path;
    std::set<std::string> m_used;
};

void read_heat(Reader& r, HeatSpec& h)
{
    r.get("kind", h.kind);
    r.get("kappa", h.kappa);
    r.get("omega", h.omega);
}

ordered_json heat_json(const HeatSpec& h)
{
    ordered_json j;
    j["kind"]  = h.kind;
    j["kappa"] = h.kappa;
    j["omega"] = h.omega;
    return j;
}

int plant_dim(const PlantSpec& p)
{
    if (p.kind == "chained3") {
        return 3;
    }
    if (p.kind == "chainedN") {
        return p.n;
    }
    if (p.kind == "skew") {
        return p.m + 1;
    }
    if (p.kind == "channels") {
        int d = 0;
        for (const auto& b : p.blocks) {
            d += b.dim;
        }
        return d + static_cast<int>(p.channels.size());
    }
    return 2; // cascade
}

const std::set<std::string>& heat_kinds()
{
    static const std::set<std::string> k{"quadratic_sine", "zero", "fading"};
    return k;
}

} // namespace

void validate(const Scenario& s)
{
    auto bad = [](const std::string& msg) {
        throw ScenarioError(msg, 0);
    };
    if (s.name.empty()) {
        bad("name must not be empty");
    }
    const auto& p = s.plant;
    static const std::set<std::string> kinds{"chained3", "chainedN", "skew", "channels", "cascade"};
    if (!kinds.count(p.kind)) {
        bad("plant.kind must be one of chained3, chainedN, skew, channels, cascade");
    }
    if (!heat_kinds().count(s.heat.kind)) {
        bad("heat.kind must be one of quadratic_sine, zero, fading");
    }
    if (p.kind == "chainedN") {
        if (p.n < 3) {
            bad("plant.n must be at least 3");
        }
        if (static_cast<int>(p.kPrime.size()) != p.n - 1) {
            bad("plant.kPrime needs n - 1 entries");
        }
    }
    if (p.kind == "skew") {
        if (p.m < 2) {
            bad("plant.m must be at least 2");
        }
        if (static_cast<int>(p.k.size()) != p.m - 1) {
            bad("plant.k needs m - 1 entries (k_2..k_m)");
        }
    }
    if (p.kind == "channels") {
        if (p.blocks.size() < 2) {
            bad("plant.blocks needs at least two blocks");
        }
        if (p.channels.size() + 1 != p.blocks.size()) {
            bad("plant.channels needs one entry fewer than plant.blocks");
        }
        for (const auto& b : p.blocks) {
            if (b.dim < 1 || !(b.a > 0.0) || !(b.b > 0.0)) {
                bad("every block needs dim >= 1, a > 0 and b > 0");
            }
            if (b.dim != p.blocks.front().dim) {
                bad("all blocks need the same dimension");
            }
        }
        for (const auto& c : p.channels) {
            if (!heat_kinds().count(c.gA.kind)) {
                bad("channel gA.kind must be one of quadratic_sine, zero, fading");
            }
        }
    }
    if (!(s.region.Delta > 0.0) || !(s.region.delta > 0.0) || !(s.region.delta < s.region.Delta)) {
        bad("region needs 0 < delta < Delta");
    }
    const auto& g = s.grids;
    if (g.t0.empty() || !(g.dt > 0.0) || !(g.horizon > 0.0) || g.icCount < 1 || !(g.icRadius > 0.0)) {
        bad("grids need t0 values, dt > 0, horizon > 0, icCount >= 1 and icRadius > 0");
    }
    if (g.simulateCount < 1 || !(g.simulateHorizon > 0.0) || g.recordEvery < 1) {
        bad("grids need simulateCount >= 1, simulateHorizon > 0 and recordEvery >= 1");
    }
    const int dim = plant_dim(p);
    for (const auto& ic : g.ics) {
        if (static_cast<int>(ic.size()) != dim) {
            bad("grids.ics entries need " + std::to_string(dim) + " coordinates");
        }
        double n2 = 0.0;
        for (double v : ic) {
            n2 += v * v;
        }
        if (n2 > 1.0 + 1e-12) {
            bad("grids.ics entries must lie in the unit ball");
        }
    }
    const auto& c = s.checks;
    if (!(c.sigma > 0.0) || c.samples < 10 || c.nuSamples < 10 || c.trajectories < 1) {
        bad("checks need sigma > 0, samples >= 10, nuSamples >= 10 and trajectories >= 1");
    }
    if (c.etas.empty()) {
        bad("checks.etas must not be empty");
    }
    for (std::size_t i = 0; i < c.etas.size(); ++i) {
        if (!(c.etas[i] > 0.0) || (i > 0 && !(c.etas[i] < c.etas[i - 1]))) {
            bad("checks.etas must be positive and strictly decreasing");
        }
    }
    if (!(c.peT > 0.0) || !(c.peHorizon >= c.peT) || !(c.peMu > 0.0) || !(c.peDelta >= 0.0) || !(c.pePoint > 0.0)) {
        bad("checks need peT > 0, peHorizon >= peT, peMu > 0, peDelta >= 0 and pePoint > 0");
    }
    if (!(c.boundDt > 0.0) || !(c.boundHorizon > 0.0)) {
        bad("checks need boundDt > 0 and boundHorizon > 0");
    }
}

Scenario parse_scenario(const std::string& text)
{
    json root;
    try {
        root = json::parse(text);
    }
    catch (const json::parse_error& e) {
        std::string what = e.what();
        const auto cut   = what.find("parse error");
        fail_at(line_at(text, e.byte == 0 ? 0 : e.byte - 1), "malformed JSON: " + what.substr(cut == std::string::npos ? 0 : cut));
    }
    Scenario s;
    Reader r(root, text, 0, "");
    r.get("name", s.name);
    r.get("description", s.description);
    r.get("demo", s.demo);
    r.get("seed", s.seed);
    r.child("plant", [&](Reader& p) {
        auto& pl = s.plant;
        p.get("kind", pl.kind);
        p.get("n", pl.n);
        p.get("k1", pl.k1);
        p.get("kPrime", pl.kPrime);
        p.get("m", pl.m);
        p.get("k", pl.k);
        p.get("sigma", pl.sigma);
        p.get("coupling", pl.coupling);
        p.children("blocks", [&](Reader& b) {
            BlockSpec bs;
            b.get("dim", bs.dim);
            b.get("a", bs.a);
            b.get("b", bs.b);
            pl.blocks.push_back(bs);
        });
        p.children("channels", [&](Reader& c) {
            ChannelSpec cs;
            c.child("gA", [&](Reader& h) {
                read_heat(h, cs.gA);
            });
            c.child("gB", [&](Reader& o) {
                o.get("value", cs.gB.value);
                o.get("amplitude", cs.gB.amplitude);
                o.get("omega", cs.gB.omega);
            });
            pl.channels.push_back(cs);
        });
    });
    r.child("heat", [&](Reader& h) {
        read_heat(h, s.heat);
    });
    r.child("region", [&](Reader& g) {
        g.get("Delta", s.region.Delta);
        g.get("delta", s.region.delta);
    });
    r.child("grids", [&](Reader& g) {
        auto& gr = s.grids;
        g.get("t0", gr.t0);
        g.get("icCount", gr.icCount);
        g.get("icRadius", gr.icRadius);
        g.get("ics", gr.ics);
        g.get("dt", gr.dt);
        g.get("horizon", gr.horizon);
        g.get("ugsRadii", gr.ugsRadii);
        g.get("simulateCount", gr.simulateCount);
        g.get("simulateHorizon", gr.simulateHorizon);
        g.get("recordEvery", gr.recordEvery);
    });
    r.child("checks", [&](Reader& c) {
        auto& ch = s.checks;
        c.get("simulate", ch.simulate);
        c.get("pe", ch.pe);
        c.get("family", ch.family);
        c.get("derivativeBounds", ch.derivativeBounds);
        c.get("assumptions", ch.assumptions);
        c.get("gains", ch.gains);
        c.get("ugs", ch.ugs);
        c.get("uga", ch.uga);
        c.get("sigma", ch.sigma);
        c.get("ugaSpread", ch.ugaSpread);
        c.get("ugsSpread", ch.ugsSpread);
        c.get("etas", ch.etas);
        c.get("samples", ch.samples);
        c.get("nuSamples", ch.nuSamples);
        c.get("trajectories", ch.trajectories);
        c.get("boundDt", ch.boundDt);
        c.get("boundHorizon", ch.boundHorizon);
        c.get("peHorizon", ch.peHorizon);
        c.get("peT", ch.peT);
        c.get("peMu", ch.peMu);
        c.get("peDelta", ch.peDelta);
        c.get("pePoint", ch.pePoint);
    });
    r.finish();
    if (!r.has("name")) {
        fail_at(1, "name is required");
    }
    if (!r.has("plant")) {
        fail_at(1, "plant is required");
    }
    try {
        validate(s);
    }
    catch (const ScenarioError& e) {
        // point at the first key named in the message when possible
        std::string msg = e.what();
        std::string key = msg.substr(0, msg.find(' '));
        key             = key.substr(key.rfind('.') == std::string::npos ? 0 : key.rfind('.') + 1);
        const auto p    = text.find('"' + key + '"');
        fail_at(p == std::string::npos ? 0 : line_at(text, p), msg);
    }
    return s;
}

Scenario load_scenario(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ScenarioError("cannot open scenario file " + path.string(), 0);
    }
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return parse_scenario(buf.str());
    }
    catch (const ScenarioError& e) {
        throw ScenarioError(path.string() + ": " + e.what(), e.line());
    }
}

std::string to_json(const Scenario& s)
{
    ordered_json j;
    j["name"]        = s.name;
    j["description"] = s.description;
    j["demo"]        = s.demo;
    j["seed"]        = s.seed;

    ordered_json p;
    p["kind"]     = s.plant.kind;
    p["n"]        = s.plant.n;
    p["k1"]       = s.plant.k1;
    p["kPrime"]   = s.plant.kPrime;
    p["m"]        = s.plant.m;
    p["k"]        = s.plant.k;
    p["sigma"]    = s.plant.sigma;
    p["coupling"] = s.plant.coupling;
    p["blocks"]   = ordered_json::array();
    for (const auto& b : s.plant.blocks) {
        p["blocks"].push_back({{"dim", b.dim}, {"a", b.a}, {"b", b.b}});
    }
    p["channels"] = ordered_json::array();
    for (const auto& c : s.plant.channels) {
        ordered_json cj;
        cj["gA"] = heat_json(c.gA);
        cj["gB"] = {{"value", c.gB.value}, {"amplitude", c.gB.amplitude}, {"omega", c.gB.omega}};
        p["channels"].push_back(cj);
    }
    j["plant"]  = p;
    j["heat"]   = heat_json(s.heat);
    j["region"] = {{"Delta", s.region.Delta}, {"delta", s.region.delta}};

    ordered_json g;
    g["t0"]              = s.grids.t0;
    g["icCount"]         = s.grids.icCount;
    g["icRadius"]        = s.grids.icRadius;
    g["ics"]             = s.grids.ics;
    g["dt"]              = s.grids.dt;
    g["horizon"]         = s.grids.horizon;
    g["ugsRadii"]        = s.grids.ugsRadii;
    g["simulateCount"]   = s.grids.simulateCount;
    g["simulateHorizon"] = s.grids.simulateHorizon;
    g["recordEvery"]     = s.grids.recordEvery;
    j["grids"]           = g;

    const auto& c = s.checks;
    ordered_json cj;
    cj["simulate"]         = c.simulate;
    cj["pe"]               = c.pe;
    cj["family"]           = c.family;
    cj["derivativeBounds"] = c.derivativeBounds;
    cj["assumptions"]      = c.assumptions;
    cj["gains"]            = c.gains;
    cj["ugs"]              = c.ugs;
    cj["uga"]              = c.uga;
    cj["sigma"]            = c.sigma;
    cj["ugaSpread"]        = c.ugaSpread;
    cj["ugsSpread"]        = c.ugsSpread;
    cj["etas"]             = c.etas;
    cj["samples"]          = c.samples;
    cj["nuSamples"]        = c.nuSamples;
    cj["trajectories"]     = c.trajectories;
    cj["boundDt"]          = c.boundDt;
    cj["boundHorizon"]     = c.boundHorizon;
    cj["peHorizon"]        = c.peHorizon;
    cj["peT"]              = c.peT;
    cj["peMu"]             = c.peMu;
    cj["peDelta"]          = c.peDelta;
    cj["pePoint"]          = c.pePoint;
    j["checks"]            = cj;
    return j.dump(2) + "\n";
}

std::vector<CatalogEntry> list_catalog(const std::filesystem::path& dir, std::vector<std::string>* problems)
{
    std::vector<CatalogEntry> out;
    std::error_code ec;
    if (!std::filesystem::is_directory(dir, ec)) {
        if (problems) {
            problems->push_back("catalog directory " + dir.string() + " does not exist");
        }
        return out;
    }
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        if (e.is_regular_file() && e.path().extension() == ".json") {
            files.push_back(e.path());
        }
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
        try {
            const auto s = load_scenario(f);
            out.push_back({f, s.name, s.description, s.demo});
        }
        catch (const ScenarioError& e) {
            if (problems) {
                problems->push_back(e.what());
            }
        }
    }
    return out;
}

} // namespace matrosov
