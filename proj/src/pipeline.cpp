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

#include "matrosov/gains.hpp"
#include "matrosov/stability.hpp"

#include "json.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

namespace matrosov
{

const StageOutcome* RunResult::stage(const std::string& name) const
{
    for (const auto& s : stages) {
        if (s.name == name) {
            return &s;
        }
    }
    return nullptr;
}

const std::vector<std::string>& pipeline_stages()
{
    static const std::vector<std::string> names{"simulate",          "pe-check",    "family-build", "derivative-bounds",
                                                "assumptions",       "gains",       "ugs",          "uga"};
    return names;
}

HeatFunction build_heat(const HeatSpec& spec, int dim, int restrictedDim)
{
    return make_heat(parse_heat_kind(spec.kind), {spec.kappa, spec.omega}, dim, restrictedDim);
}

ChannelNetworkConfig build_channel_config(const Scenario& s)
{
    ChannelNetworkConfig c;
    int xDim = 0;
    for (const auto& b : s.plant.blocks) {
        c.blocks.push_back(make_quadratic_block(b.dim, b.a, b.b));
        xDim += b.dim;
    }
    for (const auto& ch : s.plant.channels) {
        ChannelGain g;
        g.gA                = build_heat(ch.gA, xDim, xDim);
        const OffsetSpec o  = ch.gB;
        g.gB                = [o](double t, const Vector&) {
            return o.value + o.amplitude * std::sin(o.omega * t);
        };
        std::ostringstream label;
        label << o.value << " + " << o.amplitude << " sin(" << o.omega << " t)";
        g.gBLabel = label.str();
        c.channels.push_back(g);
    }
    c.sigma = make_output_nonlinearity(s.plant.sigma, s.plant.blocks.empty() ? 1 : s.plant.blocks.front().dim);
    c.validate();
    return c;
}

TimeVaryingSystem build_plant(const Scenario& s)
{
    const auto& p = s.plant;
    if (p.kind == "chained3") {
        return chained3_closed_loop(build_heat(s.heat, 2, 1));
    }
    if (p.kind == "chainedN") {
        return chainedN_closed_loop(p.n, p.k1, p.kPrime, build_heat(s.heat, p.n - 1, p.n - 2));
    }
    if (p.kind == "skew") {
        return skew_symmetric_plant(p.m, p.k, build_heat(s.heat, p.m, p.m - 1));
    }
    if (p.kind == "channels") {
        return channel_network_plant(build_channel_config(s));
    }
    if (p.kind == "cascade") {
        return cascade_demo_plant(p.coupling);
    }
    throw std::invalid_argument("unknown plant kind " + p.kind);
}

namespace
{

using nlohmann::ordered_json;

std::string utc_now()
{
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream out;
    out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return out.str();
}

ordered_json num(double v)
{
    return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr);
}

ordered_json vec(const std::vector<double>& v)
{
    ordered_json a = ordered_json::array();
    for (double x : v) {
        a.push_back(num(x));
    }
    return a;
}

ordered_json vec(const Vector& v)
{
    ordered_json a = ordered_json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        a.push_back(num(v(i)));
    }
    return a;
}

bool has_heat(const std::string& kind)
{
    return kind == "chained3" || kind == "chainedN" || kind == "skew";
}

bool has_family(const std::string& kind)
{
    return kind == "chained3" || kind == "skew" || kind == "channels";
}

std::vector<Vector> explicit_ics(const Scenario& s)
{
    std::vector<Vector> out;
    for (const auto& ic : s.grids.ics) {
        out.push_back(Eigen::Map<const Vector>(ic.data(), static_cast<Eigen::Index>(ic.size())));
    }
    return out;
}

void write_trajectories(const std::vector<Trajectory>& trajs, int dim, std::ostream& out)
{
    out << 't';
    for (int i = 1; i <= dim; ++i) {
        out << ",x" << i;
    }
    out << '\n' << std::setprecision(10);
    for (const auto& tr : trajs) {
        for (std::size_t k = 0; k < tr.size(); ++k) {
            out << tr.time(k);
            for (Eigen::Index i = 0; i < tr.states[k].size(); ++i) {
                out << ',' << tr.states[k](i);
            }
            out << '\n';
        }
    }
}

struct Context {
    const Scenario& s;
    TimeVaryingSystem plant;
    std::optional<AuxiliaryFamily> family;
    std::optional<GainCertificate> cert;
    std::vector<Violation> violations;
    PEProfile profile;
    bool haveProfile = false;
    ordered_json constants = ordered_json::object();
};

struct StageReport {
    StageOutcome outcome;
    ordered_json details = ordered_json::object();
};

StageReport skipped(const std::string& name, const std::string& why)
{
    return {{name, "skipped", why}, ordered_json::object()};
}

StageReport verdict(const std::string& name, bool pass, const std::string& message, ordered_json details)
{
    return {{name, pass ? "pass" : "fail", message}, std::move(details)};
}

// ---------------------------------------------------------------------------

StageReport stage_simulate(Context& c, std::vector<Trajectory>& trajs)
{
    const auto& s = c.s;
    StabilityOptions so;
    so.icCount = s.grids.simulateCount;
    so.dt      = s.grids.dt;
    so.seed    = s.seed;
    IntegrateOptions io;
    io.recordEvery = s.grids.recordEvery;
    bool diverged  = false;
    const double t0 = s.grids.t0.front();
    for (const auto& x0 : ic_batch(c.plant.dim, s.grids.icRadius, so)) {
        try {
            trajs.push_back(integrate(c.plant, t0, x0, t0 + s.grids.simulateHorizon, s.grids.dt, io));
        }
        catch (const IntegrationError& e) {
            diverged = true;
            trajs.push_back(e.partial());
            c.violations.push_back({"simulate", 0, e.lastValidTime(), std::numeric_limits<double>::infinity()});
        }
    }
    ordered_json d;
    d["trajectories"] = trajs.size();
    d["t0"]           = t0;
    d["horizon"]      = s.grids.simulateHorizon;
    ordered_json finals = ordered_json::array();
    for (const auto& tr : trajs) {
        finals.push_back(num(tr.states.back().norm()));
    }
    d["finalNorms"] = finals;
    return verdict("simulate", !diverged, diverged ? "a trajectory diverged" : "", d);
}

StageReport stage_pe(Context& c)
{
    const auto& s  = c.s;
    const auto& ch = s.checks;
    const auto& p  = s.plant;
    if (has_heat(p.kind)) {
        const int dim = p.kind == "chained3" ? 2 : (p.kind == "chainedN" ? p.n - 1 : p.m);
        const auto heat = build_heat(s.heat, dim, dim - 1);
        const int r     = heat.restrictedDim;
        auto probe      = ExcitationProbe::scalar(heat.psi, r, 0.0, ch.peHorizon, 1e-2);
        Vector x        = Vector::Zero(r);
        x(0)            = ch.pePoint;
        UdpeOptions uo;
        uo.seed      = s.seed + 3;
        const auto v = check_udpe(probe, x, ch.peDelta, ch.peT, ch.peMu, uo);

        auto profProbe = ExcitationProbe::scalar(heat.psi, r, 0.0, std::min(ch.peHorizon, 4.0 * ch.peT), 1e-2);
        ProfileOptions po;
        po.windowMax  = ch.peT;
        po.seed       = s.seed + 4;
        c.profile     = estimate_pe_profile(profProbe, s.region.Delta, 16, po);
        c.haveProfile = true;

        ordered_json d;
        d["signal"]   = "psi of the heat, restricted coordinates";
        d["minMass"]  = num(v.minMass);
        d["witnessT"] = num(v.witnessT);
        d["T"]        = v.T;
        d["mu"]       = v.mu;
        d["delta"]    = v.delta;
        d["horizon"]  = ch.peHorizon;
        if (!v.pass) {
            c.violations.push_back({"pe-check", 0, v.witnessT, v.minMass - v.mu});
        }
        std::ostringstream msg;
        msg << "smallest window mass " << v.minMass << " vs mu " << v.mu;
        return verdict("pe-check", v.pass, msg.str(), d);
    }
    if (p.kind == "channels") {
        const auto config = build_channel_config(s);
        const auto off    = config.xOffsets();
        NecessityOptions no;
        no.tEnd  = ch.peHorizon;
        no.T     = ch.peT;
        no.mu    = ch.peMu;
        no.delta = ch.peDelta;
        bool pass = true;
        ordered_json blocks = ordered_json::array();
        for (int i = 1; i <= config.blockCount() - 1; ++i) {
            Vector x = Vector::Zero(config.xDim());
            for (int b = 0; b < i; ++b) {
                x(off[static_cast<std::size_t>(b)]) = ch.pePoint;
            }
            const auto rep = check_necessity_vector_field(config, i, {x}, no);
            pass           = pass && rep.pass;
            ordered_json bj;
            bj["block"]         = i;
            bj["udpe"]          = rep.udpePass;
            bj["identity"]      = rep.identityPass;
            bj["identityError"] = num(rep.identityError);
            bj["minMass"]       = num(rep.verdicts.front().minMass);
            blocks.push_back(bj);
            if (!rep.pass) {
                c.violations.push_back(
                    {"pe-check", i, rep.verdicts.front().witnessT, rep.verdicts.front().minMass - ch.peMu});
            }
        }
        ordered_json d;
        d["signal"] = "vector field norm on zeta = 0 with trailing blocks zero";
        d["blocks"] = blocks;
        return verdict("pe-check", pass, pass ? "" : "vector field not excited for some block", d);
    }
    return skipped("pe-check", "no excitation signal for this plant");
}

StageReport stage_family(Context& c)
{
    const auto& s = c.s;
    FamilyOptions fo;
    fo.Delta     = s.region.Delta;
    fo.nuSamples = s.checks.nuSamples;
    fo.seed      = s.seed;
    const auto& p = s.plant;
    if (p.kind == "chained3") {
        c.family = aux_family_chained3(build_heat(s.heat, 2, 1), fo);
    }
    else if (p.kind == "skew") {
        c.family = aux_family_skew(p.m, p.k, build_heat(s.heat, p.m, p.m - 1), fo);
    }
    else {
        c.family = aux_family_channels(build_channel_config(s), fo);
    }
    const auto& f = *c.family;
    if (!c.haveProfile && !f.profiles.empty()) {
        c.profile     = f.profiles.front();
        c.haveProfile = true;
    }
    const double sampled = sampled_mu(f, 10000, fo.timeWindow, s.seed + 11);
    const bool ok        = sampled <= f.mu;
    ordered_json d;
    d["label"] = f.label;
    d["j"]     = f.j;
    d["m"]     = f.m;
    d["mu"]    = num(f.mu);
    d["sampledMu"] = num(sampled);
    d["nu"]    = vec(f.nu());
    ordered_json formulas = ordered_json::array();
    for (const auto& t : f.terms) {
        formulas.push_back(t.formula);
    }
    d["bounds"] = formulas;
    d["notes"]  = f.notes;
    c.constants["mu"] = num(f.mu);
    c.constants["nu"] = vec(f.nu());
    if (!ok) {
        c.violations.push_back({"family-build", 0, 0.0, sampled - f.mu});
    }
    return verdict("family-build", ok, ok ? "" : "sampled bound exceeds mu", d);
}

StageReport stage_bounds(Context& c)
{
    const auto& s = c.s;
    DerivativeBoundOptions o;
    o.trajectories = s.checks.trajectories;
    o.dt           = s.checks.boundDt;
    o.horizon      = s.checks.boundHorizon;
    o.t0           = s.grids.t0;
    o.seed         = s.seed + 21;
    const auto rep = check_derivative_bounds(*c.family, o);
    c.violations.insert(c.violations.end(), rep.violations.begin(), rep.violations.end());
    ordered_json d;
    d["tol"]                 = 10.0 * o.dt;
    d["checkedPoints"]       = rep.checkedPoints;
    d["skippedTrajectories"] = rep.skippedTrajectories;
    d["worstMargin"]         = vec(rep.worstMargin);
    d["violations"]          = rep.violations.size();
    d["notes"]               = rep.notes;
    std::ostringstream msg;
    msg << rep.violations.size() << " violations over " << rep.checkedPoints << " points";
    return verdict("derivative-bounds", rep.pass, msg.str(), d);
}

StageReport stage_assumptions(Context& c)
{
    const auto& s = c.s;
    ChainOptions o;
    o.etas    = s.checks.etas;
    o.samples = s.checks.samples;
    o.seed    = s.seed + 31;
    const auto samples = sample_pairs(*c.family, o.samples, c.family->mu, o.seed);
    const auto chain   = check_nonpositivity_chain(*c.family, samples, o.etas);
    const auto zero    = check_zero_locus(*c.family, samples, o.etas);

    ordered_json steps = ordered_json::array();
    for (const auto& st : chain.steps) {
        ordered_json sj;
        sj["k"]       = st.k;
        sj["pass"]    = st.pass;
        sj["vacuous"] = st.vacuous;
        sj["slack"]   = num(st.slack);
        sj["limit"]   = num(st.limit);
        sj["rate"]    = num(st.rate);
        ordered_json lv = ordered_json::array();
        for (const auto& l : st.levels) {
            lv.push_back({{"eta", l.eta}, {"members", l.members}, {"supY", num(l.supY)}});
        }
        sj["levels"] = lv;
        steps.push_back(sj);
        if (!st.pass) {
            c.violations.push_back({"chain", st.k, 0.0, st.levels.back().supY});
        }
    }
    if (!zero.pass) {
        c.violations.push_back({"zero-locus", 0, 0.0, zero.radius.back()});
    }
    ordered_json d;
    d["samples"]    = samples.size();
    d["chainPass"]  = chain.pass;
    d["chain"]      = steps;
    d["zeroLocusPass"]   = zero.pass;
    d["zeroLocusRadius"] = vec(zero.radius);
    d["zeroLocusLimit"]  = num(zero.limit);
    std::string msg;
    if (!chain.pass) {
        msg += "nonpositivity chain fails at k =";
        for (const auto& st : chain.steps) {
            if (!st.pass) {
                msg += " " + std::to_string(st.k);
            }
        }
    }
    if (!zero.pass) {
        msg += std::string(msg.empty() ? "" : "; ") + "zero locus does not shrink";
    }
    return verdict("assumptions", chain.pass && zero.pass, msg, d);
}

StageReport stage_gains(Context& c)
{
    const auto& s = c.s;
    GainOptions o;
    o.samples      = s.checks.samples;
    o.seed         = s.seed + 41;
    o.reverifySeed = s.seed + 4141;
    try {
        c.cert = find_matrosov_gains(*c.family, s.region.delta, o);
    }
    catch (const GainSearchError& e) {
        c.violations.push_back({"gains", e.step(), 0.0, std::numeric_limits<double>::quiet_NaN()});
        ordered_json d;
        d["step"] = e.step();
        if (e.witness().X.size() > 0) {
            d["witnessX"]   = vec(e.witness().X);
            d["witnessPsi"] = vec(e.witness().psi);
        }
        return verdict("gains", false, e.what(), d);
    }
    const auto& g = *c.cert;
    ordered_json d;
    d["epsilon"]         = num(g.epsilon);
    d["K"]               = vec(g.K);
    d["exponents"]       = g.exponents;
    d["delta"]           = g.delta;
    d["Delta"]           = g.Delta;
    d["eta"]             = num(g.eta);
    d["Tpredicted"]      = num(g.Tpredicted);
    d["reverified"]      = g.reverified;
    d["reverifyWorst"]   = num(g.reverifyWorst);
    d["reverifySamples"] = g.reverifySamples;
    d["rounds"]          = g.rounds;
    c.constants["epsilon"]    = num(g.epsilon);
    c.constants["K"]          = vec(g.K);
    c.constants["eta"]        = num(g.eta);
    c.constants["Tpredicted"] = num(g.Tpredicted);
    if (!g.reverified) {
        c.violations.push_back({"gains", 0, 0.0, g.reverifyWorst});
    }
    return verdict("gains", g.reverified, g.reverified ? "" : "fresh samples violate the certificate", d);
}

StabilityOptions stability_options(const Scenario& s)
{
    StabilityOptions so;
    so.icCount    = s.grids.icCount;
    so.dt         = s.grids.dt;
    so.seed       = s.seed + 51;
    so.uniformTol = s.checks.ugsSpread;
    so.ics        = explicit_ics(s);
    return so;
}

StageReport stage_ugs(Context& c)
{
    const auto& s  = c.s;
    const auto rep = verify_ugs(c.plant, s.grids.ugsRadii, s.grids.t0, s.grids.horizon, stability_options(s));
    ordered_json env = ordered_json::array();
    for (const auto& e : rep.gammaEnvelope) {
        env.push_back({{"radius", e.radius}, {"bound", num(e.bound)}, {"perT0", vec(e.perT0)}, {"spread", num(e.spread)}});
    }
    for (const auto& w : rep.witnesses) {
        c.violations.push_back({"ugs", 0, w.t, w.value});
    }
    ordered_json d;
    d["envelope"] = env;
    d["uniform"]  = rep.uniform;
    d["diverged"] = rep.diverged;
    const bool pass = !rep.diverged && rep.uniform;
    return verdict("ugs", pass, rep.diverged ? "divergence" : (rep.uniform ? "" : "envelope depends on t0"), d);
}

StageReport stage_uga(Context& c)
{
    const auto& s  = c.s;
    const auto rep = verify_uga(c.plant, s.grids.icRadius, s.checks.sigma, s.grids.t0, s.grids.horizon,
                                stability_options(s));
    ordered_json table = ordered_json::array();
    for (const auto& e : rep.settlingTimes) {
        table.push_back({{"t0", e.t0}, {"T", e.T ? num(*e.T) : ordered_json(nullptr)}});
    }
    for (const auto& w : rep.witnesses) {
        c.violations.push_back({"uga", 0, w.t, w.value - s.checks.sigma});
    }
    ordered_json d;
    d["radius"]   = s.grids.icRadius;
    d["sigma"]    = s.checks.sigma;
    d["settling"] = table;
    d["uniformT"] = rep.uniformT ? num(*rep.uniformT) : ordered_json(nullptr);
    d["spread"]   = num(rep.spread);
    d["witnesses"] = rep.witnesses.size();
    bool pass       = rep.uniform && rep.uniformT && rep.spread < s.checks.ugaSpread;
    std::string msg = !rep.uniformT ? "no settling time within the horizon"
                                    : (rep.spread < s.checks.ugaSpread ? "" : "settling time depends on t0");
    if (c.cert && rep.uniformT) {
        const bool below          = *rep.uniformT <= c.cert->Tpredicted;
        d["belowTpredicted"]      = below;
        if (!below) {
            pass = false;
            msg  = "settling time exceeds the certificate";
        }
    }
    return verdict("uga", pass, msg, d);
}

} // namespace

RunResult run_scenario(const Scenario& s, const std::filesystem::path& outDir, const RunOptions& options)
{
    validate(s);
    std::filesystem::create_directories(outDir);
    {
        std::ofstream out(outDir / "scenario.json");
        out << to_json(s);
    }

    RunResult result;
    result.outDir = outDir;
    Context c{s, build_plant(s), {}, {}, {}, {}, false};
    std::vector<Trajectory> trajs;
    ordered_json stages = ordered_json::array();

    const auto& ch = s.checks;
    const std::string demoNote = "demo, no checker";
    const bool famPlant        = has_family(s.plant.kind) && !s.demo;

    auto run = [&](const std::string& name, bool selected, bool applicable, const std::string& why,
                   const std::function<StageReport()>& body) {
        StageReport r;
        if (!selected) {
            r = skipped(name, "not selected");
        }
        else if (!applicable) {
            r = skipped(name, why);
        }
        else {
            try {
                r = body();
            }
            catch (const std::exception& e) {
                r = {{name, "error", e.what()}, ordered_json::object()};
            }
        }
        if (options.log) {
            *options.log << name << ": " << r.outcome.verdict;
            if (!r.outcome.message.empty()) {
                *options.log << " (" << r.outcome.message << ")";
            }
            *options.log << '\n';
        }
        ordered_json sj;
        sj["name"]    = r.outcome.name;
        sj["verdict"] = r.outcome.verdict;
        sj["message"] = r.outcome.message;
        sj["details"] = r.details;
        stages.push_back(sj);
        result.stages.push_back(r.outcome);
        return r.outcome.verdict;
    };

    run("simulate", ch.simulate, true, "", [&] {
        return stage_simulate(c, trajs);
    });
    run("pe-check", ch.pe, !s.demo, demoNote, [&] {
        return stage_pe(c);
    });
    const std::string famWhy = s.demo ? demoNote : "no auxiliary family for this plant";
    const std::string fam    = run("family-build", ch.family, famPlant, famWhy, [&] {
        return stage_family(c);
    });
    const bool haveFamily = c.family.has_value();
    const std::string needFamily = famPlant ? (fam == "skipped" ? "family-build not run" : "family-build failed") : famWhy;
    run("derivative-bounds", ch.derivativeBounds, haveFamily, needFamily, [&] {
        return stage_bounds(c);
    });
    run("assumptions", ch.assumptions, haveFamily, needFamily, [&] {
        return stage_assumptions(c);
    });
    run("gains", ch.gains, haveFamily, needFamily, [&] {
        return stage_gains(c);
    });
    run("ugs", ch.ugs, true, "", [&] {
        return stage_ugs(c);
    });
    run("uga", ch.uga, true, "", [&] {
        return stage_uga(c);
    });

    bool pass = true;
    for (const auto& st : result.stages) {
        if (st.verdict == "fail" || st.verdict == "error") {
            pass = false;
        }
        // a selected stage skipped for a failed dependency is not a pass
        if (st.verdict == "skipped" && (st.message == "family-build failed")) {
            pass = false;
        }
    }
    result.exitCode = pass ? 0 : 1;

    {
        std::ofstream out(outDir / "trajectories.csv");
        write_trajectories(trajs, c.plant.dim, out);
    }
    {
        std::ofstream out(outDir / "pe_profile.csv");
        if (c.haveProfile) {
            write_profile_csv(c.profile, out);
        }
        else {
            out << "radius,theta,gamma\n";
        }
    }
    {
        std::ofstream out(outDir / "violations.csv");
        write_violations_csv(c.violations, out);
    }
    ordered_json summary;
    summary["scenario"]    = s.name;
    summary["description"] = s.description;
    summary["demo"]        = s.demo;
    summary["timestamp"]   = options.timestamp.empty() ? utc_now() : options.timestamp;
    summary["seed"]        = s.seed;
    summary["verdict"]     = pass ? "pass" : "fail";
    summary["exitCode"]    = result.exitCode;
    summary["stages"]      = stages;
    summary["constants"]   = c.constants;
    {
        std::ofstream out(outDir / "summary.json");
        out << summary.dump(2) << '\n';
    }
    return result;
}

} // namespace matrosov
