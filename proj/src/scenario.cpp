#include "sim/scenario.hpp"

#include "sim/analysis.hpp"
#include "sim/io.hpp"
#include "sim/optimize.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <thread>

namespace sim {

using nlohmann::json;

std::string to_string(ScenarioKind kind) {
    switch (kind) {
        case ScenarioKind::Swap: return "swap";
        case ScenarioKind::SwapConstantChirp: return "swap-constant-chirp";
        case ScenarioKind::NetworkNv: return "network-nv";
        case ScenarioKind::NetworkEr: return "network-er";
        case ScenarioKind::Sweep: return "sweep";
        case ScenarioKind::Calibrate: return "calibrate";
    }
    return "?";
}

std::vector<double> IntegratorConfig::sampleTimes() const {
    std::vector<double> t(samples);
    for (int i = 0; i < samples; ++i)
        t[i] = windowStart + (windowEnd - windowStart) * i / (samples - 1);
    return t;
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw ConfigError("config error at " + path + ": " + msg);
}

void requireObject(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
}

void checkKeys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    requireObject(j, path);
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) ok = true;
        if (!ok) fail(path + "/" + key, "unknown key");
    }
}

double asNumber(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

// Rates and frequencies: tagged {"value", "unit": "ratio"|"MHz-angular"}, or a
// bare number meaning base-rate ratio.
double parseRate(const json& j, const std::string& path, double baseMHz) {
    if (j.is_number()) return j.get<double>();
    checkKeys(j, path, {"value", "unit"});
    if (!j.contains("value") || !j.contains("unit")) fail(path, "need value and unit");
    const double v = asNumber(j["value"], path + "/value");
    const std::string unit = j["unit"].get<std::string>();
    if (unit == "ratio") return v;
    if (unit == "MHz-angular") return v / baseMHz;
    fail(path + "/unit", "unknown rate unit '" + unit + "' (ratio | MHz-angular)");
}

// Times: tagged with "base-time" (units of 1/baseRate) or "ns".
double parseTime(const json& j, const std::string& path, double baseMHz) {
    if (j.is_number()) return j.get<double>();
    checkKeys(j, path, {"value", "unit"});
    if (!j.contains("value") || !j.contains("unit")) fail(path, "need value and unit");
    const double v = asNumber(j["value"], path + "/value");
    const std::string unit = j["unit"].get<std::string>();
    if (unit == "base-time") return v;
    if (unit == "ns") return v * 1e-3 * 2.0 * M_PI * baseMHz;
    fail(path + "/unit", "unknown time unit '" + unit + "' (base-time | ns)");
}

json tagRatio(double v) { return json{{"value", v}, {"unit", "ratio"}}; }
json tagTime(double v) { return json{{"value", v}, {"unit", "base-time"}}; }

EnsembleSpec parseEnsemble(const json& j, const std::string& path, double baseMHz,
                           std::uint64_t defaultSeed) {
    checkKeys(j, path, {"groups", "sigmaDelta", "sigmaTheta", "sampling", "seed",
                        "collectiveCoupling"});
    EnsembleSpec spec;
    if (j.contains("groups")) spec.groups = j["groups"].get<int>();
    if (j.contains("sigmaDelta")) spec.sigmaDelta = parseRate(j["sigmaDelta"], path + "/sigmaDelta", baseMHz);
    if (j.contains("sigmaTheta")) spec.sigmaTheta = asNumber(j["sigmaTheta"], path + "/sigmaTheta");
    spec.seed = defaultSeed;
    if (j.contains("seed")) spec.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("sampling")) {
        const std::string s = j["sampling"].get<std::string>();
        if (s == "stratified") spec.mode = SamplingMode::Stratified;
        else if (s == "seededRandom") spec.mode = SamplingMode::SeededRandom;
        else fail(path + "/sampling", "unknown sampling mode '" + s + "'");
    }
    if (j.contains("collectiveCoupling"))
        spec.collectiveCoupling = parseRate(j["collectiveCoupling"], path + "/collectiveCoupling", baseMHz);
    spec.validate();
    return spec;
}

NodeParams parseNode(const json& j, const std::string& path, double baseMHz,
                     std::uint64_t defaultSeed) {
    checkKeys(j, path,
              {"gamma1Qb", "gamma2StarQb", "kappa", "extraction", "gamma1En", "gamma2StarEn",
               "delta0", "delta1", "dBar", "deltaQ", "gBarC", "omegaC0", "gamma0Opt",
               "gamma1Opt", "ensemble"});
    NodeParams p;
    auto rate = [&](const char* key, double& out) {
        if (j.contains(key)) out = parseRate(j[key], path + "/" + key, baseMHz);
    };
    rate("gamma1Qb", p.gamma1Qb);
    rate("gamma2StarQb", p.gamma2StarQb);
    rate("kappa", p.kappa);
    rate("gamma1En", p.gamma1En);
    rate("gamma2StarEn", p.gamma2StarEn);
    rate("delta0", p.delta0);
    rate("delta1", p.delta1);
    rate("dBar", p.dBar);
    rate("deltaQ", p.deltaQ);
    rate("gBarC", p.gBarC);
    rate("omegaC0", p.omegaC0);
    rate("gamma0Opt", p.gamma0Opt);
    rate("gamma1Opt", p.gamma1Opt);
    if (j.contains("extraction")) p.extraction = asNumber(j["extraction"], path + "/extraction");
    if (!j.contains("ensemble")) fail(path, "missing ensemble block");
    p.ensemble = parseEnsemble(j["ensemble"], path + "/ensemble", baseMHz, defaultSeed);
    p.validate();
    return p;
}

json nodeToJson(const NodeParams& p) {
    return json{
        {"gamma1Qb", tagRatio(p.gamma1Qb)},
        {"gamma2StarQb", tagRatio(p.gamma2StarQb)},
        {"kappa", tagRatio(p.kappa)},
        {"extraction", p.extraction},
        {"gamma1En", tagRatio(p.gamma1En)},
        {"gamma2StarEn", tagRatio(p.gamma2StarEn)},
        {"delta0", tagRatio(p.delta0)},
        {"delta1", tagRatio(p.delta1)},
        {"dBar", tagRatio(p.dBar)},
        {"deltaQ", tagRatio(p.deltaQ)},
        {"gBarC", tagRatio(p.gBarC)},
        {"omegaC0", tagRatio(p.omegaC0)},
        {"gamma0Opt", tagRatio(p.gamma0Opt)},
        {"gamma1Opt", tagRatio(p.gamma1Opt)},
        {"ensemble",
         json{{"groups", p.ensemble.groups},
              {"sigmaDelta", tagRatio(p.ensemble.sigmaDelta)},
              {"sigmaTheta", p.ensemble.sigmaTheta},
              {"sampling", p.ensemble.mode == SamplingMode::Stratified ? "stratified" : "seededRandom"},
              {"seed", p.ensemble.seed},
              {"collectiveCoupling", tagRatio(p.ensemble.collectiveCoupling)}}}};
}

struct PulseRaw {
    PulseSchedule schedule;
    bool tauDcGiven = false;
    double delayOverTauF = 1.25;
};

PulseRaw parsePulse(const json& j, const std::string& path, double baseMHz, double omegaC0) {
    checkKeys(j, path, {"shape", "j1Peak", "tauF", "tauC", "tauDc", "delayOverTauF", "chirp"});
    PulseRaw raw;
    PulseSchedule& p = raw.schedule;
    p.omegaC0 = omegaC0;
    if (j.contains("shape")) {
        const std::string s = j["shape"].get<std::string>();
        if (s == "gaussian") p.shape = OpticalShape::Gaussian;
        else if (s == "sech") p.shape = OpticalShape::Sech;
        else fail(path + "/shape", "unknown pulse shape '" + s + "'");
    }
    if (j.contains("j1Peak")) p.j1Peak = asNumber(j["j1Peak"], path + "/j1Peak");
    if (j.contains("tauC")) p.tauC = parseTime(j["tauC"], path + "/tauC", baseMHz);
    p.tauF = j.contains("tauF") ? parseTime(j["tauF"], path + "/tauF", baseMHz) : p.tauC;
    if (j.contains("delayOverTauF"))
        raw.delayOverTauF = asNumber(j["delayOverTauF"], path + "/delayOverTauF");
    if (j.contains("tauDc")) {
        p.tauDc = parseTime(j["tauDc"], path + "/tauDc", baseMHz);
        raw.tauDcGiven = true;
    } else {
        p.tauDc = 4.0 * std::max(p.tauC, p.tauF);
    }
    p.tauDf = p.tauDc + raw.delayOverTauF * p.tauF;
    if (j.contains("chirp")) {
        const std::string s = j["chirp"].get<std::string>();
        if (s == "tracking") p.chirp = ChirpMode::Tracking;
        else if (s == "constant") p.chirp = ChirpMode::Constant;
        else if (s == "zero") p.chirp = ChirpMode::Zero;
        else fail(path + "/chirp", "unknown chirp mode '" + s + "'");
    }
    p.validate();
    return raw;
}

json pulseToJson(const PulseSchedule& p, double delayOverTauF) {
    const char* chirp = p.chirp == ChirpMode::Tracking ? "tracking"
                        : p.chirp == ChirpMode::Constant ? "constant" : "zero";
    return json{{"shape", p.shape == OpticalShape::Gaussian ? "gaussian" : "sech"},
                {"j1Peak", p.j1Peak},
                {"tauF", tagTime(p.tauF)},
                {"tauC", tagTime(p.tauC)},
                {"tauDc", tagTime(p.tauDc)},
                {"delayOverTauF", delayOverTauF},
                {"chirp", chirp}};
}

ScenarioKind parseKind(const std::string& s, const std::string& path) {
    for (ScenarioKind k : {ScenarioKind::Swap, ScenarioKind::SwapConstantChirp,
                           ScenarioKind::NetworkNv, ScenarioKind::NetworkEr, ScenarioKind::Sweep,
                           ScenarioKind::Calibrate})
        if (s == to_string(k)) return k;
    fail(path, "unknown scenario '" + s + "'");
}

ScenarioConfig parseConfig(const json& j, const ConfigOverrides& overrides) {
    checkKeys(j, "/",
              {"scenario", "baseRate", "seed", "node", "network", "pulse", "integrator", "sweep",
               "calibrate", "output"});
    ScenarioConfig c;
    if (!j.contains("scenario")) fail("/scenario", "missing");
    c.kind = parseKind(j["scenario"].get<std::string>(), "/scenario");

    if (!j.contains("baseRate")) fail("/baseRate", "missing");
    checkKeys(j["baseRate"], "/baseRate", {"label", "valueMHz"});
    c.baseRateLabel = j["baseRate"].value("label", "base");
    c.baseRateMHz = asNumber(j["baseRate"].at("valueMHz"), "/baseRate/valueMHz");
    if (c.baseRateMHz <= 0) fail("/baseRate/valueMHz", "must be positive");

    c.seed = j.value("seed", std::uint64_t{1});
    if (overrides.seed) c.seed = *overrides.seed;

    const bool network = c.kind == ScenarioKind::NetworkNv || c.kind == ScenarioKind::NetworkEr ||
                         c.kind == ScenarioKind::Calibrate;
    double omegaC0 = 0.0;
    if (network) {
        if (!j.contains("network")) fail("/network", "missing for a network scenario");
        checkKeys(j["network"], "/network", {"node", "dispersiveDetuning"});
        if (!j["network"].contains("node")) fail("/network/node", "missing");
        c.network.nodeA = parseNode(j["network"]["node"], "/network/node", c.baseRateMHz, c.seed);
        c.network.nodeB = c.network.nodeA;
        if (!j["network"].contains("dispersiveDetuning"))
            fail("/network/dispersiveDetuning", "missing");
        c.network.dispersiveDetuning =
            parseRate(j["network"]["dispersiveDetuning"], "/network/dispersiveDetuning", c.baseRateMHz);
        omegaC0 = c.network.nodeA.omegaC0;
    } else {
        if (!j.contains("node")) fail("/node", "missing");
        c.node = parseNode(j["node"], "/node", c.baseRateMHz, c.seed);
        omegaC0 = c.node.omegaC0;
    }

    if (!j.contains("pulse")) fail("/pulse", "missing");
    auto raw = parsePulse(j["pulse"], "/pulse", c.baseRateMHz, omegaC0);
    c.pulse = raw.schedule;
    c.pulseDelayOverTauF = raw.delayOverTauF;
    if (c.kind == ScenarioKind::SwapConstantChirp) {
        if (j["pulse"].contains("chirp") && c.pulse.chirp != ChirpMode::Constant)
            fail("/pulse/chirp", "swap-constant-chirp requires constant chirp");
        c.pulse.chirp = ChirpMode::Constant;
    }

    if (j.contains("integrator")) {
        checkKeys(j["integrator"], "/integrator", {"relTol", "absTol", "samples", "window"});
        const auto& ji = j["integrator"];
        if (ji.contains("relTol")) c.integrator.relTol = asNumber(ji["relTol"], "/integrator/relTol");
        if (ji.contains("absTol")) c.integrator.absTol = asNumber(ji["absTol"], "/integrator/absTol");
        if (ji.contains("samples")) c.integrator.samples = ji["samples"].get<int>();
        if (ji.contains("window")) {
            checkKeys(ji["window"], "/integrator/window", {"start", "end"});
            if (ji["window"].contains("start"))
                c.integrator.windowStart = parseTime(ji["window"]["start"], "/integrator/window/start", c.baseRateMHz);
            if (!ji["window"].contains("end")) fail("/integrator/window/end", "missing");
            c.integrator.windowEnd = parseTime(ji["window"]["end"], "/integrator/window/end", c.baseRateMHz);
        }
    }
    if (c.integrator.windowEnd <= c.integrator.windowStart)
        c.integrator.windowEnd = c.integrator.windowStart + 12.0 * std::max(c.pulse.tauC, c.pulse.tauF);
    if (c.integrator.samples < 2) fail("/integrator/samples", "need at least 2 samples");
    if (c.integrator.relTol <= 0 || c.integrator.absTol <= 0)
        fail("/integrator", "tolerances must be positive");
    if (overrides.relTol) c.integrator.relTol = *overrides.relTol;

    if (c.kind == ScenarioKind::Sweep) {
        if (!j.contains("sweep")) fail("/sweep", "missing for the sweep scenario");
        checkKeys(j["sweep"], "/sweep",
                  {"kappaOverGamma", "gMHz", "scaleTauWithG", "flagThreshold"});
        const auto& js = j["sweep"];
        auto parseAxis = [&](const json& a, const std::string& path, double& lo, double& hi, int& count) {
            checkKeys(a, path, {"min", "max", "count"});
            lo = asNumber(a.at("min"), path + "/min");
            hi = asNumber(a.at("max"), path + "/max");
            count = a.value("count", 5);
            if (count < 1 || hi < lo) fail(path, "bad axis");
        };
        if (js.contains("kappaOverGamma"))
            parseAxis(js["kappaOverGamma"], "/sweep/kappaOverGamma", c.sweep.kappaOverGammaMin,
                      c.sweep.kappaOverGammaMax, c.sweep.kappaCount);
        if (js.contains("gMHz"))
            parseAxis(js["gMHz"], "/sweep/gMHz", c.sweep.gMinMHz, c.sweep.gMaxMHz, c.sweep.gCount);
        c.sweep.scaleTauWithG = js.value("scaleTauWithG", true);
        c.sweep.flagThreshold = js.value("flagThreshold", 0.81);
    }

    if (c.kind == ScenarioKind::Calibrate) {
        if (!j.contains("calibrate")) fail("/calibrate", "missing for the calibrate scenario");
        checkKeys(j["calibrate"], "/calibrate",
                  {"tauC", "center", "maxEvals", "coarseRelTol"});
        const auto& jc = j["calibrate"];
        auto parseRange = [&](const json& a, const std::string& path, double& lo, double& hi) {
            checkKeys(a, path, {"min", "max"});
            lo = parseTime(a.at("min"), path + "/min", c.baseRateMHz);
            hi = parseTime(a.at("max"), path + "/max", c.baseRateMHz);
            if (hi < lo) fail(path, "min exceeds max");
        };
        if (jc.contains("tauC")) parseRange(jc["tauC"], "/calibrate/tauC", c.calibrate.tauCLo, c.calibrate.tauCHi);
        if (jc.contains("center"))
            parseRange(jc["center"], "/calibrate/center", c.calibrate.centerLo, c.calibrate.centerHi);
        c.calibrate.maxEvals = jc.value("maxEvals", 120);
        c.calibrate.coarseRelTol = jc.value("coarseRelTol", 1e-6);
    }

    if (j.contains("output")) {
        checkKeys(j["output"], "/output",
                  {"directory", "svg", "wignerTime", "wignerHalfWidth", "wignerPoints"});
        const auto& jo = j["output"];
        c.output.directory = jo.value("directory", "out");
        c.output.svg = jo.value("svg", false);
        if (jo.contains("wignerTime") && !jo["wignerTime"].is_null())
            c.output.wignerTime = parseTime(jo["wignerTime"], "/output/wignerTime", c.baseRateMHz);
        c.output.wignerHalfWidth = jo.value("wignerHalfWidth", 3.0);
        c.output.wignerPoints = jo.value("wignerPoints", 201);
    }
    if (overrides.outDir) c.output.directory = *overrides.outDir;
    if (overrides.svg) c.output.svg = *overrides.svg;
    return c;
}

} // namespace

json resolved_config_json(const ScenarioConfig& c) {
    json j{{"scenario", to_string(c.kind)},
           {"baseRate", json{{"label", c.baseRateLabel}, {"valueMHz", c.baseRateMHz}}},
           {"seed", c.seed},
           {"pulse", pulseToJson(c.pulse, c.pulseDelayOverTauF)},
           {"integrator",
            json{{"relTol", c.integrator.relTol},
                 {"absTol", c.integrator.absTol},
                 {"samples", c.integrator.samples},
                 {"window", json{{"start", tagTime(c.integrator.windowStart)},
                                 {"end", tagTime(c.integrator.windowEnd)}}}}},
           {"output", json{{"directory", c.output.directory},
                           {"svg", c.output.svg},
                           {"wignerHalfWidth", c.output.wignerHalfWidth},
                           {"wignerPoints", c.output.wignerPoints}}}};
    if (c.output.wignerTime) j["output"]["wignerTime"] = tagTime(*c.output.wignerTime);
    const bool network = c.kind == ScenarioKind::NetworkNv || c.kind == ScenarioKind::NetworkEr ||
                         c.kind == ScenarioKind::Calibrate;
    if (network) {
        j["network"] = json{{"node", nodeToJson(c.network.nodeA)},
                            {"dispersiveDetuning", tagRatio(c.network.dispersiveDetuning)}};
    } else {
        j["node"] = nodeToJson(c.node);
    }
    if (c.kind == ScenarioKind::Sweep) {
        j["sweep"] = json{{"kappaOverGamma", json{{"min", c.sweep.kappaOverGammaMin},
                                                  {"max", c.sweep.kappaOverGammaMax},
                                                  {"count", c.sweep.kappaCount}}},
                          {"gMHz", json{{"min", c.sweep.gMinMHz},
                                        {"max", c.sweep.gMaxMHz},
                                        {"count", c.sweep.gCount}}},
                          {"scaleTauWithG", c.sweep.scaleTauWithG},
                          {"flagThreshold", c.sweep.flagThreshold}};
    }
    if (c.kind == ScenarioKind::Calibrate) {
        j["calibrate"] = json{{"tauC", json{{"min", tagTime(c.calibrate.tauCLo)},
                                            {"max", tagTime(c.calibrate.tauCHi)}}},
                              {"center", json{{"min", tagTime(c.calibrate.centerLo)},
                                              {"max", tagTime(c.calibrate.centerHi)}}},
                              {"maxEvals", c.calibrate.maxEvals},
                              {"coarseRelTol", c.calibrate.coarseRelTol}};
    }
    return j;
}

ScenarioConfig load_config(const std::string& path, const ConfigOverrides& overrides) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
    if (j.is_object() && j.contains("config")) {
        // A previously emitted run manifest: reuse its resolved config.
        return parseConfig(j["config"], overrides);
    }
    return parseConfig(j, overrides);
}

namespace {

void writeManifest(const ScenarioConfig& config, const json& metrics, double wallSeconds) {
    json manifest{{"generator", "sim 1.0.0"},
                  {"scenario", to_string(config.kind)},
                  {"seed", config.seed},
                  {"wallClockSeconds", wallSeconds},
                  {"metrics", metrics},
                  {"config", resolved_config_json(config)}};
    writeTextFile(config.output.directory + "/manifest.json", manifest.dump(2) + "\n");
}

std::string timeLabel(const ScenarioConfig& c) { return c.baseRateLabel + "*t"; }

} // namespace

RunMetrics run_scenario(const ScenarioConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    std::filesystem::create_directories(config.output.directory);
    const auto sampleTimes = config.integrator.sampleTimes();
    const auto opts = config.integrator.evolveOptions();
    RunMetrics metrics;
    CsvTable table;

    if (config.kind == ScenarioKind::Sweep || config.kind == ScenarioKind::Calibrate)
        throw ConfigError("run_scenario: use the sweep/calibrate entry points for this scenario");

    std::optional<CavityState> wignerState;
    std::size_t wignerIdx = 0;
    if (config.output.wignerTime) {
        double best = 1e300;
        for (std::size_t i = 0; i < sampleTimes.size(); ++i) {
            const double d = std::abs(sampleTimes[i] - *config.output.wignerTime);
            if (d < best) {
                best = d;
                wignerIdx = i;
            }
        }
    }

    if (config.isNetwork()) {
        auto extra = [&](std::size_t i, double, const DensityMatrix& rho) {
            if (config.output.wignerTime && i == wignerIdx)
                wignerState = reduce_to_cavity(rho, 1);
        };
        auto traj = run_transfer(config.network, config.pulse, sampleTimes, opts, extra);
        table.header = {"time", "qubitA", "qubitB", "spinsTotal", "cavityA", "cavityB",
                        "antisym", "sink", "control_opticalLeg", "control_qubitLeg"};
        for (std::size_t i = 0; i < traj.times.size(); ++i)
            table.rows.push_back({traj.times[i], traj.qubitA[i], traj.qubitB[i],
                                  traj.spinsTotal[i], traj.cavityA[i], traj.cavityB[i],
                                  traj.antisym[i], traj.sink[i], traj.controlOptical[i], 0.0});
        metrics.peakFidelity = traj.peakFidelity;
        metrics.peakPopulation = traj.peakPopulation;
        metrics.peakTime = traj.peakTime;
        metrics.finalLoss = traj.sink.back();
        if (config.output.svg) {
            auto svg = renderLinePlot(
                to_string(config.kind), timeLabel(config),
                {{"qubit A", &traj.times, &traj.qubitA},
                 {"qubit B", &traj.times, &traj.qubitB},
                 {"antisym cavities", &traj.times, &traj.antisym},
                 {"spins", &traj.times, &traj.spinsTotal},
                 {"sink", &traj.times, &traj.sink}});
            writeTextFile(config.output.directory + "/plot.svg", svg);
        }
    } else {
        const auto groups = sample_ensemble(config.node.ensemble);
        auto extra = [&](std::size_t i, double, const DensityMatrix& rho) {
            if (config.output.wignerTime && i == wignerIdx) wignerState = reduce_to_cavity(rho, 0);
        };
        auto traj = run_swap(config.node, groups, config.pulse, sampleTimes, opts, extra);
        table.header = {"time", "qubitA", "spinsTotal", "cavityA", "sink",
                        "control_opticalLeg", "control_qubitLeg"};
        for (std::size_t i = 0; i < traj.times.size(); ++i)
            table.rows.push_back({traj.times[i], traj.qubit[i], traj.spinsTotal[i], traj.cavity[i],
                                  traj.sink[i], traj.controlOptical[i], traj.controlQubitLeg[i]});
        metrics.peakFidelity = traj.peakFidelity;
        metrics.peakPopulation = traj.peakPopulation;
        metrics.peakTime = traj.peakTime;
        metrics.finalLoss = traj.sink.back();
        if (config.output.svg) {
            auto svg = renderLinePlot(to_string(config.kind), timeLabel(config),
                                      {{"qubit", &traj.times, &traj.qubit},
                                       {"spins", &traj.times, &traj.spinsTotal},
                                       {"cavity |1>", &traj.times, &traj.cavity},
                                       {"sink", &traj.times, &traj.sink},
                                       {"optical leg", &traj.times, &traj.controlOptical},
                                       {"qubit leg", &traj.times, &traj.controlQubitLeg}});
            writeTextFile(config.output.directory + "/plot.svg", svg);
        }
    }

    writeTextFile(config.output.directory + "/timeseries.csv", table.toString());
    if (wignerState) {
        auto field = wigner(*wignerState, config.output.wignerHalfWidth, config.output.wignerPoints);
        CsvTable wt;
        wt.header = {"re_alpha", "im_alpha", "wigner"};
        for (int iy = 0; iy < field.points; ++iy)
            for (int ix = 0; ix < field.points; ++ix)
                wt.rows.push_back({field.axisValue(ix), field.axisValue(iy), field.at(iy, ix)});
        writeTextFile(config.output.directory + "/wigner.csv", wt.toString());
    }

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    writeManifest(config,
                  json{{"peakFidelity", metrics.peakFidelity},
                       {"peakTime", metrics.peakTime},
                       {"peakPopulation", metrics.peakPopulation},
                       {"finalLoss", metrics.finalLoss}},
                  wall);
    return metrics;
}

namespace {

// One sweep cell: rescale couplings to the requested leg peak g and kappa,
// optionally stretching the pulses to preserve area.
ScenarioConfig sweepCellConfig(const ScenarioConfig& base, double kappaOverGamma, double gMHz) {
    ScenarioConfig c = base;
    c.node.kappa = kappaOverGamma * c.node.gamma1Qb;
    const double gDim = gMHz / c.baseRateMHz;
    const double gRef = c.pulse.j1Peak * c.node.ensemble.collectiveCoupling;
    if (gRef <= 0) throw ConfigError("sweep: base config has no qubit-leg coupling");
    const double factor = gDim / gRef;
    c.node.ensemble.collectiveCoupling *= factor;
    c.node.gBarC *= factor;
    if (c.sweep.scaleTauWithG) {
        const double s = 1.0 / factor;
        c.pulse.tauF *= s;
        c.pulse.tauC *= s;
        c.pulse.tauDc *= s;
        c.pulse.tauDf *= s;
        c.integrator.windowStart *= s;
        c.integrator.windowEnd *= s;
    }
    return c;
}

} // namespace

std::vector<SweepCell> run_sweep(const ScenarioConfig& config) {
    if (config.kind != ScenarioKind::Sweep)
        throw ConfigError("run_sweep: scenario is not a sweep");
    const auto start = std::chrono::steady_clock::now();
    std::filesystem::create_directories(config.output.directory);

    std::vector<std::pair<double, double>> cells;
    for (int ik = 0; ik < config.sweep.kappaCount; ++ik)
        for (int ig = 0; ig < config.sweep.gCount; ++ig) {
            const double r = config.sweep.kappaCount == 1
                                 ? config.sweep.kappaOverGammaMin
                                 : config.sweep.kappaOverGammaMin +
                                       (config.sweep.kappaOverGammaMax - config.sweep.kappaOverGammaMin) *
                                           ik / (config.sweep.kappaCount - 1);
            const double g = config.sweep.gCount == 1
                                 ? config.sweep.gMinMHz
                                 : config.sweep.gMinMHz +
                                       (config.sweep.gMaxMHz - config.sweep.gMinMHz) * ig /
                                           (config.sweep.gCount - 1);
            cells.emplace_back(r, g);
        }

    std::vector<SweepCell> results(cells.size());
    const unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            SweepCell cell;
            cell.kappaOverGamma = cells[i].first;
            cell.gMHz = cells[i].second;
            try {
                const auto cc = sweepCellConfig(config, cell.kappaOverGamma, cell.gMHz);
                const auto groups = sample_ensemble(cc.node.ensemble);
                auto traj = run_swap(cc.node, groups, cc.pulse, cc.integrator.sampleTimes(),
                                     cc.integrator.evolveOptions());
                cell.peakFidelity = traj.peakFidelity;
                cell.peakTime = traj.peakTime;
                cell.claimPass = traj.peakFidelity > config.sweep.flagThreshold;
            } catch (const std::exception&) {
                cell.peakFidelity = std::nan("");
                cell.peakTime = std::nan("");
                cell.claimPass = false;
            }
            results[i] = cell;
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    CsvTable table;
    table.header = {"kappaOverGamma", "gMHz", "peakFidelity", "peakTime", "claimPass"};
    double fMin = 1e300, fMax = -1e300;
    bool allPass = true;
    for (const auto& cell : results) {
        table.rows.push_back({cell.kappaOverGamma, cell.gMHz, cell.peakFidelity, cell.peakTime,
                              cell.claimPass ? 1.0 : 0.0});
        fMin = std::min(fMin, cell.peakFidelity);
        fMax = std::max(fMax, cell.peakFidelity);
        allPass = allPass && cell.claimPass;
    }
    writeTextFile(config.output.directory + "/grid.csv", table.toString());

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    writeManifest(config,
                  json{{"minPeakFidelity", fMin},
                       {"maxPeakFidelity", fMax},
                       {"cells", results.size()},
                       {"claimPassAll", allPass}},
                  wall);
    return results;
}

CalibrationResult calibrate_network_pulse(const ScenarioConfig& config) {
    if (config.kind != ScenarioKind::Calibrate)
        throw ConfigError("calibrate_network_pulse: scenario is not calibrate");
    const auto start = std::chrono::steady_clock::now();
    std::filesystem::create_directories(config.output.directory);

    const auto sampleTimes = config.integrator.sampleTimes();
    EvolveOptions coarse = config.integrator.evolveOptions();
    coarse.relTol = config.calibrate.coarseRelTol;

    auto objective = [&](const std::vector<double>& x) {
        PulseSchedule p = config.pulse;
        p.tauC = x[0];
        p.tauDc = x[1];
        p.tauDf = p.tauDc; // qubit leg unused in network mode
        try {
            auto traj = run_transfer(config.network, p, sampleTimes, coarse);
            return -traj.peakFidelity;
        } catch (const std::exception& e) {
            throw IntegrationError(std::string("calibration objective failed at tauC=") +
                                       formatDouble(x[0]) + " tauDc=" + formatDouble(x[1]) +
                                       ": " + e.what(),
                                   0.0);
        }
    };

    NelderMeadOptions opt;
    opt.maxEvals = config.calibrate.maxEvals;
    opt.xTol = 5e-3;
    opt.fTol = 2e-5;
    auto res = nelder_mead_bounded(objective, {config.calibrate.tauCLo, config.calibrate.centerLo},
                                   {config.calibrate.tauCHi, config.calibrate.centerHi}, opt);

    PulseSchedule best = config.pulse;
    best.tauC = res.x[0];
    best.tauDc = res.x[1];
    best.tauDf = best.tauDc;
    auto traj = run_transfer(config.network, best, sampleTimes, config.integrator.evolveOptions());

    CalibrationResult out{res.x[0], res.x[1], traj.peakFidelity, traj.peakTime, res.evals};
    json cal{{"tauC", tagTime(out.tauC)},
             {"tauDc", tagTime(out.tauDc)},
             {"achievedFidelity", out.achievedFidelity},
             {"peakTime", out.peakTime},
             {"evals", out.evals}};
    writeTextFile(config.output.directory + "/calibrated.json", cal.dump(2) + "\n");

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    writeManifest(config,
                  json{{"achievedFidelity", out.achievedFidelity},
                       {"peakTime", out.peakTime},
                       {"tauC", out.tauC},
                       {"tauDc", out.tauDc}},
                  wall);
    return out;
}

} // namespace sim
