#pragma once

#include "sim/network.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <optional>
#include <string>

namespace sim {

enum class ScenarioKind { Swap, SwapConstantChirp, NetworkNv, NetworkEr, Sweep, Calibrate };

std::string to_string(ScenarioKind kind);

struct IntegratorConfig {
    double relTol = 1e-8;
    double absTol = 1e-10;
    int samples = 2001;
    double windowStart = 0.0;
    double windowEnd = 0.0;

    std::vector<double> sampleTimes() const;
    EvolveOptions evolveOptions() const { return {relTol, absTol, false}; }
};

struct SweepConfig {
    double kappaOverGammaMin = 1.0, kappaOverGammaMax = 5.0;
    int kappaCount = 5;
    double gMinMHz = 40.0, gMaxMHz = 105.0;
    int gCount = 5;
    bool scaleTauWithG = true;
    double flagThreshold = 0.81;
};

struct CalibrateConfig {
    double tauCLo = 0.2, tauCHi = 5.0;
    double centerLo = 3.0, centerHi = 9.0;
    int maxEvals = 120;
    double coarseRelTol = 1e-6;
};

struct OutputConfig {
    std::string directory = "out";
    bool svg = false;
    std::optional<double> wignerTime;
    double wignerHalfWidth = 3.0;
    int wignerPoints = 201;
};

struct ScenarioConfig {
    ScenarioKind kind = ScenarioKind::Swap;
    std::string baseRateLabel = "base";
    double baseRateMHz = 1.0;
    NodeParams node;               // single-node scenarios and sweep
    NetworkParams network;         // network scenarios and calibrate
    PulseSchedule pulse;
    double pulseDelayOverTauF = 1.25;
    IntegratorConfig integrator;
    SweepConfig sweep;
    CalibrateConfig calibrate;
    OutputConfig output;
    std::uint64_t seed = 1;

    bool isNetwork() const { return kind == ScenarioKind::NetworkNv || kind == ScenarioKind::NetworkEr; }
};

/// CLI-level overrides, applied before the config is resolved (and therefore
/// captured in the emitted manifest).
struct ConfigOverrides {
    std::optional<std::string> outDir;
    std::optional<std::uint64_t> seed;
    std::optional<double> relTol;
    std::optional<bool> svg;
};

/// Parses and schema-validates a config file (or a previously emitted run
/// manifest, whose resolved config is reused). Unknown keys are rejected.
ScenarioConfig load_config(const std::string& path, const ConfigOverrides& overrides = {});

struct RunMetrics {
    double peakFidelity = 0.0;
    double peakTime = 0.0;
    double peakPopulation = 0.0;
    double finalLoss = 0.0;
};

/// Runs a swap or network scenario: writes timeseries.csv, manifest.json and
/// the optional wigner.csv / plot.svg into the output directory.
RunMetrics run_scenario(const ScenarioConfig& config);

struct SweepCell {
    double kappaOverGamma = 0.0;
    double gMHz = 0.0;
    double peakFidelity = 0.0;
    double peakTime = 0.0;
    bool claimPass = false;
};

/// Runs the (kappa/gamma, g) grid; writes grid.csv and manifest.json.
std::vector<SweepCell> run_sweep(const ScenarioConfig& config);

struct CalibrationResult {
    double tauC = 0.0;
    double tauDc = 0.0;
    double achievedFidelity = 0.0;
    double peakTime = 0.0;
    int evals = 0;
};

/// Derivative-free maximization of the peak transfer fidelity over
/// (tauC, tauDc); writes calibrated.json.
CalibrationResult calibrate_network_pulse(const ScenarioConfig& config);

/// Resolved-config JSON as embedded in the manifest.
nlohmann::json resolved_config_json(const ScenarioConfig& config);

} // namespace sim
