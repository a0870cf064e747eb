#include "sim/io.hpp"
#include "sim/scenario.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <exception>

namespace {

int dispatch(const std::string& command, const std::string& configPath,
             const sim::ConfigOverrides& overrides) {
    auto config = sim::load_config(configPath, overrides);
    const auto& node = config.isNetwork() || config.kind == sim::ScenarioKind::Calibrate
                           ? config.network.nodeA
                           : config.node;
    for (const auto& w : node.warnings()) std::fprintf(stderr, "warning: %s\n", w.c_str());
    if (command == "run") {
        auto metrics = sim::run_scenario(config);
        std::printf("%s: peak fidelity %.4f at %s*t = %.4f (population %.4f, final loss %.4f)\n",
                    sim::to_string(config.kind).c_str(), metrics.peakFidelity,
                    config.baseRateLabel.c_str(), metrics.peakTime, metrics.peakPopulation,
                    metrics.finalLoss);
    } else if (command == "sweep") {
        auto cells = sim::run_sweep(config);
        double fMin = 1e300;
        bool allPass = true;
        for (const auto& c : cells) {
            fMin = std::min(fMin, c.peakFidelity);
            allPass = allPass && c.claimPass;
        }
        std::printf("sweep: %zu cells, min peak fidelity %.4f, claim %s\n", cells.size(), fMin,
                    allPass ? "pass" : "FAIL");
    } else {
        auto result = sim::calibrate_network_pulse(config);
        std::printf("calibrate: tauC=%s tauDc=%s fidelity %.4f at t=%.3f (%d evals)\n",
                    sim::formatDouble(result.tauC).c_str(),
                    sim::formatDouble(result.tauDc).c_str(), result.achievedFidelity,
                    result.peakTime, result.evals);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Flux qubit / spin ensemble / optical cavity interface simulator"};
    app.require_subcommand(1);

    std::string configPath;
    sim::ConfigOverrides overrides;
    std::string outDir;
    std::uint64_t seed = 0;
    double relTol = 0.0;
    bool svg = false;

    auto addCommon = [&](CLI::App* cmd) {
        cmd->add_option("config", configPath, "scenario config file (JSON)")->required();
        cmd->add_option("--out", outDir, "output directory override");
        cmd->add_option("--seed", seed, "seed override");
        cmd->add_option("--tol", relTol, "relative tolerance override");
        cmd->add_flag("--svg", svg, "emit an SVG line plot");
    };
    addCommon(app.add_subcommand("run", "run a swap or network scenario"));
    addCommon(app.add_subcommand("sweep", "run the (kappa, g) fidelity sweep"));
    addCommon(app.add_subcommand("calibrate", "calibrate the network pulse"));

    CLI11_PARSE(app, argc, argv);

    const std::string command = app.get_subcommands().front()->get_name();
    if (app.get_subcommands().front()->count("--out")) overrides.outDir = outDir;
    if (app.get_subcommands().front()->count("--seed")) overrides.seed = seed;
    if (app.get_subcommands().front()->count("--tol")) overrides.relTol = relTol;
    if (svg) overrides.svg = true;

    try {
        return dispatch(command, configPath, overrides);
    } catch (const sim::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const sim::IntegrationError& e) {
        std::fprintf(stderr, "integration error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
