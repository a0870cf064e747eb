#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sim/io.hpp"
#include "sim/optimize.hpp"
#include "sim/scenario.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace sim;
using nlohmann::json;

namespace {

std::string configPath(const std::string& name) {
    return std::string(SIM_CONFIG_DIR) + "/" + name;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string tempDir(const std::string& tag) {
    auto dir = std::filesystem::path("scenario_test_out") / tag;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir.string();
}

json swapJson() {
    return json::parse(slurp(configPath("swap.json")));
}

void writeJson(const std::string& path, const json& j) {
    std::ofstream out(path);
    out << j.dump(2);
}

ScenarioConfig loadFromJson(const json& j, const std::string& tag) {
    const std::string path = tempDir(tag) + "/config.json";
    writeJson(path, j);
    return load_config(path);
}

} // namespace

TEST_CASE("config parsing and unit conversion") {
    auto config = load_config(configPath("swap.json"));
    CHECK(config.kind == ScenarioKind::Swap);
    CHECK(config.baseRateMHz == 0.4);
    // MHz-angular values become base-rate ratios
    CHECK(config.node.gamma1Qb == doctest::Approx(1.0));
    CHECK(config.node.kappa == doctest::Approx(7.5));
    CHECK(config.node.gamma2StarEn == doctest::Approx(2.25));
    CHECK(config.node.ensemble.sigmaDelta == doctest::Approx(36.0));
    CHECK(config.node.ensemble.collectiveCoupling == doctest::Approx(105.0 / 0.58 / 0.4));
    CHECK(config.pulse.tauF == doctest::Approx(0.008));
    CHECK(config.pulse.tauDf - config.pulse.tauDc == doctest::Approx(1.25 * 0.008));
    CHECK(config.integrator.windowEnd == doctest::Approx(0.096));
    CHECK(config.output.wignerTime.has_value());

    SUBCASE("ns times convert with the angular factor") {
        auto j = swapJson();
        j["pulse"]["tauF"] = {{"value", 3.0}, {"unit", "ns"}};
        auto c = loadFromJson(j, "ns");
        CHECK(c.pulse.tauF == doctest::Approx(3.0e-3 * 2.0 * M_PI * 0.4));
    }
}

TEST_CASE("schema violations carry field paths") {
    SUBCASE("unknown key") {
        auto j = swapJson();
        j["node"]["unknownKnob"] = 1.0;
        try {
            loadFromJson(j, "unknown");
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("/node/unknownKnob") != std::string::npos);
        }
    }
    SUBCASE("bad unit tag") {
        auto j = swapJson();
        j["node"]["kappa"] = {{"value", 3.0}, {"unit", "GHz"}};
        CHECK_THROWS_AS(loadFromJson(j, "badunit"), ConfigError);
    }
    SUBCASE("missing block") {
        auto j = swapJson();
        j.erase("pulse");
        CHECK_THROWS_AS(loadFromJson(j, "missing"), ConfigError);
    }
    SUBCASE("unreadable file") {
        CHECK_THROWS_AS(load_config("does-not-exist.json"), ConfigError);
    }
    SUBCASE("malformed json") {
        const std::string path = tempDir("garbage") + "/bad.json";
        writeTextFile(path, "{ not json");
        CHECK_THROWS_AS(load_config(path), ConfigError);
    }
    SUBCASE("constant-chirp scenario rejects a tracking chirp") {
        auto j = swapJson();
        j["scenario"] = "swap-constant-chirp";
        j["pulse"]["chirp"] = "tracking";
        CHECK_THROWS_AS(loadFromJson(j, "chirpclash"), ConfigError);
    }
}

TEST_CASE("scenario run outputs") {
    auto j = swapJson();
    j["integrator"]["relTol"] = 1e-6;
    j["integrator"]["absTol"] = 1e-9;
    j["integrator"]["samples"] = 301;
    j["output"].erase("wignerTime");
    j["output"]["directory"] = tempDir("runA");
    auto config = loadFromJson(j, "cfgA");

    auto metrics = run_scenario(config);
    CHECK(metrics.peakFidelity > 0.85);

    SUBCASE("csv rows satisfy the excitation bookkeeping") {
        std::ifstream in(config.output.directory + "/timeseries.csv");
        REQUIRE(in);
        std::string line;
        std::getline(in, line);
        CHECK(line == "time,qubitA,spinsTotal,cavityA,sink,control_opticalLeg,control_qubitLeg");
        int rows = 0;
        while (std::getline(in, line)) {
            std::vector<double> vals;
            std::istringstream is(line);
            std::string field;
            while (std::getline(is, field, ',')) vals.push_back(std::stod(field));
            REQUIRE(vals.size() == 7);
            CHECK(std::abs(vals[1] + vals[2] + vals[3] + vals[4] - 1.0) < 1e-6);
            ++rows;
        }
        CHECK(rows == 301);
    }

    SUBCASE("reruns are byte-identical") {
        const std::string first = slurp(config.output.directory + "/timeseries.csv");
        auto config2 = config;
        config2.output.directory = tempDir("runB");
        run_scenario(config2);
        CHECK(first == slurp(config2.output.directory + "/timeseries.csv"));
    }

    SUBCASE("manifest reruns reproduce the metrics exactly") {
        auto manifest = json::parse(slurp(config.output.directory + "/manifest.json"));
        CHECK(manifest["metrics"]["peakFidelity"].get<double>() == metrics.peakFidelity);
        auto config2 = load_config(config.output.directory + "/manifest.json");
        config2.output.directory = tempDir("runC");
        auto metrics2 = run_scenario(config2);
        CHECK(metrics2.peakFidelity == metrics.peakFidelity);
        CHECK(metrics2.peakTime == metrics.peakTime);
        CHECK(metrics2.finalLoss == metrics.finalLoss);
    }

    SUBCASE("svg and wigner emission") {
        auto config2 = config;
        config2.output.directory = tempDir("runD");
        config2.output.svg = true;
        config2.output.wignerTime = 0.036;
        config2.output.wignerPoints = 41;
        run_scenario(config2);
        const std::string svg = slurp(config2.output.directory + "/plot.svg");
        CHECK(svg.find("<svg") == 0);
        CHECK(svg.find("polyline") != std::string::npos);
        const std::string wig = slurp(config2.output.directory + "/wigner.csv");
        CHECK(wig.rfind("re_alpha,im_alpha,wigner", 0) == 0);
    }
}

TEST_CASE("sweep consistency and structure") {
    auto j = swapJson();
    j["scenario"] = "sweep";
    j["integrator"]["relTol"] = 1e-6;
    j["integrator"]["absTol"] = 1e-9;
    j["integrator"]["samples"] = 301;
    j["output"].erase("wignerTime");

    SUBCASE("single cell at the swap point matches run_scenario") {
        auto js = j;
        js["sweep"] = {{"kappaOverGamma", {{"min", 7.5}, {"max", 7.5}, {"count", 1}}},
                       {"gMHz", {{"min", 105.0}, {"max", 105.0}, {"count", 1}}},
                       {"scaleTauWithG", true},
                       {"flagThreshold", 0.81}};
        js["output"]["directory"] = tempDir("sweep1");
        auto config = loadFromJson(js, "sweep1cfg");
        auto cells = run_sweep(config);
        REQUIRE(cells.size() == 1);

        auto jr = swapJson();
        jr["integrator"] = js["integrator"];
        jr["output"] = {{"directory", tempDir("sweep1ref")}};
        auto ref = run_scenario(loadFromJson(jr, "sweep1refcfg"));
        CHECK(cells[0].peakFidelity == doctest::Approx(ref.peakFidelity).epsilon(1e-12));
        CHECK(std::filesystem::exists(config.output.directory + "/grid.csv"));
    }

    SUBCASE("fidelity collapses monotonically as g goes to zero") {
        auto js = j;
        js["sweep"] = {{"kappaOverGamma", {{"min", 3.0}, {"max", 3.0}, {"count", 1}}},
                       {"gMHz", {{"min", 2.0}, {"max", 40.0}, {"count", 3}}},
                       {"scaleTauWithG", false},
                       {"flagThreshold", 0.81}};
        js["integrator"]["relTol"] = 1e-5;
        js["integrator"]["absTol"] = 1e-8;
        js["output"]["directory"] = tempDir("sweepg");
        auto cells = run_sweep(loadFromJson(js, "sweepgcfg"));
        REQUIRE(cells.size() == 3);
        CHECK(cells[0].peakFidelity < cells[1].peakFidelity);
        CHECK(cells[1].peakFidelity < cells[2].peakFidelity);
        CHECK(cells[0].peakFidelity < 0.1);
    }
}

TEST_CASE("nelder-mead optimizer") {
    SUBCASE("quadratic bowl inside the box") {
        auto f = [](const std::vector<double>& x) {
            return (x[0] - 0.3) * (x[0] - 0.3) + 2.0 * (x[1] + 0.2) * (x[1] + 0.2);
        };
        NelderMeadOptions opt;
        opt.maxEvals = 300;
        opt.xTol = 1e-7;
        opt.fTol = 1e-14;
        auto r = nelder_mead_bounded(f, {-1.0, -1.0}, {1.0, 1.0}, opt);
        CHECK(r.x[0] == doctest::Approx(0.3).epsilon(1e-3));
        CHECK(r.x[1] == doctest::Approx(-0.2).epsilon(1e-3));
    }
    SUBCASE("minimum on the boundary stays in the box") {
        auto f = [](const std::vector<double>& x) { return -x[0]; };
        auto r = nelder_mead_bounded(f, {0.0}, {2.0}, {});
        CHECK(r.x[0] == doctest::Approx(2.0).epsilon(1e-6));
    }
    SUBCASE("degenerate bounds return the single point") {
        int evals = 0;
        auto f = [&](const std::vector<double>& x) {
            ++evals;
            return x[0] * x[0];
        };
        auto r = nelder_mead_bounded(f, {1.5, 2.0}, {1.5, 2.0}, {});
        CHECK(r.x[0] == 1.5);
        CHECK(r.x[1] == 2.0);
        CHECK(evals == 1);
        CHECK(r.evals == 1);
    }
}

TEST_CASE("calibrate with degenerate bounds returns the evaluated point") {
    // Tiny two-group network so the objective is cheap.
    json j{{"scenario", "calibrate"},
           {"baseRate", {{"label", "kappa"}, {"valueMHz", 10.0}}},
           {"seed", 1},
           {"network",
            {{"node",
              {{"gamma1Qb", {{"value", 0.02}, {"unit", "MHz-angular"}}},
               {"kappa", {{"value", 10.0}, {"unit", "MHz-angular"}}},
               {"extraction", 1.0},
               {"delta0", {{"value", 40000.0}, {"unit", "MHz-angular"}}},
               {"delta1", {{"value", 40000.0}, {"unit", "MHz-angular"}}},
               {"gBarC", {{"value", 2000.0}, {"unit", "MHz-angular"}}},
               {"omegaC0", {{"value", 2000.0}, {"unit", "MHz-angular"}}},
               {"ensemble",
                {{"groups", 2},
                 {"collectiveCoupling", {{"value", 100.0}, {"unit", "MHz-angular"}}}}}}},
             {"dispersiveDetuning", {{"value", 2000.0}, {"unit", "MHz-angular"}}}}},
           {"pulse", {{"shape", "sech"}, {"j1Peak", 0.0}, {"tauC", 1.0}, {"tauDc", 4.0}, {"chirp", "tracking"}}},
           {"integrator",
            {{"relTol", 1e-5}, {"absTol", 1e-8}, {"samples", 141},
             {"window", {{"end", 14.0}}}}},
           {"calibrate",
            {{"tauC", {{"min", 2.2}, {"max", 2.2}}},
             {"center", {{"min", 4.8}, {"max", 4.8}}},
             {"maxEvals", 40},
             {"coarseRelTol", 1e-5}}},
           {"output", {{"directory", tempDir("cal")}}}};
    auto config = loadFromJson(j, "calcfg");
    auto result = calibrate_network_pulse(config);
    CHECK(result.tauC == 2.2);
    CHECK(result.tauDc == 4.8);
    CHECK(result.evals == 1);
    CHECK(result.achievedFidelity > 0.5);
    CHECK(std::filesystem::exists(config.output.directory + "/calibrated.json"));
}

TEST_CASE("cli exit codes") {
    const std::string cli = SIM_CLI_PATH;
    auto runCli = [&](const std::string& args) {
        const int ret = std::system((cli + " " + args + " > /dev/null 2>&1").c_str());
        return WEXITSTATUS(ret);
    };
    CHECK(runCli("run does-not-exist.json") == 2);
    const std::string bad = tempDir("cli") + "/bad.json";
    writeTextFile(bad, "{\"scenario\": \"nope\"}");
    CHECK(runCli("run " + bad) == 2);
}
