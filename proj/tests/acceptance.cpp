// Acceptance suite: one test case per shipped claim, each printing a
// PASS/FAIL line with the measured values.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sim/analysis.hpp"
#include "sim/io.hpp"
#include "sim/pulses.hpp"
#include "sim/scenario.hpp"
#include "test_helpers.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace sim;

namespace {

std::string configPath(const std::string& name) {
    return std::string(SIM_CONFIG_DIR) + "/" + name;
}

void report(int criterion, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion, detail.c_str());
    std::fflush(stdout);
    CHECK_MESSAGE(pass, "criterion ", criterion, ": ", detail);
}

std::string tempDir(const std::string& tag) {
    auto dir = std::filesystem::path("acceptance_out") / tag;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir.string();
}

SwapTrajectory runSwapConfig(const std::string& name) {
    auto config = load_config(configPath(name));
    const auto groups = sample_ensemble(config.node.ensemble);
    return run_swap(config.node, groups, config.pulse, config.integrator.sampleTimes(),
                    config.integrator.evolveOptions());
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

} // namespace

TEST_CASE("criterion 1: swap fidelity reproduces the tracked-chirp working point") {
    auto traj = runSwapConfig("swap.json");
    std::ostringstream os;
    os << "peak F=" << traj.peakFidelity << " at t=" << traj.peakTime
       << ", population=" << traj.peakPopulation
       << " (target 0.904+-0.02 at 0.036+-0.005, population 0.817+-0.03)";
    const bool pass = std::abs(traj.peakFidelity - 0.904) <= 0.02 &&
                      std::abs(traj.peakTime - 0.036) <= 0.005 &&
                      std::abs(traj.peakPopulation - 0.817) <= 0.03;
    report(1, pass, os.str());
}

TEST_CASE("criterion 2: constant-chirp swap") {
    auto traj = runSwapConfig("swap-constant-chirp.json");
    std::ostringstream os;
    os << "peak F=" << traj.peakFidelity << " at t=" << traj.peakTime
       << " (target 0.897+-0.02 at 0.035+-0.005)";
    const bool pass = std::abs(traj.peakFidelity - 0.897) <= 0.02 &&
                      std::abs(traj.peakTime - 0.035) <= 0.005;
    report(2, pass, os.str());
}

TEST_CASE("criterion 3: sweep region clears the fidelity floor") {
    auto config = load_config(configPath("sweep.json"));
    config.output.directory = tempDir("sweep");
    auto cells = run_sweep(config);
    double fMin = 1.0;
    for (const auto& c : cells) fMin = std::min(fMin, c.peakFidelity);
    std::ostringstream os;
    os << cells.size() << " cells over kappa<=5*gamma, g in [40,105] MHz; min peak F=" << fMin
       << " (floor 0.80)";
    report(3, cells.size() == 25 && fMin > 0.80, os.str());
}

TEST_CASE("criterion 4: NV network transfer") {
    auto config = load_config(configPath("network-nv.json"));
    auto opt = config.integrator.evolveOptions();
    opt.validateSamples = true; // every sampled state must satisfy the invariants
    double minEig = 1.0;
    auto extra = [&](std::size_t i, double, const DensityMatrix& rho) {
        if (i % 50 == 0) minEig = std::min(minEig, rho.minEigenvalue());
    };
    auto traj = run_transfer(config.network, config.pulse, config.integrator.sampleTimes(), opt,
                             extra);
    std::ostringstream os;
    os << "peak F=" << traj.peakFidelity << " at kappa*t=" << traj.peakTime
       << " (target >=0.92 with peak in [7,12]); trajectory min eigenvalue " << minEig;
    const bool pass = traj.peakFidelity >= 0.92 && traj.peakTime >= 7.0 &&
                      traj.peakTime <= 12.0 && minEig > -1e-6;
    report(4, pass, os.str());
}

TEST_CASE("criterion 5: Er network transfer") {
    auto config = load_config(configPath("network-er.json"));
    auto opt = config.integrator.evolveOptions();
    opt.validateSamples = true;
    auto traj = run_transfer(config.network, config.pulse, config.integrator.sampleTimes(), opt);
    std::ostringstream os;
    os << "peak F=" << traj.peakFidelity << ", population=" << traj.peakPopulation
       << " (targets >=0.94 and >=0.89)";
    report(5, traj.peakFidelity >= 0.94 && traj.peakPopulation >= 0.89, os.str());
}

TEST_CASE("criterion 6: STIRAP dark-state suppression") {
    auto traj = runSwapConfig("swap.json");
    double maxSpin = 0.0;
    for (double p : traj.spinsTotal) maxSpin = std::max(maxSpin, p);
    std::ostringstream os;
    os << "max total spin population=" << maxSpin << " (threshold 0.2)";
    report(6, maxSpin < 0.2, os.str());
}

TEST_CASE("criterion 7: effective model agrees with the three-level oracle") {
    // Two-group homogeneous point at dispersion ratio 20 (Delta0 = 20 Omega_c0),
    // constant chirp, sideband frequency high enough that the J0 Stark shift
    // stays inside the agreement budget.
    NodeParams params;
    params.gamma1Qb = 0.5;
    params.kappa = 2.0;
    params.delta0 = params.delta1 = 8000.0;
    params.deltaQ = 900.0;
    params.gBarC = 400.0;
    params.omegaC0 = 400.0;
    params.ensemble.groups = 2;
    params.ensemble.collectiveCoupling = 40.0;
    auto groups = sample_ensemble(params.ensemble);

    PulseSchedule controls;
    controls.j1Peak = 0.5;
    controls.tauF = controls.tauC = 0.1;
    controls.tauDc = 0.25;
    controls.tauDf = 0.375;
    controls.omegaC0 = 400.0;
    controls.chirp = ChirpMode::Constant;

    // omega_mu = deltaQ + Oc0^2/Delta1 = 920 by the resonance conditions; use a
    // deltaQ that puts it at 1600 for a cleaner sideband separation.
    params.deltaQ = 1600.0 - params.omegaC0 * params.omegaC0 / params.delta1;

    std::vector<double> times;
    for (int i = 0; i <= 120; ++i) times.push_back(1.2 * i / 120.0);

    EvolveOptions effOpt{1e-8, 1e-10, false};
    auto effGen = make_swap_generator(params, groups, controls);
    std::vector<double> effQ, effC;
    evolve(effGen, basisState(effGen.basis(), effGen.basis().qubit()), times, effOpt,
           [&](std::size_t, double, const DensityMatrix& rho) {
               effQ.push_back(rho.population(rho.basis.qubit()));
               effC.push_back(rho.population(rho.basis.cavity()));
           });

    EvolveOptions fullOpt{1e-7, 1e-10, false};
    auto fullGen = make_oracle_generator(params, groups, controls);
    std::vector<double> fullQ, fullC;
    evolve(fullGen, basisState(fullGen.basis(), fullGen.basis().qubit()), times, fullOpt,
           [&](std::size_t, double, const DensityMatrix& rho) {
               fullQ.push_back(rho.population(rho.basis.qubit()));
               fullC.push_back(rho.population(rho.basis.cavity()));
           });

    double worst = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        worst = std::max(worst, std::abs(effQ[i] - fullQ[i]));
        worst = std::max(worst, std::abs(effC[i] - fullC[i]));
    }
    std::ostringstream os;
    os << "max |population difference|=" << worst << " over the swap window (budget 0.05)";
    report(7, worst < 0.05, os.str());
}

TEST_CASE("criterion 8: property suites") {
    bool allPass = true;
    auto sub = [&](bool pass, const std::string& what) {
        std::printf("  [%s] %s\n", pass ? "ok" : "FAIL", what.c_str());
        std::fflush(stdout);
        allPass = allPass && pass;
        CHECK_MESSAGE(pass, what);
    };

    // Instantaneous trace and Hermiticity preservation on random generators.
    {
        std::mt19937_64 rng(123);
        OesBasis basis(1, 3);
        double worstTrace = 0.0, worstHerm = 0.0;
        for (int trial = 0; trial < 1000; ++trial) {
            TimeDependentHamiltonian h(basis);
            h.constant() = test::randomHermitian(basis.dimension(), rng);
            std::vector<CollapseChannel> channels;
            channels.emplace_back(transition(basis, 0, basis.qubit()), 0.3 + 0.001 * trial);
            channels.emplace_back(projector(basis, basis.spin(1)), 0.5);
            Generator g(std::move(h), std::move(channels));
            auto rho = test::randomDensity(basis, rng);
            Matrix d = apply_generator(g, 0.0, rho);
            worstTrace = std::max(worstTrace, std::abs(Complex(d.trace())));
            worstHerm = std::max(worstHerm, hermitianDefect(d));
        }
        sub(worstTrace < 1e-10, "instantaneous trace preservation < 1e-10 (worst " +
                                    formatDouble(worstTrace) + ")");
        sub(worstHerm < 1e-10,
            "derivative Hermiticity < 1e-10 (worst " + formatDouble(worstHerm) + ")");
    }

    // Swap scenario: end-to-end trace drift, positivity, bookkeeping.
    {
        auto config = load_config(configPath("swap.json"));
        const auto groups = sample_ensemble(config.node.ensemble);
        double minEig = 1.0;
        int eigStride = 0;
        auto extra = [&](std::size_t i, double, const DensityMatrix& rho) {
            if (static_cast<int>(i) % 50 == 0 || i + 1 == 2001) {
                minEig = std::min(minEig, rho.minEigenvalue());
                ++eigStride;
            }
        };
        auto traj = run_swap(config.node, groups, config.pulse, config.integrator.sampleTimes(),
                             config.integrator.evolveOptions(), extra);
        const double drift = std::abs(traj.finalState.trace() - 1.0);
        sub(drift < 1e-6, "end-to-end trace drift < 1e-6 (swap run: " + formatDouble(drift) + ")");
        sub(minEig > -1e-6,
            "positivity along the swap trajectory (min eigenvalue " + formatDouble(minEig) + ")");
        double worstSum = 0.0;
        for (std::size_t i = 0; i < traj.times.size(); ++i) {
            const double total = traj.qubit[i] + traj.spinsTotal[i] + traj.cavity[i] + traj.sink[i];
            worstSum = std::max(worstSum, std::abs(total - 1.0));
        }
        sub(worstSum < 1e-6,
            "excitation bookkeeping sums to 1 (worst deviation " + formatDouble(worstSum) + ")");
    }

    // Chiral term tracelessness.
    {
        std::mt19937_64 rng(321);
        OesBasis basis(2, 3);
        double worst = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            DensityMatrix rho(basis, test::randomHermitian(basis.dimension(), rng));
            worst = std::max(worst,
                             std::abs(Complex(build_chiral_term({0.9, 1.2}, rho).trace())));
        }
        sub(worst < 1e-14, "L_Net tracelessness < 1e-14 (worst " + formatDouble(worst) + ")");
    }

    // Unidirectionality on the NV scenario: node-B drive does not touch node A.
    {
        auto config = load_config(configPath("network-nv.json"));
        auto perturbed = config.pulse;
        perturbed.omegaC0 *= 1.25;
        EvolveOptions tight{1e-9, 1e-12, false};
        std::vector<double> times;
        for (int i = 0; i <= 40; ++i) times.push_back(12.0 * i / 40.0);
        auto gen1 = build_network_generator(config.network, config.pulse, config.pulse);
        auto gen2 = build_network_generator(config.network, config.pulse, perturbed);
        const OesBasis& basis = gen1.basis();
        std::vector<double> a, b;
        auto grab = [&basis](std::vector<double>& v) {
            return [&v, &basis](std::size_t, double, const DensityMatrix& rho) {
                v.push_back(rho.population(basis.qubit(0)));
                v.push_back(rho.population(basis.cavity(0)));
            };
        };
        evolve(gen1, basisState(basis, basis.qubit(0)), times, tight, grab(a));
        evolve(gen2, basisState(basis, basis.qubit(0)), times, tight, grab(b));
        double worst = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
        sub(worst < 1e-8,
            "unidirectionality: node-A observables shift < 1e-8 (worst " + formatDouble(worst) + ")");
    }

    // Closed-form oracles.
    {
        OesBasis basis(1, 1);
        const int q = basis.qubit();
        const double g0 = 3.0;
        TimeDependentHamiltonian h(basis);
        h.constant()(0, q) = 0.5 * g0;
        h.constant()(q, 0) = 0.5 * g0;
        Generator rabi(std::move(h), {});
        double worst = 0.0;
        evolve(rabi, basisState(basis, q), {0.0, 0.4, 0.9, M_PI / g0}, {},
               [&](std::size_t, double t, const DensityMatrix& rho) {
                   const double c = std::cos(0.5 * g0 * t);
                   worst = std::max(worst, std::abs(rho.population(q) - c * c));
               });
        Generator decay(TimeDependentHamiltonian(basis),
                        {CollapseChannel(transition(basis, 0, q), 1.3)});
        evolve(decay, basisState(basis, q), {0.0, 0.5, 1.5}, {},
               [&](std::size_t, double t, const DensityMatrix& rho) {
                   worst = std::max(worst, std::abs(rho.population(q) - std::exp(-1.3 * t)));
               });
        sub(worst < 1e-6, "Rabi and decay closed forms within 1e-6 (worst " + formatDouble(worst) + ")");
    }

    // J1 accuracy against the standard library implementation.
    {
        double worst = 0.0;
        for (double x = 0.0; x <= 20.0; x += 0.005)
            worst = std::max(worst, std::abs(bessel_j1(x) - std::cyl_bessel_j(1.0, x)));
        sub(worst < 1e-10, "J1 accuracy < 1e-10 on [0, 20] (worst " + formatDouble(worst) + ")");
    }

    // Wigner normalization.
    {
        CavityState cav;
        cav.m << 0.4, Complex(0.2, 0.1), Complex(0.2, -0.1), 0.6;
        auto field = wigner(cav, 4.0, 201);
        double sum = 0.0;
        for (double v : field.values) sum += v;
        const double norm = sum * field.cellArea();
        sub(std::abs(norm - 1.0) < 0.02, "Wigner grid normalization within 2% (" + formatDouble(norm) + ")");
    }

    // Determinism: byte-identical reruns of the full scenario pipeline.
    {
        auto config = load_config(configPath("swap.json"));
        config.integrator.relTol = 1e-6;
        config.integrator.absTol = 1e-9;
        config.integrator.samples = 501;
        config.output.wignerTime.reset();
        config.output.directory = tempDir("det1");
        run_scenario(config);
        auto config2 = config;
        config2.output.directory = tempDir("det2");
        run_scenario(config2);
        const bool same = slurp(config.output.directory + "/timeseries.csv") ==
                          slurp(config2.output.directory + "/timeseries.csv");
        sub(same, "identical config and seed give byte-identical CSV output");
    }

    // Integrator order: halving relTol barely moves the final state. A sparse
    // sample grid keeps the adaptive controller (not sample clamping) in
    // charge of the step size.
    {
        auto config = load_config(configPath("swap.json"));
        const auto groups = sample_ensemble(config.node.ensemble);
        std::vector<double> sparse;
        for (int i = 0; i <= 24; ++i) sparse.push_back(0.096 * i / 24.0);
        EvolveOptions a{1e-6, 1e-12, false};
        EvolveOptions b{5e-7, 1e-12, false};
        auto ta = run_swap(config.node, groups, config.pulse, sparse, a);
        auto tb = run_swap(config.node, groups, config.pulse, sparse, b);
        const double diff = maxAbsDiff(ta.finalState.m, tb.finalState.m);
        sub(diff != 0.0 && diff < 10.0 * 1e-6,
            "halving relTol moves the final state by < 10*relTol (" + formatDouble(diff) + ")");
    }

    report(8, allPass, "property suites (details above)");
}
