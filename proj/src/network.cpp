#include "sim/network.hpp"

#include "sim/analysis.hpp"

#include <cmath>

namespace sim {

void NetworkParams::validate() const {
    nodeA.validate();
    nodeB.validate();
    if (nodeA.ensemble.groups != nodeB.ensemble.groups)
        throw ConfigError("NetworkParams: nodes must share the group count");
    if (dispersiveDetuning == 0.0)
        throw ConfigError("NetworkParams: dispersive detuning must be nonzero");
    const auto l = link();
    if (l.kappaExA > nodeA.kappa + 1e-12 || l.kappaExB > nodeB.kappa + 1e-12)
        throw ConfigError("NetworkParams: kappa_ex may not exceed kappa");
}

namespace {

// Adds one node's dispersive Hamiltonian. Omega_mu = 0 in network mode, so the
// magnetic coupling is the bare static g_f,j; the optical leg is modulated by
// Omega_c(t). Tracking chirp cancels the second-order Stark mismatch
// (g_f^2 - Lambda(t)^2)/dispersiveDetuning between qubit and cavity.
void addNode(TimeDependentHamiltonian& h, const OesBasis& basis, int node,
             const NodeParams& params, const std::vector<SpinGroup>& groups,
             const PulseSchedule& controls, double dispersiveDetuning) {
    Matrix& c = h.constant();
    const int q = basis.qubit(node);
    const double gf = params.ensemble.collectiveCoupling;
    const double lamUnit = cavity_leg_unit_coupling(params, groups);

    double chirp0 = 0.0, chirp2 = 0.0; // phiDot(t) = chirp0 + chirp2 * Oc(t)^2
    switch (controls.chirp) {
        case ChirpMode::Tracking:
            chirp0 = gf * gf / dispersiveDetuning;
            chirp2 = -lamUnit * lamUnit / dispersiveDetuning;
            break;
        case ChirpMode::Constant:
            chirp0 = (gf * gf - lamUnit * lamUnit * params.omegaC0 * params.omegaC0) /
                     dispersiveDetuning;
            break;
        case ChirpMode::Zero:
            break;
    }

    c(q, q) = chirp0;
    Matrix mc = Matrix::Zero(basis.dimension(), basis.dimension());
    Matrix ms2 = Matrix::Zero(basis.dimension(), basis.dimension());
    Matrix mchirp = Matrix::Zero(basis.dimension(), basis.dimension());
    mchirp(q, q) = 1.0;
    for (int j = 0; j < params.ensemble.groups; ++j) {
        const auto& g = groups[j];
        const int s = basis.spin(j, node);
        c(s, s) = dispersiveDetuning + g.deltaGround + chirp0;
        mchirp(s, s) = 1.0;
        const double starkDen = params.delta1 + g.deltaOptical - g.deltaGround;
        ms2(s, s) = 1.0 / starkDen;

        c(s, q) = -g.magneticCoupling;
        c(q, s) = -g.magneticCoupling;

        const double lamJ = 0.5 * params.gBarC * g.xi * std::sqrt(g.weight) *
                            (1.0 / (params.delta0 + g.deltaOptical) + 1.0 / starkDen);
        const Complex leg = -lamJ * std::exp(Complex(0.0, g.theta));
        mc(basis.cavity(node), s) = leg;
        mc(s, basis.cavity(node)) = std::conj(leg);
    }

    h.addTerm([controls](double t) { return Complex(controls.opticalDrive(t), 0.0); },
              std::move(mc));
    auto oc2 = [controls](double t) {
        const double oc = controls.opticalDrive(t);
        return oc * oc;
    };
    h.addTerm([oc2](double t) { return Complex(oc2(t), 0.0); }, std::move(ms2));
    if (chirp2 != 0.0)
        h.addTerm([oc2, chirp2](double t) { return Complex(chirp2 * oc2(t), 0.0); },
                  std::move(mchirp));
}

} // namespace

Generator build_network_generator(const NetworkParams& params, const PulseSchedule& controlsA,
                                  const PulseSchedule& controlsB) {
    params.validate();
    controlsA.validate();
    controlsB.validate();
    const OesBasis basis(2, params.nodeA.ensemble.groups);
    TimeDependentHamiltonian h(basis);

    const auto groupsA = sample_ensemble(params.nodeA.ensemble);
    const auto groupsB = sample_ensemble(params.nodeB.ensemble);
    addNode(h, basis, 0, params.nodeA, groupsA, controlsA, params.dispersiveDetuning);
    addNode(h, basis, 1, params.nodeB, groupsB, controlsB, params.dispersiveDetuning);

    auto channels = build_collapse_channels(params.nodeA, groupsA, basis, 0);
    auto chB = build_collapse_channels(params.nodeB, groupsB, basis, 1);
    channels.insert(channels.end(), std::make_move_iterator(chB.begin()),
                    std::make_move_iterator(chB.end()));
    return Generator(std::move(h), std::move(channels), params.link());
}

NetworkTrajectory run_transfer(const NetworkParams& params, const PulseSchedule& schedule,
                               const std::vector<double>& sampleTimes, const EvolveOptions& opt,
                               const SampleObserver& extra) {
    auto gen = build_network_generator(params, schedule, schedule);
    const OesBasis& basis = gen.basis();
    const double lamUnit = cavity_leg_unit_coupling(params.nodeA,
                                                    sample_ensemble(params.nodeA.ensemble));

    NetworkTrajectory traj{{}, {}, {}, {}, {}, {}, {}, {}, {}, 0.0, 0.0, 0.0,
                           basisState(basis, basis.qubit(0))};
    traj.times = sampleTimes;
    const std::size_t n = sampleTimes.size();
    for (auto* v : {&traj.qubitA, &traj.qubitB, &traj.cavityA, &traj.cavityB, &traj.spinsTotal,
                    &traj.antisym, &traj.sink, &traj.controlOptical})
        v->resize(n);

    auto observer = [&](std::size_t i, double t, const DensityMatrix& rho) {
        traj.qubitA[i] = rho.population(basis.qubit(0));
        traj.qubitB[i] = rho.population(basis.qubit(1));
        traj.cavityA[i] = rho.population(basis.cavity(0));
        traj.cavityB[i] = rho.population(basis.cavity(1));
        traj.spinsTotal[i] = total_spin_population(rho);
        traj.antisym[i] = antisymmetric_mode_population(rho);
        traj.sink[i] = rho.population(basis.groundSink());
        traj.controlOptical[i] = lamUnit * schedule.opticalDrive(t);
        if (extra) extra(i, t, rho);
    };

    auto rho0 = basisState(basis, basis.qubit(0));
    auto result = evolve(gen, rho0, sampleTimes, opt, observer);
    traj.finalState = result.finalState;

    for (std::size_t i = 0; i < n; ++i) {
        if (traj.qubitB[i] > traj.peakPopulation) {
            traj.peakPopulation = traj.qubitB[i];
            traj.peakTime = sampleTimes[i];
        }
    }
    traj.peakFidelity = std::sqrt(std::max(traj.peakPopulation, 0.0));
    return traj;
}

} // namespace sim
