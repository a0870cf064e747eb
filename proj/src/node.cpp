#include "sim/node.hpp"

#include "sim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sim {

void NodeParams::validate() const {
    ensemble.validate();
    if (gamma1Qb < 0 || gamma2StarQb < 0 || kappa < 0 || gamma1En < 0 || gamma2StarEn < 0 ||
        gamma0Opt < 0 || gamma1Opt < 0)
        throw ConfigError("NodeParams: rates must be nonnegative");
    if (extraction < 0 || extraction > 1)
        throw ConfigError("NodeParams: extraction fraction must lie in [0, 1]");
    if (gBarC < 0 || omegaC0 < 0)
        throw ConfigError("NodeParams: couplings must be nonnegative");
}

std::vector<std::string> NodeParams::warnings() const {
    std::vector<std::string> out;
    const double linewidth = std::max({gamma1Qb, gamma2StarQb, kappa, gamma1En, gamma2StarEn,
                                       gamma0Opt, gamma1Opt});
    const double detuning = std::min(std::abs(delta0), std::abs(delta1));
    if (linewidth > 0 && detuning < 10.0 * linewidth) {
        std::ostringstream os;
        os << "dispersive ratio " << detuning / linewidth
           << " below 10; the effective model may be inaccurate";
        out.push_back(os.str());
    }
    return out;
}

namespace {

void checkDenominators(const NodeParams& p, const SpinGroup& g) {
    const double scale = std::max(1.0, std::abs(p.delta0));
    if (std::abs(p.delta0 + g.deltaOptical) < 1e-12 * scale)
        throw SingularDetuningError("node: Delta0 + Delta_j is singular");
    if (std::abs(p.delta1 + g.deltaOptical - g.deltaGround) < 1e-12 * scale)
        throw SingularDetuningError("node: Delta1 + Delta_j - delta_j is singular");
}

double opticalCoupling(const NodeParams& p, const SpinGroup& g) {
    return p.gBarC * g.xi * std::sqrt(g.weight);
}

// Per-unit-drive Raman coupling of one group:
// Lambda_j / Omega_c = (g_c,j / 2)(1/(Delta0+Delta_j) + 1/(Delta1+Delta_j-delta_j)).
double ramanUnitCoupling(const NodeParams& p, const SpinGroup& g) {
    checkDenominators(p, g);
    return 0.5 * opticalCoupling(p, g) *
           (1.0 / (p.delta0 + g.deltaOptical) +
            1.0 / (p.delta1 + g.deltaOptical - g.deltaGround));
}

} // namespace

double ensemble_stark_shift(const NodeParams& params, const std::vector<SpinGroup>& groups) {
    double sum = 0.0;
    for (const auto& g : groups) {
        checkDenominators(params, g);
        const double gc = opticalCoupling(params, g);
        sum += gc * gc / (params.delta0 + g.deltaOptical);
    }
    return sum;
}

double cavity_leg_unit_coupling(const NodeParams& params, const std::vector<SpinGroup>& groups) {
    double sum = 0.0;
    for (const auto& g : groups) {
        const double lam = ramanUnitCoupling(params, g);
        sum += lam * lam;
    }
    return std::sqrt(sum);
}

TimeDependentHamiltonian build_effective_hamiltonian_td(const NodeParams& params,
                                                        const std::vector<SpinGroup>& groups,
                                                        const PulseSchedule& controls) {
    params.validate();
    controls.validate();
    if (static_cast<int>(groups.size()) != params.ensemble.groups)
        throw ConfigError("node: group list does not match ensemble spec");
    const OesBasis basis(1, params.ensemble.groups);
    TimeDependentHamiltonian h(basis);

    const double deltaEn = ensemble_stark_shift(params, groups);
    const double gap10 = params.delta1 - params.delta0;

    // Chirp phiDot(t) = pc0 + pc2 * OmegaC(t)^2; the sideband frequency tracks
    // the same drive so the qubit diagonal is constant in every mode.
    double pc0 = 0.0, pc2 = 0.0;
    double qubitDiag = 0.0;
    switch (controls.chirp) {
        case ChirpMode::Tracking:
            pc0 = gap10 - deltaEn;
            pc2 = 1.0 / params.delta1;
            qubitDiag = -deltaEn;
            break;
        case ChirpMode::Constant:
            pc0 = gap10 + params.omegaC0 * params.omegaC0 / params.delta1 - deltaEn;
            qubitDiag = -deltaEn;
            break;
        case ChirpMode::Zero:
            qubitDiag = -gap10;
            break;
    }
    if (controls.chirp != ChirpMode::Zero && params.delta1 == 0.0)
        throw SingularDetuningError("node: Delta1 = 0 with Stark-tracking chirp");

    Matrix& c = h.constant();
    c(basis.qubit(), basis.qubit()) = qubitDiag;
    c(basis.cavity(), basis.cavity()) = -deltaEn;

    Matrix mf = Matrix::Zero(basis.dimension(), basis.dimension());
    Matrix mc = Matrix::Zero(basis.dimension(), basis.dimension());
    Matrix ms2 = Matrix::Zero(basis.dimension(), basis.dimension());
    for (int j = 0; j < params.ensemble.groups; ++j) {
        const auto& g = groups[j];
        const int s = basis.spin(j);
        // -Delta_Spin,j = -(Delta1-Delta0) + delta_j + phiDot(t) - Oc(t)^2/(Delta1+Delta_j-delta_j)
        c(s, s) = -gap10 + g.deltaGround + pc0;
        ms2(s, s) = pc2 - 1.0 / (params.delta1 + g.deltaOptical - g.deltaGround);

        mf(s, basis.qubit()) = -g.magneticCoupling;
        mf(basis.qubit(), s) = -g.magneticCoupling;

        const Complex leg = -ramanUnitCoupling(params, g) *
                            std::exp(Complex(0.0, g.theta));
        mc(basis.cavity(), s) = leg;
        mc(s, basis.cavity()) = std::conj(leg);
    }

    h.addTerm([controls](double t) { return Complex(controls.qubitLegAmplitude(t), 0.0); },
              std::move(mf));
    h.addTerm([controls](double t) { return Complex(controls.opticalDrive(t), 0.0); },
              std::move(mc));
    h.addTerm(
        [controls](double t) {
            const double oc = controls.opticalDrive(t);
            return Complex(oc * oc, 0.0);
        },
        std::move(ms2));
    return h;
}

OperatorMatrix build_effective_hamiltonian(const NodeParams& params,
                                           const std::vector<SpinGroup>& groups,
                                           const PulseSchedule& controls, double t) {
    const auto td = build_effective_hamiltonian_td(params, groups, controls);
    return {td.basis(), td(t)};
}

TimeDependentHamiltonian build_full_oracle_hamiltonian_td(const NodeParams& params,
                                                          const std::vector<SpinGroup>& groups,
                                                          const PulseSchedule& controls) {
    params.validate();
    controls.validate();
    if (controls.chirp == ChirpMode::Tracking)
        throw ConfigError("full oracle model supports constant or zero chirp only");
    if (static_cast<int>(groups.size()) != params.ensemble.groups)
        throw ConfigError("node: group list does not match ensemble spec");
    const OesBasis basis(1, params.ensemble.groups, true);
    TimeDependentHamiltonian h(basis);

    const double deltaEn = ensemble_stark_shift(params, groups);
    const auto res = resonance_conditions(params.delta0, params.delta1, params.deltaQ,
                                          controls.omegaC0, deltaEn, controls.chirp);
    const double omegaMu = res.omegaMu;
    const double phiDot = res.phiDot;
    const double tildeDq = params.deltaQ - omegaMu;

    Matrix& c = h.constant();
    c(basis.qubit(), basis.qubit()) = tildeDq;
    for (int j = 0; j < params.ensemble.groups; ++j) {
        const auto& g = groups[j];
        checkDenominators(params, g);
        c(basis.spin(j), basis.spin(j)) = g.deltaGround + params.delta0 - params.delta1;
        c(basis.spinOptical(j), basis.spinOptical(j)) = params.delta0 + g.deltaOptical;
        const Complex opt = opticalCoupling(params, g) * std::exp(Complex(0.0, g.theta));
        c(basis.cavity(), basis.spinOptical(j)) = opt;
        c(basis.spinOptical(j), basis.cavity()) = std::conj(opt);
    }

    // Sideband drive kept explicitly: the gap modulation Omega_mu(t) cos(w t)
    // on the qubit together with the frame phase on the magnetic coupling
    // generates the J1 sideband dynamically.
    Matrix mQ = Matrix::Zero(basis.dimension(), basis.dimension());
    mQ(basis.qubit(), basis.qubit()) = 1.0;
    h.addTerm(
        [controls, omegaMu](double t) {
            const double u = std::min(std::abs(controls.qubitLegAmplitude(t)), kBesselJ1Max);
            const double z = inverse_bessel_j1(u);
            return Complex(omegaMu * z * std::cos(omegaMu * t), 0.0);
        },
        std::move(mQ));

    Matrix mF = Matrix::Zero(basis.dimension(), basis.dimension());
    for (int j = 0; j < params.ensemble.groups; ++j)
        mF(basis.spin(j), basis.qubit()) = groups[j].magneticCoupling;
    h.addHermitianPair(
        [omegaMu](double t) { return std::exp(Complex(0.0, -omegaMu * t)); }, mF);

    Matrix mD = Matrix::Zero(basis.dimension(), basis.dimension());
    for (int j = 0; j < params.ensemble.groups; ++j)
        mD(basis.spin(j), basis.spinOptical(j)) = 1.0;
    h.addHermitianPair(
        [controls, phiDot](double t) {
            return controls.opticalDrive(t) * std::exp(Complex(0.0, phiDot * t));
        },
        std::move(mD));
    return h;
}

OperatorMatrix build_full_oracle_hamiltonian(const NodeParams& params,
                                             const std::vector<SpinGroup>& groups,
                                             const PulseSchedule& controls, double t) {
    const auto td = build_full_oracle_hamiltonian_td(params, groups, controls);
    return {td.basis(), td(t)};
}

std::vector<CollapseChannel> build_collapse_channels(const NodeParams& params,
                                                     const std::vector<SpinGroup>& groups,
                                                     const OesBasis& basis, int node) {
    params.validate();
    if (static_cast<int>(groups.size()) != params.ensemble.groups ||
        basis.groupsPerNode() != params.ensemble.groups)
        throw ConfigError("collapse channels: group count mismatch");
    std::vector<CollapseChannel> out;
    const int sink = basis.groundSink();

    if (params.gamma1Qb > 0)
        out.emplace_back(transition(basis, sink, basis.qubit(node)), params.gamma1Qb);
    if (params.gamma2StarQb > 0)
        out.emplace_back(projector(basis, basis.qubit(node)), 2.0 * params.gamma2StarQb);

    for (int j = 0; j < params.ensemble.groups; ++j) {
        if (params.gamma1En > 0)
            out.emplace_back(transition(basis, sink, basis.spin(j, node)), params.gamma1En);
        if (params.gamma2StarEn > 0)
            out.emplace_back(projector(basis, basis.spin(j, node)), 2.0 * params.gamma2StarEn);
    }

    if (params.kappa > 0) {
        if (basis.nodes() == 1) {
            out.emplace_back(transition(basis, sink, basis.cavity(node)), params.kappa);
        } else {
            const double kEx = params.extraction * params.kappa;
            const double kIn = params.kappa - kEx;
            if (kIn > 0) out.emplace_back(transition(basis, sink, basis.cavity(node)), kIn);
            if (kEx > 0) out.emplace_back(transition(basis, sink, basis.cavity(node)), kEx);
        }
    }

    if (basis.hasOpticalExcited()) {
        for (int j = 0; j < params.ensemble.groups; ++j) {
            if (params.gamma0Opt > 0)
                out.emplace_back(transition(basis, sink, basis.spinOptical(j, node)),
                                 params.gamma0Opt);
            if (params.gamma1Opt > 0)
                out.emplace_back(
                    transition(basis, basis.spin(j, node), basis.spinOptical(j, node)),
                    params.gamma1Opt);
        }
    }
    return out;
}

Generator make_swap_generator(const NodeParams& params, const std::vector<SpinGroup>& groups,
                              const PulseSchedule& controls) {
    auto h = build_effective_hamiltonian_td(params, groups, controls);
    auto channels = build_collapse_channels(params, groups, h.basis());
    return Generator(std::move(h), std::move(channels));
}

Generator make_oracle_generator(const NodeParams& params, const std::vector<SpinGroup>& groups,
                                const PulseSchedule& controls) {
    auto h = build_full_oracle_hamiltonian_td(params, groups, controls);
    auto channels = build_collapse_channels(params, groups, h.basis());
    return Generator(std::move(h), std::move(channels));
}

SwapTrajectory run_swap(const NodeParams& params, const std::vector<SpinGroup>& groups,
                        const PulseSchedule& schedule, const std::vector<double>& sampleTimes,
                        const EvolveOptions& opt, const SampleObserver& extra) {
    auto gen = make_swap_generator(params, groups, schedule);
    const OesBasis& basis = gen.basis();
    const double lamUnit = cavity_leg_unit_coupling(params, groups);
    const double gf = params.ensemble.collectiveCoupling;

    SwapTrajectory traj{{}, {}, {}, {}, {}, {}, {}, 0.0, 0.0, 0.0, basisState(basis, basis.qubit())};
    const std::size_t n = sampleTimes.size();
    traj.times = sampleTimes;
    for (auto* v : {&traj.qubit, &traj.spinsTotal, &traj.cavity, &traj.sink, &traj.controlOptical,
                    &traj.controlQubitLeg})
        v->resize(n);

    auto observer = [&](std::size_t i, double t, const DensityMatrix& rho) {
        traj.qubit[i] = rho.population(basis.qubit());
        traj.spinsTotal[i] = total_spin_population(rho);
        traj.cavity[i] = rho.population(basis.cavity());
        traj.sink[i] = rho.population(basis.groundSink());
        traj.controlOptical[i] = lamUnit * schedule.opticalDrive(t);
        traj.controlQubitLeg[i] = gf * schedule.qubitLegAmplitude(t);
        if (extra) extra(i, t, rho);
    };

    auto rho0 = basisState(basis, basis.qubit());
    auto result = evolve(gen, rho0, sampleTimes, opt, observer);
    traj.finalState = result.finalState;

    for (std::size_t i = 0; i < n; ++i) {
        if (traj.cavity[i] > traj.peakPopulation) {
            traj.peakPopulation = traj.cavity[i];
            traj.peakTime = sampleTimes[i];
        }
    }
    traj.peakFidelity = std::sqrt(std::max(traj.peakPopulation, 0.0));
    return traj;
}

} // namespace sim
