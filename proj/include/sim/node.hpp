#pragma once

#include "sim/ensemble.hpp"
#include "sim/generator.hpp"
#include "sim/integrator.hpp"
#include "sim/pulses.hpp"

#include <string>
#include <vector>

namespace sim {

/// All rates and detunings of one interface node, in base-rate units.
struct NodeParams {
    double gamma1Qb = 0.0;      // qubit decay
    double gamma2StarQb = 0.0;  // qubit pure dephasing
    double kappa = 0.0;         // total cavity decay
    double extraction = 1.0;    // xi: kappa_ex = xi * kappa, 0 <= xi <= 1
    double gamma1En = 0.0;      // per-group spin decay
    double gamma2StarEn = 0.0;  // per-group spin pure dephasing
    double delta0 = 0.0;        // omega_r - omega_c
    double delta1 = 0.0;        // (omega_r - omega_L) - Dbar
    double dBar = 0.0;          // mean ground splitting
    double deltaQ = 0.0;        // omega_q - delta
    double gBarC = 0.0;         // collective optical coupling
    double omegaC0 = 0.0;       // peak optical drive
    double gamma0Opt = 0.0;     // |r> -> |g> decay (oracle model only)
    double gamma1Opt = 0.0;     // |r> -> |e> decay (oracle model only)
    EnsembleSpec ensemble;

    void validate() const;
    /// Non-fatal diagnostics, e.g. dispersive ratio below 10.
    std::vector<std::string> warnings() const;
    /// delta = omega_L - ... via the identity Delta1 - Delta0 = delta - Dbar.
    double delta() const { return delta1 - delta0 + dBar; }
};

/// Ensemble-induced cavity Stark shift delta_en = sum_j g_c,j^2/(Delta0 + Delta_j).
double ensemble_stark_shift(const NodeParams& params, const std::vector<SpinGroup>& groups);

/// Effective OES Hamiltonian of one node as a reusable time-dependent form.
TimeDependentHamiltonian build_effective_hamiltonian_td(const NodeParams& params,
                                                        const std::vector<SpinGroup>& groups,
                                                        const PulseSchedule& controls);

/// Effective OES Hamiltonian evaluated at one time.
OperatorMatrix build_effective_hamiltonian(const NodeParams& params,
                                           const std::vector<SpinGroup>& groups,
                                           const PulseSchedule& controls, double t);

/// Un-eliminated three-level model on the extended basis (per-group optical
/// excited states kept; sideband drive explicit). Supports constant and zero
/// chirp modes. Used as the independent oracle for the effective model.
TimeDependentHamiltonian build_full_oracle_hamiltonian_td(const NodeParams& params,
                                                          const std::vector<SpinGroup>& groups,
                                                          const PulseSchedule& controls);

OperatorMatrix build_full_oracle_hamiltonian(const NodeParams& params,
                                             const std::vector<SpinGroup>& groups,
                                             const PulseSchedule& controls, double t);

/// Collapse channels for the given basis: qubit decay/dephasing, per-group
/// spin decay/dephasing, cavity decay (split kappa_i/kappa_ex on a two-node
/// basis), and the optical decays gamma0/gamma1 on the oracle basis.
std::vector<CollapseChannel> build_collapse_channels(const NodeParams& params,
                                                     const std::vector<SpinGroup>& groups,
                                                     const OesBasis& basis, int node = 0);

/// Single-node swap generator (effective model).
Generator make_swap_generator(const NodeParams& params, const std::vector<SpinGroup>& groups,
                              const PulseSchedule& controls);

/// Single-node oracle generator (full three-level model).
Generator make_oracle_generator(const NodeParams& params, const std::vector<SpinGroup>& groups,
                                const PulseSchedule& controls);

/// Bright-mode cavity-leg coupling at unit drive: sqrt(sum_j Lambda_j^2 xi_j^2 w_j) / Omega_c.
double cavity_leg_unit_coupling(const NodeParams& params, const std::vector<SpinGroup>& groups);

struct SwapTrajectory {
    std::vector<double> times;
    std::vector<double> qubit, spinsTotal, cavity, sink;
    std::vector<double> controlOptical, controlQubitLeg;
    double peakFidelity = 0.0;   // sqrt of peak photon population
    double peakPopulation = 0.0;
    double peakTime = 0.0;
    DensityMatrix finalState;
};

/// STIRAP swap run: starts from the qubit excited state.
SwapTrajectory run_swap(const NodeParams& params, const std::vector<SpinGroup>& groups,
                        const PulseSchedule& schedule, const std::vector<double>& sampleTimes,
                        const EvolveOptions& opt = {}, const SampleObserver& extra = {});

} // namespace sim
