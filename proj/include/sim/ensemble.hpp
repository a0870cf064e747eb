#pragma once

#include "sim/errors.hpp"

#include <cstdint>
#include <vector>

namespace sim {

enum class SamplingMode { Stratified, SeededRandom };

/// Inhomogeneous spin-ensemble model: N_g groups with detuning and
/// coupling-phase spreads. All rates in base-rate units.
struct EnsembleSpec {
    int groups = 20;
    double sigmaDelta = 0.0;          // std-dev of detunings
    double sigmaTheta = 0.0;          // std-dev of coupling phases [rad]
    SamplingMode mode = SamplingMode::Stratified;
    std::uint64_t seed = 0;
    double collectiveCoupling = 0.0;  // total magnetic coupling g_f = sqrt(N) <g_f,j>

    void validate() const;
};

/// One spin group. Couplings are group-cooperative: g_f,j = g_f sqrt(w_j),
/// optical g_c,j = gBarC * xi * sqrt(w).
struct SpinGroup {
    double deltaGround;    // delta_j = D_j - Dbar
    double deltaOptical;   // Delta_j = omega_r,j - omega_r
    double theta;          // optical coupling phase
    double xi;             // coupling fraction fluctuation, default 1
    double weight;         // w_j, sum to 1
    double magneticCoupling; // g_f,j
};

/// Samples the group model. Stratified mode places detunings at midpoint
/// Gaussian quantiles with equal weights (deterministic); seeded mode draws
/// reproducibly from the given seed.
std::vector<SpinGroup> sample_ensemble(const EnsembleSpec& spec);

/// Inverse standard normal CDF (used by the stratified sampler).
double inverse_normal_cdf(double p);

} // namespace sim
