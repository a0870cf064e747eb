#pragma once

#include "sim/generator.hpp"

#include <cstddef>
#include <functional>
#include <vector>

namespace sim {

struct EvolveOptions {
    double relTol = 1e-8;
    double absTol = 1e-10;
    /// Validate trace/Hermiticity of every sampled state.
    bool validateSamples = false;
};

struct Trajectory {
    std::vector<double> times;
    DensityMatrix finalState;
    std::size_t stepsTaken = 0;
    std::size_t stepsRejected = 0;
};

/// Called at every sample time with the interpolation-free (step-clamped) state.
using SampleObserver = std::function<void(std::size_t index, double t, const DensityMatrix& rho)>;

/// Integrates d(rho)/dt = G(t, rho) with an adaptive embedded Dormand-Prince
/// 5(4) pair, clamping steps at the requested sample times. Throws
/// IntegrationError (with the failure time) if the step size underflows below
/// 1e-14 of the integration span.
Trajectory evolve(const Generator& g, const DensityMatrix& rho0,
                  const std::vector<double>& sampleTimes, const EvolveOptions& opt = {},
                  const SampleObserver& observer = {});

} // namespace sim
