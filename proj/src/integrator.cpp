#include "sim/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sim {

namespace {

// Dormand-Prince 5(4) coefficients.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// 5th-order minus embedded 4th-order weights (error estimator).
constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                 e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                 e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

double errorNorm(const Matrix& err, const Matrix& y0, const Matrix& y1, double absTol,
                 double relTol) {
    double sum = 0.0;
    const auto* e = err.data();
    const auto* a = y0.data();
    const auto* b = y1.data();
    const Eigen::Index n = err.size();
    for (Eigen::Index i = 0; i < n; ++i) {
        const double scale = absTol + relTol * std::max(std::abs(a[i]), std::abs(b[i]));
        const double q = std::abs(e[i]) / scale;
        sum += q * q;
    }
    return std::sqrt(sum / static_cast<double>(n));
}

} // namespace

Trajectory evolve(const Generator& g, const DensityMatrix& rho0,
                  const std::vector<double>& sampleTimes, const EvolveOptions& opt,
                  const SampleObserver& observer) {
    if (rho0.basis != g.basis()) throw ConfigError("evolve: basis mismatch");
    if (sampleTimes.empty()) throw ConfigError("evolve: no sample times");
    for (std::size_t i = 1; i < sampleTimes.size(); ++i)
        if (sampleTimes[i] <= sampleTimes[i - 1])
            throw ConfigError("evolve: sample times must be strictly ascending");
    if (opt.relTol <= 0 || opt.absTol <= 0) throw ConfigError("evolve: tolerances must be positive");

    const double t0 = sampleTimes.front();
    const double tEnd = sampleTimes.back();
    const double span = std::max(tEnd - t0, 1e-300);
    const double hMin = 1e-14 * span;

    auto ws = g.makeWorkspace();
    Matrix y = rho0.m;
    Matrix k1, k2, k3, k4, k5, k6, k7, yNext, yErr;
    const int d = rho0.dimension();
    for (Matrix* m : {&k1, &k2, &k3, &k4, &k5, &k6, &k7, &yNext, &yErr})
        *m = Matrix::Zero(d, d);

    Trajectory traj{sampleTimes, DensityMatrix(rho0.basis, y), 0, 0};
    auto emit = [&](std::size_t idx, double t) {
        if (opt.validateSamples) DensityMatrix(rho0.basis, y).validate(false, 1e-6, 1e-8);
        if (observer) observer(idx, t, DensityMatrix(rho0.basis, y));
    };
    emit(0, t0);

    double t = t0;
    g.applyInto(t, y, k1, ws); // FSAL seed
    double h = span / 100.0;
    const double k1n = k1.cwiseAbs().maxCoeff();
    if (k1n > 0) h = std::min(h, 0.1 / k1n);

    std::size_t nextSample = 1;
    while (nextSample < sampleTimes.size()) {
        const double target = sampleTimes[nextSample];
        double hs = h;
        bool clamped = false;
        if (t + hs >= target) {
            hs = target - t;
            clamped = true;
        }

        yNext.noalias() = y + (hs * a21) * k1;
        g.applyInto(t + c2 * hs, yNext, k2, ws);
        yNext.noalias() = y + (hs * a31) * k1 + (hs * a32) * k2;
        g.applyInto(t + c3 * hs, yNext, k3, ws);
        yNext.noalias() = y + (hs * a41) * k1 + (hs * a42) * k2 + (hs * a43) * k3;
        g.applyInto(t + c4 * hs, yNext, k4, ws);
        yNext.noalias() = y + (hs * a51) * k1 + (hs * a52) * k2 + (hs * a53) * k3 + (hs * a54) * k4;
        g.applyInto(t + c5 * hs, yNext, k5, ws);
        yNext.noalias() = y + (hs * a61) * k1 + (hs * a62) * k2 + (hs * a63) * k3 + (hs * a64) * k4 +
                          (hs * a65) * k5;
        g.applyInto(t + hs, yNext, k6, ws);
        yNext.noalias() =
            y + (hs * b1) * k1 + (hs * b3) * k3 + (hs * b4) * k4 + (hs * b5) * k5 + (hs * b6) * k6;
        g.applyInto(t + hs, yNext, k7, ws);
        yErr.noalias() = (hs * e1) * k1 + (hs * e3) * k3 + (hs * e4) * k4 + (hs * e5) * k5 +
                         (hs * e6) * k6 + (hs * e7) * k7;

        const double err = errorNorm(yErr, y, yNext, opt.absTol, opt.relTol);
        const double factor = std::clamp(0.9 * std::pow(std::max(err, 1e-12), -0.2), 0.2, 5.0);
        if (err <= 1.0) {
            t = clamped ? target : t + hs;
            y.swap(yNext);
            k1.swap(k7); // FSAL
            ++traj.stepsTaken;
            if (clamped) {
                emit(nextSample, t);
                ++nextSample;
                // Keep the controller's step; a short clamped step says nothing new.
                h = std::max(h, hs * factor);
            } else {
                h = hs * factor;
            }
        } else {
            ++traj.stepsRejected;
            h = hs * factor;
        }
        h = std::min(h, span);
        if (h < hMin) {
            std::ostringstream os;
            os << "evolve: step size underflow (h=" << h << ") at t=" << t;
            throw IntegrationError(os.str(), t);
        }
    }

    traj.finalState = DensityMatrix(rho0.basis, y);
    return traj;
}

} // namespace sim
