#pragma once

#include <functional>
#include <vector>

namespace sim {

struct NelderMeadOptions {
    int maxEvals = 200;
    double xTol = 1e-4;
    double fTol = 1e-6;
};

struct NelderMeadResult {
    std::vector<double> x;
    double f = 0.0;
    int evals = 0;
};

/// Derivative-free minimization in a box, deterministic initialization (no
/// RNG). Degenerate bounds (lo == hi in every dimension) return that single
/// evaluated point.
NelderMeadResult nelder_mead_bounded(const std::function<double(const std::vector<double>&)>& f,
                                     const std::vector<double>& lo, const std::vector<double>& hi,
                                     const NelderMeadOptions& opt = {});

} // namespace sim
