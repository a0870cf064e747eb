#include "sim/ensemble.hpp"

#include <boost/math/distributions/normal.hpp>

#include <cmath>
#include <numeric>
#include <random>

namespace sim {

void EnsembleSpec::validate() const {
    if (groups < 1) throw ConfigError("EnsembleSpec: need at least one spin group");
    if (sigmaDelta < 0 || sigmaTheta < 0)
        throw ConfigError("EnsembleSpec: spreads must be nonnegative");
    if (collectiveCoupling < 0)
        throw ConfigError("EnsembleSpec: collective coupling must be nonnegative");
}

double inverse_normal_cdf(double p) {
    static const boost::math::normal_distribution<double> unit(0.0, 1.0);
    return boost::math::quantile(unit, p);
}

namespace {

// Smallest stride >= start coprime to n; identity assignment when n is 1.
int coprimeStride(int start, int n) {
    if (n <= 2) return 1;
    for (int s = start;; ++s)
        if (std::gcd(s, n) == 1) return s;
}

} // namespace

std::vector<SpinGroup> sample_ensemble(const EnsembleSpec& spec) {
    spec.validate();
    const int n = spec.groups;
    const double w = 1.0 / n;
    std::vector<SpinGroup> groups(n);

    std::vector<double> dg(n), dopt(n), th(n);
    if (spec.mode == SamplingMode::Stratified) {
        // Midpoint Gaussian quantiles carry equal probability mass; theta and
        // the optical offsets reuse the quantile set through stride
        // permutations so the three axes are not artificially correlated.
        std::vector<double> q(n);
        for (int k = 0; k < n; ++k)
            q[k] = n == 1 ? 0.0 : inverse_normal_cdf((k + 0.5) / n);
        const int sTheta = coprimeStride(7, n);
        const int sOpt = coprimeStride(3, n);
        for (int k = 0; k < n; ++k) {
            dg[k] = spec.sigmaDelta * q[k];
            th[k] = spec.sigmaTheta * q[(static_cast<long long>(sTheta) * (k + 1)) % n];
            dopt[k] = spec.sigmaDelta * q[(static_cast<long long>(sOpt) * (k + 1)) % n];
        }
    } else {
        std::mt19937_64 rng(spec.seed);
        std::normal_distribution<double> normal(0.0, 1.0);
        for (int k = 0; k < n; ++k) dg[k] = spec.sigmaDelta * normal(rng);
        for (int k = 0; k < n; ++k) dopt[k] = spec.sigmaDelta * normal(rng);
        for (int k = 0; k < n; ++k) th[k] = spec.sigmaTheta * normal(rng);
    }

    for (int k = 0; k < n; ++k) {
        groups[k].deltaGround = dg[k];
        groups[k].deltaOptical = dopt[k];
        groups[k].theta = th[k];
        groups[k].xi = 1.0;
        groups[k].weight = w;
        groups[k].magneticCoupling = spec.collectiveCoupling * std::sqrt(w);
    }
    return groups;
}

} // namespace sim
