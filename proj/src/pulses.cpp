#include "sim/pulses.hpp"

#include <cmath>

namespace sim {

namespace {

// Power series J1(x) = (x/2) sum_k (-1)^k (x^2/4)^k / (k! (k+1)!).
double j1Series(double x) {
    const double q = 0.25 * x * x;
    double term = 0.5 * x;
    double sum = term;
    for (int k = 1; k < 60; ++k) {
        term *= -q / (static_cast<double>(k) * (k + 1));
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum) + 1e-300) break;
    }
    return sum;
}

// Hankel asymptotic expansion for J_nu, here nu = 1 (mu = 4nu^2 = 4).
double j1Asymptotic(double x) {
    const double mu = 4.0;
    const double w = 8.0 * x;
    double p = 1.0, q = 0.0;
    double ak = 1.0;
    for (int k = 1; k <= 14; ++k) {
        const double f = 2.0 * k - 1.0;
        ak *= (mu - f * f) / (static_cast<double>(k) * w);
        const int mod = k % 4;
        if (mod == 0) p += ak;
        else if (mod == 1) q += ak;
        else if (mod == 2) p -= ak;
        else q -= ak;
        if (std::abs(ak) < 1e-17) break;
    }
    const double chi = x - 0.75 * M_PI;
    return std::sqrt(2.0 / (M_PI * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

double j0Series(double x) {
    const double q = 0.25 * x * x;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 60; ++k) {
        term *= -q / (static_cast<double>(k) * k);
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum) + 1e-300) break;
    }
    return sum;
}

} // namespace

double bessel_j1(double x) {
    const double ax = std::abs(x);
    const double v = ax < 12.0 ? j1Series(ax) : j1Asymptotic(ax);
    return x < 0 ? -v : v;
}

double inverse_bessel_j1(double y) {
    if (y < 0 || y > kBesselJ1Max)
        throw ConfigError("inverse_bessel_j1: value outside [0, J1 max]");
    if (y == 0.0) return 0.0;
    // Newton on the rising branch, bisection fallback near the flat top.
    double lo = 0.0, hi = kBesselJ1ArgMax;
    double x = std::min(2.0 * y, kBesselJ1ArgMax);
    for (int it = 0; it < 100; ++it) {
        const double f = bessel_j1(x) - y;
        if (f > 0) hi = x;
        else lo = x;
        const double df = j0Series(x) - bessel_j1(x) / x;
        double step = df != 0.0 ? f / df : 0.0;
        double xn = x - step;
        if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
        if (std::abs(xn - x) < 1e-14 * (1.0 + x)) return xn;
        x = xn;
    }
    return x;
}

double gaussian_pulse(double t, double amplitude, double center, double width) {
    if (width <= 0) throw ConfigError("gaussian_pulse: width must be positive");
    const double u = (t - center) / width;
    return amplitude * std::exp(-0.5 * u * u);
}

double sech_pulse(double t, double amplitude, double center, double width) {
    if (width <= 0) throw ConfigError("sech_pulse: width must be positive");
    return amplitude / std::cosh((t - center) / width);
}

void PulseSchedule::validate() const {
    if (std::abs(j1Peak) > kBesselJ1Max + 1e-12)
        throw ConfigError("PulseSchedule: qubit-leg amplitude exceeds the J1 range");
    if (tauF <= 0 || tauC <= 0) throw ConfigError("PulseSchedule: pulse widths must be positive");
    if (omegaC0 < 0) throw ConfigError("PulseSchedule: optical amplitude must be nonnegative");
}

ResonanceConditions resonance_conditions(double delta0, double delta1, double deltaQ,
                                         double omegaC, double deltaEn, ChirpMode mode) {
    if (delta1 == 0.0)
        throw SingularDetuningError("resonance_conditions: Delta1 = 0");
    const double stark = mode == ChirpMode::Zero ? 0.0 : omegaC * omegaC / delta1;
    const double phiDot = mode == ChirpMode::Zero ? 0.0 : (delta1 - delta0) + stark - deltaEn;
    const double omegaMu = deltaQ + (delta1 - delta0) + stark;
    return {phiDot, omegaMu};
}

} // namespace sim
