#include "sim/analysis.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace sim {

void CavityState::validate(double tol) const {
    if (hermitianDefect(m) > tol) throw ConfigError("CavityState: not Hermitian");
    if (std::abs(m.trace().real() - 1.0) > tol) throw ConfigError("CavityState: trace != 1");
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> solver(m, Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < -tol)
        throw ConfigError("CavityState: negative eigenvalue");
}

double fidelity(const DensityMatrix& rho, const Eigen::VectorXcd& target) {
    if (target.size() != rho.dimension())
        throw ConfigError("fidelity: target dimension mismatch");
    const double norm = target.norm();
    if (std::abs(norm - 1.0) > 1e-8)
        throw ConfigError("fidelity: target state is not normalized");
    const double overlap = std::real(target.dot(rho.m * target));
    return std::sqrt(std::max(overlap, 0.0));
}

CavityState reduce_to_cavity(const DensityMatrix& rho, int node) {
    const int c = rho.basis.cavity(node);
    const int g = rho.basis.groundSink();
    CavityState out;
    const Complex p1 = rho.m(c, c);
    out.m(1, 1) = p1.real();
    out.m(0, 0) = 1.0 - p1.real();
    out.m(0, 1) = rho.m(g, c);
    out.m(1, 0) = rho.m(c, g);
    return out;
}

WignerField wigner(const CavityState& cav, double gridHalfWidth, int points) {
    if (points < 2) throw ConfigError("wigner: need at least 2 grid points");
    if (gridHalfWidth <= 0) throw ConfigError("wigner: grid half-width must be positive");
    cav.validate();
    const double r00 = cav.m(0, 0).real();
    const double r11 = cav.m(1, 1).real();
    const Complex r01 = cav.m(0, 1);

    WignerField field{gridHalfWidth, points, {}};
    field.values.resize(static_cast<std::size_t>(points) * points);
    for (int iy = 0; iy < points; ++iy) {
        const double im = field.axisValue(iy);
        for (int ix = 0; ix < points; ++ix) {
            const double re = field.axisValue(ix);
            const double a2 = re * re + im * im;
            const Complex alpha(re, im);
            const double w =
                (2.0 / M_PI) * std::exp(-2.0 * a2) *
                (r00 + r11 * (4.0 * a2 - 1.0) + 4.0 * std::real(r01 * alpha));
            field.values[static_cast<std::size_t>(iy) * points + ix] = w;
        }
    }
    return field;
}

double antisymmetric_mode_population(const DensityMatrix& rho) {
    if (rho.basis.nodes() != 2)
        throw ConfigError("antisymmetric_mode_population: two-node basis required");
    const int cA = rho.basis.cavity(0);
    const int cB = rho.basis.cavity(1);
    return 0.5 * (rho.m(cA, cA).real() + rho.m(cB, cB).real()) - std::real(rho.m(cA, cB));
}

double total_spin_population(const DensityMatrix& rho) {
    double sum = 0.0;
    for (int l = 0; l < rho.basis.nodes(); ++l)
        for (int j = 0; j < rho.basis.groupsPerNode(); ++j)
            sum += rho.population(rho.basis.spin(j, l));
    return sum;
}

} // namespace sim
