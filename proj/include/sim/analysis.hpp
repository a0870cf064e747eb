#pragma once

#include "sim/density.hpp"

#include <vector>

namespace sim {

/// Reduced cavity state on Fock levels {|0>, |1>}.
struct CavityState {
    Eigen::Matrix2cd m;
    void validate(double tol = 1e-8) const;
};

/// Paper convention: F = sqrt(<Psi| rho |Psi>) against a normalized pure target.
double fidelity(const DensityMatrix& rho, const Eigen::VectorXcd& target);

/// Partial trace onto one cavity. Within the OES the |0><1| coherence is the
/// GroundSink<->CavityPhoton element; no other basis state pairs with the photon.
CavityState reduce_to_cavity(const DensityMatrix& rho, int node = 0);

struct WignerField {
    double halfWidth = 0.0;
    int points = 0;
    std::vector<double> values; // row-major, rows = Im(alpha), cols = Re(alpha)

    double at(int row, int col) const { return values[static_cast<std::size_t>(row) * points + col]; }
    double axisValue(int i) const { return -halfWidth + 2.0 * halfWidth * i / (points - 1); }
    double cellArea() const {
        double step = 2.0 * halfWidth / (points - 1);
        return step * step;
    }
};

/// Wigner function of the truncated cavity state on a square grid:
///   W(a) = (2/pi) e^{-2|a|^2} [rho00 + rho11 (4|a|^2 - 1) + 4 Re(rho10 a*)]
WignerField wigner(const CavityState& cav, double gridHalfWidth, int points);

/// <psi-| rho |psi-> with |psi-> = (|photon_A> - |photon_B>)/sqrt(2).
double antisymmetric_mode_population(const DensityMatrix& rho);

/// Sum of spin-group populations over all nodes.
double total_spin_population(const DensityMatrix& rho);

} // namespace sim
