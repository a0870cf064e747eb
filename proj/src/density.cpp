#include "sim/density.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace sim {

double DensityMatrix::minEigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (m + m.adjoint()),
                                                 Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

void DensityMatrix::validate(bool checkPositivity, double trTol, double hermTol,
                             double eigTol) const {
    const double herm = hermitianDefect(m);
    if (herm > hermTol) {
        std::ostringstream os;
        os << "DensityMatrix: Hermiticity defect " << herm << " exceeds " << hermTol;
        throw ConfigError(os.str());
    }
    const double tr = trace();
    if (std::abs(tr - 1.0) > trTol) {
        std::ostringstream os;
        os << "DensityMatrix: trace " << tr << " deviates from 1 beyond " << trTol;
        throw ConfigError(os.str());
    }
    if (checkPositivity) {
        const double lambda = minEigenvalue();
        if (lambda < -eigTol) {
            std::ostringstream os;
            os << "DensityMatrix: min eigenvalue " << lambda << " below -" << eigTol;
            throw ConfigError(os.str());
        }
    }
}

DensityMatrix basisState(const OesBasis& basis, int idx) {
    if (idx < 0 || idx >= basis.dimension())
        throw ConfigError("basisState: index out of range");
    Matrix m = Matrix::Zero(basis.dimension(), basis.dimension());
    m(idx, idx) = 1.0;
    return {basis, std::move(m)};
}

} // namespace sim
