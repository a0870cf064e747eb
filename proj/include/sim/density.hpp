#pragma once

#include "sim/operators.hpp"

namespace sim {

/// Density matrix over an OES basis.
///
/// Valid states are Hermitian (1e-10 max-norm), unit trace (1e-8) and
/// positive semidefinite (min eigenvalue > -1e-8). Validation is on demand;
/// the eigenvalue check runs a Hermitian eigensolver and is the costly part.
struct DensityMatrix {
    OesBasis basis;
    Matrix m;

    DensityMatrix(const OesBasis& b, Matrix mat) : basis(b), m(std::move(mat)) {
        if (m.rows() != basis.dimension() || m.cols() != basis.dimension())
            throw ConfigError("DensityMatrix: matrix dimension does not match basis");
    }

    int dimension() const { return basis.dimension(); }
    double population(int idx) const { return m(idx, idx).real(); }
    double trace() const { return m.trace().real(); }
    double minEigenvalue() const;

    /// Throws ConfigError when an invariant is violated. `checkPositivity`
    /// adds the eigensolve.
    void validate(bool checkPositivity = false, double trTol = 1e-8,
                  double hermTol = 1e-10, double eigTol = 1e-8) const;
};

/// Pure basis state |idx><idx|.
DensityMatrix basisState(const OesBasis& basis, int idx);

} // namespace sim
