#pragma once

#include "sim/basis.hpp"

#include <Eigen/Dense>

#include <complex>

namespace sim {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

/// Dense complex operator over an OES basis.
struct OperatorMatrix {
    OesBasis basis;
    Matrix m;

    OperatorMatrix(const OesBasis& b, Matrix mat) : basis(b), m(std::move(mat)) {
        if (m.rows() != basis.dimension() || m.cols() != basis.dimension())
            throw ConfigError("OperatorMatrix: matrix dimension does not match basis");
    }
    explicit OperatorMatrix(const OesBasis& b)
        : basis(b), m(Matrix::Zero(b.dimension(), b.dimension())) {}

    int dimension() const { return basis.dimension(); }
};

/// |to><from| on the given basis.
OperatorMatrix transition(const OesBasis& basis, int to, int from);

/// |idx><idx|.
OperatorMatrix projector(const OesBasis& basis, int idx);

/// max_ij |A_ij - conj(A_ji)|
double hermitianDefect(const Matrix& a);

/// max_ij |A_ij - B_ij|
double maxAbsDiff(const Matrix& a, const Matrix& b);

} // namespace sim
