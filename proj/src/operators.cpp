#include "sim/operators.hpp"

namespace sim {

OperatorMatrix transition(const OesBasis& basis, int to, int from) {
    const int d = basis.dimension();
    if (to < 0 || to >= d || from < 0 || from >= d)
        throw ConfigError("transition: index out of range");
    OperatorMatrix op(basis);
    op.m(to, from) = 1.0;
    return op;
}

OperatorMatrix projector(const OesBasis& basis, int idx) { return transition(basis, idx, idx); }

double hermitianDefect(const Matrix& a) {
    return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

double maxAbsDiff(const Matrix& a, const Matrix& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

} // namespace sim
