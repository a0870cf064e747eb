#include "sim/generator.hpp"

namespace sim {

void TimeDependentHamiltonian::addTerm(std::function<Complex(double)> coeff, Matrix m) {
    if (m.rows() != basis_.dimension() || m.cols() != basis_.dimension())
        throw ConfigError("TimeDependentHamiltonian: term dimension mismatch");
    terms_.push_back({std::move(coeff), std::move(m)});
}

void TimeDependentHamiltonian::addHermitianPair(std::function<Complex(double)> coeff,
                                                const Matrix& m) {
    Matrix dag = m.adjoint();
    addTerm(coeff, m);
    auto c = std::move(coeff);
    addTerm([c](double t) { return std::conj(c(t)); }, std::move(dag));
}

void TimeDependentHamiltonian::evalInto(double t, Matrix& out) const {
    out = constant_;
    for (const auto& term : terms_) {
        const Complex c = term.coeff(t);
        if (c != Complex(0.0, 0.0)) out.noalias() += c * term.m;
    }
}

Matrix TimeDependentHamiltonian::operator()(double t) const {
    Matrix out;
    evalInto(t, out);
    return out;
}

namespace {

// Returns the single nonzero entry of c, or nullopt if c is not single-entry.
struct SingleEntry {
    int row, col;
    Complex value;
};
std::optional<SingleEntry> findSingleEntry(const Matrix& c) {
    std::optional<SingleEntry> found;
    for (int j = 0; j < c.cols(); ++j)
        for (int i = 0; i < c.rows(); ++i)
            if (c(i, j) != Complex(0.0, 0.0)) {
                if (found) return std::nullopt;
                found = SingleEntry{i, j, c(i, j)};
            }
    return found;
}

} // namespace

Generator::Generator(TimeDependentHamiltonian h, std::vector<CollapseChannel> channels,
                     std::optional<ChiralLink> chiral)
    : h_(std::move(h)), channels_(std::move(channels)), chiral_(std::move(chiral)) {
    const int d = basis().dimension();
    dampingHalf_ = Matrix::Zero(d, d);
    for (const auto& ch : channels_) {
        if (ch.op.basis != basis())
            throw ConfigError("Generator: channel basis mismatch");
        dampingHalf_.noalias() += (0.5 * ch.rate) * (ch.op.m.adjoint() * ch.op.m);
        if (auto se = findSingleEntry(ch.op.m)) {
            fastJumps_.push_back({se->row, se->col, ch.rate * std::norm(se->value)});
        } else {
            denseJumps_.push_back({ch.op.m, ch.op.m.adjoint(), ch.rate});
        }
    }
    if (chiral_) {
        if (basis().nodes() != 2)
            throw ConfigError("Generator: chiral link requires a two-node basis");
        if (chiral_->kappaExA < 0 || chiral_->kappaExB < 0)
            throw ConfigError("Generator: negative extraction rate");
        cavityA_ = basis().cavity(0);
        cavityB_ = basis().cavity(1);
        kappaBar_ = std::sqrt(chiral_->kappaExA * chiral_->kappaExB);
    }
}

Generator::Workspace Generator::makeWorkspace() const {
    const int d = basis().dimension();
    return {Matrix::Zero(d, d), Matrix::Zero(d, d)};
}

void Generator::applyInto(double t, const Matrix& rho, Matrix& out, Workspace& ws) const {
    // Pool -i H(t) and the anticommutator damping into one non-Hermitian A:
    // out = -i (A rho - rho A^+) with A = H - i * dampingHalf.
    h_.evalInto(t, ws.h);
    ws.h.noalias() -= Complex(0.0, 1.0) * dampingHalf_;
    ws.tmp.noalias() = ws.h * rho;
    out.noalias() = rho * ws.h.adjoint();
    out -= ws.tmp;
    out *= Complex(0.0, 1.0);

    for (const auto& j : fastJumps_) out(j.to, j.to) += j.weight * rho(j.from, j.from);
    for (const auto& j : denseJumps_) {
        ws.tmp.noalias() = j.c * rho;
        out.noalias() += j.rate * (ws.tmp * j.cDag);
    }
    if (kappaBar_ != 0.0) {
        const int g = 0;
        out.row(cavityB_).noalias() -= kappaBar_ * rho.row(cavityA_);
        out.col(cavityB_).noalias() -= kappaBar_ * rho.col(cavityA_);
        out(g, g) += kappaBar_ * (rho(cavityA_, cavityB_) + rho(cavityB_, cavityA_));
    }
}

Matrix dissipator(const OperatorMatrix& c, double rate, const DensityMatrix& rho) {
    if (c.basis != rho.basis) throw ConfigError("dissipator: basis mismatch");
    if (rate < 0) throw ConfigError("dissipator: negative rate");
    const Matrix cr = c.m * rho.m;
    const Matrix cdc = c.m.adjoint() * c.m;
    return rate * (cr * c.m.adjoint() - 0.5 * (cdc * rho.m + rho.m * cdc));
}

Matrix apply_generator(const Generator& g, double t, const DensityMatrix& rho) {
    if (rho.basis != g.basis()) throw ConfigError("apply_generator: basis mismatch");
    Matrix out;
    auto ws = g.makeWorkspace();
    g.applyInto(t, rho.m, out, ws);
    return out;
}

Matrix build_chiral_term(const ChiralLink& link, const DensityMatrix& rho) {
    if (rho.basis.nodes() != 2)
        throw ConfigError("build_chiral_term: two-node basis required");
    const int cA = rho.basis.cavity(0);
    const int cB = rho.basis.cavity(1);
    const double kbar = std::sqrt(link.kappaExA * link.kappaExB);
    Matrix out = Matrix::Zero(rho.dimension(), rho.dimension());
    out.row(cB) -= kbar * rho.m.row(cA);
    out.col(cB) -= kbar * rho.m.col(cA);
    out(0, 0) += kbar * (rho.m(cA, cB) + rho.m(cB, cA));
    return out;
}

} // namespace sim
