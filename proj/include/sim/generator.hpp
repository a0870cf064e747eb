#pragma once

#include "sim/density.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace sim {

/// One Lindblad channel: rate * D[C]rho with D[C]rho = C rho C^+ - 1/2 {C^+C, rho}.
///
/// Pure dephasing at rate gamma_phi uses the excited-state projector as C and
/// rate = 2*gamma_phi, so that coherences decay at exactly gamma_phi.
struct CollapseChannel {
    OperatorMatrix op;
    double rate;

    CollapseChannel(OperatorMatrix c, double r) : op(std::move(c)), rate(r) {
        if (rate < 0) throw ConfigError("CollapseChannel: negative rate");
    }
};

/// One-way optical fiber connection, node A -> node B.
struct ChiralLink {
    double kappaExA = 0.0;
    double kappaExB = 0.0;
};

/// H(t) = constant + sum_i coeff_i(t) * M_i. Hermitian builders add complex
/// coefficient terms in (term, dagger) pairs.
class TimeDependentHamiltonian {
public:
    explicit TimeDependentHamiltonian(const OesBasis& basis)
        : basis_(basis), constant_(Matrix::Zero(basis.dimension(), basis.dimension())) {}

    const OesBasis& basis() const { return basis_; }
    Matrix& constant() { return constant_; }
    const Matrix& constant() const { return constant_; }

    void addTerm(std::function<Complex(double)> coeff, Matrix m);
    /// Adds coeff(t)*M + conj(coeff(t))*M^+.
    void addHermitianPair(std::function<Complex(double)> coeff, const Matrix& m);

    void evalInto(double t, Matrix& out) const;
    Matrix operator()(double t) const;

private:
    struct Term {
        std::function<Complex(double)> coeff;
        Matrix m;
    };
    OesBasis basis_;
    Matrix constant_;
    std::vector<Term> terms_;
};

/// Full Lindblad generator: d(rho)/dt = -i[H(t), rho] + sum_k rate_k D[C_k]rho
/// plus the optional chiral fiber term. Assembly precomputes the pooled
/// anticommutator half-sum and rank-one fast paths for the jump terms.
class Generator {
public:
    Generator(TimeDependentHamiltonian h, std::vector<CollapseChannel> channels,
              std::optional<ChiralLink> chiral = std::nullopt);

    const OesBasis& basis() const { return h_.basis(); }
    const TimeDependentHamiltonian& hamiltonian() const { return h_; }
    const std::vector<CollapseChannel>& channels() const { return channels_; }
    const std::optional<ChiralLink>& chiral() const { return chiral_; }

    /// Scratch space reused across derivative evaluations.
    struct Workspace {
        Matrix h, tmp;
    };
    Workspace makeWorkspace() const;

    /// out = d(rho)/dt at time t.
    void applyInto(double t, const Matrix& rho, Matrix& out, Workspace& ws) const;

private:
    struct Rank1Jump {
        int to, from;
        double weight; // rate * |entry|^2
    };
    struct DenseJump {
        Matrix c, cDag;
        double rate;
    };

    TimeDependentHamiltonian h_;
    std::vector<CollapseChannel> channels_;
    std::optional<ChiralLink> chiral_;
    Matrix dampingHalf_; // sum_k rate_k/2 * C_k^+ C_k
    std::vector<Rank1Jump> fastJumps_;
    std::vector<DenseJump> denseJumps_;
    int cavityA_ = -1, cavityB_ = -1;
    double kappaBar_ = 0.0;
};

/// rate * D[C]rho, dense reference form.
Matrix dissipator(const OperatorMatrix& c, double rate, const DensityMatrix& rho);

/// Full generator derivative at time t (convenience wrapper over applyInto).
Matrix apply_generator(const Generator& g, double t, const DensityMatrix& rho);

/// The one-way fiber superoperator
///   -sqrt(kexA*kexB) (aB^+ aA rho - aA rho aB^+ + rho aA^+ aB - aB rho aA^+)
/// on a two-node basis; aL is the sink<->CavityPhoton(L) transition.
Matrix build_chiral_term(const ChiralLink& link, const DensityMatrix& rho);

} // namespace sim
