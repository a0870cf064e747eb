#pragma once

#include "sim/errors.hpp"

namespace sim {

/// Peak of J1 and its location.
inline constexpr double kBesselJ1Max = 0.5818652242815964;
inline constexpr double kBesselJ1ArgMax = 1.8411837813406593;

/// Bessel function of the first kind, order 1. Power series for |x| < 12,
/// Hankel asymptotic expansion beyond; |error| < 1e-10 on |x| <= 20.
double bessel_j1(double x);

/// Inverse of J1 on the rising branch [0, 1.8412]; y in [0, J1max].
double inverse_bessel_j1(double y);

double gaussian_pulse(double t, double amplitude, double center, double width);

/// amplitude / cosh((t - center)/width); even in (t - center).
double sech_pulse(double t, double amplitude, double center, double width);

enum class ChirpMode { Tracking, Constant, Zero };
enum class OpticalShape { Gaussian, Sech };

/// Control-field schedule of one node. The qubit leg is parameterized
/// directly in J1-value space; inverse_bessel_j1 recovers the physical drive
/// amplitude Omega_mu/omega_mu when needed.
struct PulseSchedule {
    double j1Peak = 0.0;       // peak of J1(Omega_mu/omega_mu)
    double tauF = 1.0;         // qubit-leg Gaussian width
    double tauDf = 0.0;        // qubit-leg center
    OpticalShape shape = OpticalShape::Gaussian;
    double omegaC0 = 0.0;      // optical drive amplitude
    double tauC = 1.0;         // optical width
    double tauDc = 0.0;        // optical center
    ChirpMode chirp = ChirpMode::Tracking;

    void validate() const;

    double qubitLegAmplitude(double t) const {
        return gaussian_pulse(t, j1Peak, tauDf, tauF);
    }
    double opticalDrive(double t) const {
        return shape == OpticalShape::Gaussian ? gaussian_pulse(t, omegaC0, tauDc, tauC)
                                               : sech_pulse(t, omegaC0, tauDc, tauC);
    }
    /// Drive amplitude entering the chirp/sideband resonance conditions.
    double chirpDrive(double t) const {
        switch (chirp) {
            case ChirpMode::Tracking: return opticalDrive(t);
            case ChirpMode::Constant: return omegaC0;
            case ChirpMode::Zero: return 0.0;
        }
        return 0.0;
    }
};

struct ResonanceConditions {
    double phiDot;   // drive chirp rate
    double omegaMu;  // sideband modulation frequency
};

/// On-resonance conditions for given drive amplitude and ensemble Stark shift:
///   phiDot  = (Delta1 - Delta0) + omegaC^2/Delta1 - deltaEn
///   omegaMu = DeltaQ + (Delta1 - Delta0) + omegaC^2/Delta1
/// Zero-chirp mode drops both the chirp and the Stark term.
ResonanceConditions resonance_conditions(double delta0, double delta1, double deltaQ,
                                         double omegaC, double deltaEn,
                                         ChirpMode mode = ChirpMode::Tracking);

} // namespace sim
