#pragma once

#include <Eigen/Core>
#include <cmath>

namespace optomech {

// Delay-line Mach-Zehnder fringe V = A + B cos(omega tau) and the operating
// point held by the lock at V_L.
struct FringeCalibration {
    double offset_v = 0.0;     // A
    double amplitude_v = 0.0;  // B
    double delay_s = 0.0;      // tau
    double lock_v = 0.0;       // V_L

    void validate() const;
};

// Below this |sin(omega tau)| the operating point sits too close to a fringe
// extremum for the slope to be trusted.
inline constexpr double kMinFringeSine = 0.1;

inline double fringe_model(double offset_v, double amplitude_v, double phase_rad) {
    return offset_v + amplitude_v * std::cos(phase_rad);
}

// tau = 2 / f_null, f_null being the phase-modulation frequency at which the
// second harmonic nulls the delay-line signal.
double tau_from_null(double null_frequency_hz);

// Principal-branch arccos((V_L - A) / B) in [0, pi].
double operating_phase(const FringeCalibration& cal);

// dV/domega = -B tau sin(omega tau), in V s / rad.
double fringe_slope(const FringeCalibration& cal);

// Throws DomainError when |sin(omega tau)| < kMinFringeSine.
void check_operating_point(const FringeCalibration& cal, double min_sine = kMinFringeSine);

// Detector volts recorded while the laser frequency is swept (drive is any
// proxy linear in optical phase, e.g. crystal temperature).
struct FringeSweep {
    Eigen::ArrayXd drive;
    Eigen::ArrayXd volts;
};

struct FringeFit {
    double offset_v = 0.0;
    double amplitude_v = 0.0;
    double phase_per_drive = 0.0;  // rad per drive unit
    double phase_offset = 0.0;     // rad at drive = 0
    double residual_rms_v = 0.0;
    double fringes_covered = 0.0;  // |phase span| / 2 pi
};

// Two-stage fit: trimmed-extrema seed for (A, B), then least squares against
// A + B cos(k d + phi). Throws ValidationError for constant or mismatched
// input, DomainError when the sweep spans less than one fringe.
FringeFit fit_fringe(const FringeSweep& sweep);

}  // namespace optomech
