#pragma once

// Closed-form physics of a damped mechanical oscillator inside a detuned
// Fabry-Perot cavity: susceptibility, optical spring, quantum and thermal
// displacement noise and the standard quantum limit.
//
// Conventions:
//  * Angular frequencies (rad/s) everywhere unless a name ends in _hz.
//  * Detuning is signed and measured in HWHM linewidths; delta < 0 gives a
//    restoring (positive) optical spring.
//  * imprecision_psd / backaction_psd / quantum_noise_psd / sql_psd are the
//    two-sided densities for which S_imp * S_rpn >= hbar^2 / 4 and
//    S_SQL = hbar |chi|. thermal_noise_psd, radiation_pressure_force_psd and
//    free_mass_sql_asd are one-sided (the usual measured convention).

#include <cmath>
#include <complex>
#include <optional>
#include <string>

#include "optomech/constants.hpp"
#include "optomech/errors.hpp"

namespace optomech {

enum class DampingModel { viscous, structural };

template <typename Scalar = double>
struct MechanicalOscillator {
    Scalar mass_kg{};
    Scalar resonance_rad_s{};
    Scalar quality_factor{};
    Scalar temperature_k{};
    DampingModel damping = DampingModel::structural;

    Scalar damping_rate() const { return resonance_rad_s / quality_factor; }
    Scalar stiffness() const { return mass_kg * resonance_rad_s * resonance_rad_s; }

    // RMS zero-point displacement, sqrt(hbar / (2 m Omega_0)).
    Scalar zero_point_rms() const {
        return std::sqrt(PhysicalConstants<Scalar>::hbar / (Scalar(2) * mass_kg * resonance_rad_s));
    }

    void validate() const {
        if (!(mass_kg > 0)) throw ValidationError("oscillator mass must be > 0", "oscillator.mass_kg");
        if (!(resonance_rad_s > 0))
            throw ValidationError("oscillator resonance must be > 0", "oscillator.resonance_hz");
        if (!(quality_factor > 0))
            throw ValidationError("quality factor must be > 0", "oscillator.quality_factor");
        if (!(temperature_k >= 0))
            throw ValidationError("temperature must be >= 0", "oscillator.temperature_k");
    }
};

template <typename Scalar = double>
struct CavityConfig {
    Scalar length_m{};
    Scalar wavelength_m{};
    Scalar transmission{};  // input mirror power transmission
    Scalar input_power_w{};
    Scalar detuning{};       // signed, HWHM linewidths
    Scalar linewidth_hwhm_hz{};

    // On-resonance circulating power for a cavity whose only loss is the
    // input mirror: 4 P_in / T.
    Scalar max_circulating_power() const { return Scalar(4) * input_power_w / transmission; }
    Scalar optical_frequency_hz() const { return PhysicalConstants<Scalar>::c / wavelength_m; }

    void validate() const {
        if (!(transmission > 0 && transmission < 1))
            throw ValidationError("transmission must lie in (0, 1)", "cavity.transmission");
        if (!(length_m > 0)) throw ValidationError("cavity length must be > 0", "cavity.length_m");
        if (!(wavelength_m > 0)) throw ValidationError("wavelength must be > 0", "cavity.wavelength_m");
        if (!(input_power_w > 0)) throw ValidationError("input power must be > 0", "cavity.input_power_w");
        if (!(linewidth_hwhm_hz > 0))
            throw ValidationError("linewidth must be > 0", "cavity.linewidth_hwhm_hz");
        if (!std::isfinite(detuning)) throw ValidationError("detuning must be finite", "cavity.detuning");
    }
};

template <typename Scalar = double>
struct OpticalSpringState {
    Scalar stiffness{};        // K_OS, N/m
    Scalar angular_frequency{};  // Omega_OS, rad/s
    std::optional<Scalar> optical_damping;  // Gamma_OS, rad/s, externally supplied
    std::optional<Scalar> quality_factor;   // Omega_OS / Gamma_OS
};

template <typename Scalar = double>
struct MeasurementModel {
    Scalar measurement_rate{};  // Gamma_meas, rad/s
    MechanicalOscillator<Scalar> oscillator;

    void validate() const {
        if (!(measurement_rate > 0))
            throw ValidationError("measurement rate must be > 0", "budget.measurement_rate");
        oscillator.validate();
    }
};

enum class SpringForm { exact, approximate };

// ---------------------------------------------------------------------------
// Cavity and optical spring

template <typename Scalar>
Scalar circulating_power(const CavityConfig<Scalar>& cavity) {
    return cavity.max_circulating_power() / (Scalar(1) + cavity.detuning * cavity.detuning);
}

// Input power that yields circulating power `p_circ` at the given detuning.
template <typename Scalar>
Scalar input_power_for_circulating(Scalar p_circ, Scalar transmission, Scalar detuning) {
    return p_circ * transmission * (Scalar(1) + detuning * detuning) / Scalar(4);
}

// Input transmission implied by a HWHM linewidth when the input mirror is the
// only loss: T = 2 pi / F with F = FSR / FWHM and FSR = c / 2L.
template <typename Scalar>
Scalar transmission_from_linewidth(Scalar length_m, Scalar linewidth_hwhm_hz) {
    const Scalar fsr = PhysicalConstants<Scalar>::c / (Scalar(2) * length_m);
    const Scalar finesse = fsr / (Scalar(2) * linewidth_hwhm_hz);
    return two_pi<Scalar> / finesse;
}

template <typename Scalar>
Scalar optical_spring_constant(const CavityConfig<Scalar>& cavity) {
    constexpr Scalar c = PhysicalConstants<Scalar>::c;
    const Scalar d = cavity.detuning;
    return Scalar(-32) * std::numbers::pi_v<Scalar> * d * circulating_power(cavity) /
           (cavity.wavelength_m * c * cavity.transmission * (Scalar(1) + d * d));
}

// Resonance of the mirror held by the optical spring in parallel with its
// mechanical spring. Throws DomainError when the total stiffness is not
// positive (anti-spring: no real resonance).
template <typename Scalar>
Scalar optical_spring_frequency(Scalar spring_constant, const MechanicalOscillator<Scalar>& osc,
                                SpringForm form = SpringForm::exact) {
    const Scalar total = spring_constant + osc.stiffness();
    if (!(total > 0))
        throw DomainError("total stiffness K_OS + K_m = " + std::to_string(total) +
                          " N/m is not positive: anti-spring regime has no real resonance");
    if (form == SpringForm::approximate) {
        if (!(spring_constant > 0))
            throw DomainError("approximate spring frequency needs K_OS > 0");
        return std::sqrt(spring_constant / osc.mass_kg);
    }
    return std::sqrt(total / osc.mass_kg);
}

template <typename Scalar>
OpticalSpringState<Scalar> optical_spring_state(const CavityConfig<Scalar>& cavity,
                                                const MechanicalOscillator<Scalar>& osc,
                                                std::optional<Scalar> optical_damping = std::nullopt) {
    OpticalSpringState<Scalar> state;
    state.stiffness = optical_spring_constant(cavity);
    state.angular_frequency = optical_spring_frequency(state.stiffness, osc);
    if (optical_damping) {
        if (!(*optical_damping > 0))
            throw ValidationError("optical damping must be > 0", "budget.optical_damping_rad_s");
        state.optical_damping = optical_damping;
        state.quality_factor = state.angular_frequency / *optical_damping;
    }
    return state;
}

// ---------------------------------------------------------------------------
// Susceptibility and quantum noise

// 1 / (m (Omega_r^2 - Omega^2 - i Gamma Omega)) for arbitrary resonance and
// damping; used both for the bare mirror and the spring-stiffened mode.
template <typename Scalar>
std::complex<Scalar> susceptibility(Scalar mass, Scalar resonance, Scalar damping, Scalar omega) {
    const std::complex<Scalar> denom(resonance * resonance - omega * omega, -damping * omega);
    return Scalar(1) / (mass * denom);
}

template <typename Scalar>
std::complex<Scalar> susceptibility(const MechanicalOscillator<Scalar>& osc, Scalar omega) {
    return susceptibility(osc.mass_kg, osc.resonance_rad_s, osc.damping_rate(), omega);
}

template <typename Scalar>
Scalar imprecision_psd(const MeasurementModel<Scalar>& model) {
    const Scalar x = model.oscillator.zero_point_rms();
    return x * x / (Scalar(4) * model.measurement_rate);
}

template <typename Scalar>
Scalar backaction_psd(const MeasurementModel<Scalar>& model) {
    constexpr Scalar hbar = PhysicalConstants<Scalar>::hbar;
    const Scalar x = model.oscillator.zero_point_rms();
    return hbar * hbar * model.measurement_rate / (x * x);
}

template <typename Scalar>
Scalar quantum_noise_psd(const MeasurementModel<Scalar>& model, Scalar omega) {
    return imprecision_psd(model) + std::norm(susceptibility(model.oscillator, omega)) * backaction_psd(model);
}

template <typename Scalar>
Scalar optimal_measurement_rate(const MechanicalOscillator<Scalar>& osc, Scalar omega) {
    const Scalar x = osc.zero_point_rms();
    return x * x / (Scalar(2) * PhysicalConstants<Scalar>::hbar * std::abs(susceptibility(osc, omega)));
}

template <typename Scalar>
Scalar sql_psd(const MechanicalOscillator<Scalar>& osc, Scalar omega) {
    return PhysicalConstants<Scalar>::hbar * std::abs(susceptibility(osc, omega));
}

// One-sided free-mass SQL amplitude, sqrt(2 hbar / (m Omega^2)).
template <typename Scalar>
Scalar free_mass_sql_asd(Scalar mass, Scalar omega) {
    if (!(mass > 0) || !(omega > 0)) throw ValidationError("free-mass SQL needs m > 0 and Omega > 0");
    return std::sqrt(Scalar(2) * PhysicalConstants<Scalar>::hbar / mass) / omega;
}

// One-sided radiation-pressure force PSD on the end mirror driven by shot
// noise of the input light: (2 P_C / c)^2 * 2 h f / P_in.
template <typename Scalar>
Scalar radiation_pressure_force_psd(const CavityConfig<Scalar>& cavity) {
    using K = PhysicalConstants<Scalar>;
    const Scalar force = Scalar(2) * circulating_power(cavity) / K::c;
    return force * force * Scalar(2) * K::h * cavity.optical_frequency_hz() / cavity.input_power_w;
}

// Free-mass back-action displacement over the free-mass SQL, both amplitude
// spectral densities at angular frequency omega.
template <typename Scalar>
Scalar backaction_to_sql_ratio(const CavityConfig<Scalar>& cavity, const MechanicalOscillator<Scalar>& osc,
                               Scalar omega) {
    using K = PhysicalConstants<Scalar>;
    if (!(omega > 0)) throw ValidationError("back-action ratio needs Omega > 0");
    const Scalar m = osc.mass_kg;
    const Scalar pc = circulating_power(cavity);
    const Scalar d = cavity.detuning;
    const Scalar rin = std::sqrt(Scalar(8) * K::h * cavity.optical_frequency_hz() /
                                 (pc * cavity.transmission * (Scalar(1) + d * d)));
    const Scalar x_rp = Scalar(2) * pc / K::c * rin / (m * omega * omega);
    return x_rp / free_mass_sql_asd(m, omega);
}

// Same ratio evaluated at Omega_OS ~ sqrt(K_OS / m); algebraically
// sqrt(1 / -delta). Only meaningful for a restoring spring (delta < 0).
template <typename Scalar>
Scalar backaction_to_sql_ratio_at_spring(const CavityConfig<Scalar>& cavity,
                                         const MechanicalOscillator<Scalar>& osc) {
    if (!(cavity.detuning < 0))
        throw DomainError("detuning >= 0: the motion is not amplified by a restoring optical spring, "
                          "the back-action/SQL ratio at Omega_OS does not apply");
    const Scalar omega_os = optical_spring_frequency(optical_spring_constant(cavity), osc, SpringForm::approximate);
    return backaction_to_sql_ratio(cavity, osc, omega_os);
}

// ---------------------------------------------------------------------------
// Thermal noise (fluctuation-dissipation, one-sided)

template <typename Scalar>
Scalar thermal_force_psd(const MechanicalOscillator<Scalar>& osc, Scalar omega) {
    const Scalar kt4 = Scalar(4) * PhysicalConstants<Scalar>::k_B * osc.temperature_k;
    if (osc.damping == DampingModel::viscous) return kt4 * osc.mass_kg * osc.damping_rate();
    if (!(omega > 0))
        throw ValidationError("structural damping thermal noise diverges at zero frequency", "grid.f_min_hz");
    return kt4 * osc.mass_kg * osc.resonance_rad_s * osc.resonance_rad_s / (osc.quality_factor * omega);
}

template <typename Scalar>
Scalar thermal_noise_psd(const MechanicalOscillator<Scalar>& osc, Scalar omega) {
    return thermal_force_psd(osc, omega) * std::norm(susceptibility(osc, omega));
}

}  // namespace optomech
