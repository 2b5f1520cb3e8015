#pragma once

#include <numbers>

namespace optomech {

template <typename Scalar = double>
struct PhysicalConstants {
    static constexpr Scalar h = Scalar(6.62607015e-34);      // J s (exact, SI 2019)
    static constexpr Scalar hbar = h / (Scalar(2) * std::numbers::pi_v<Scalar>);
    static constexpr Scalar c = Scalar(299792458.0);         // m/s (exact)
    static constexpr Scalar k_B = Scalar(1.380649e-23);      // J/K (exact)
};

using Constants = PhysicalConstants<double>;

template <typename Scalar>
inline constexpr Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;

}  // namespace optomech
