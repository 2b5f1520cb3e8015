#include "optomech/spectrum.hpp"

#include <cmath>
#include <utility>

#include "optomech/errors.hpp"

namespace optomech {

FrequencyGrid::FrequencyGrid(Eigen::ArrayXd hz) : hz_(std::move(hz)) {
    if (hz_.size() < 2) throw ValidationError("frequency grid needs at least 2 points", "grid.points");
    for (Eigen::Index i = 0; i < hz_.size(); ++i) {
        if (!std::isfinite(hz_[i]) || !(hz_[i] > 0))
            throw ValidationError("frequency grid values must be finite and > 0", "grid.f_min_hz");
        if (i > 0 && !(hz_[i] > hz_[i - 1]))
            throw ValidationError("frequency grid must be strictly increasing", "grid");
    }
}

FrequencyGrid FrequencyGrid::linear(double f_min_hz, double f_max_hz, Eigen::Index points) {
    if (points < 2) throw ValidationError("frequency grid needs at least 2 points", "grid.points");
    return FrequencyGrid(Eigen::ArrayXd::LinSpaced(points, f_min_hz, f_max_hz));
}

FrequencyGrid FrequencyGrid::logarithmic(double f_min_hz, double f_max_hz, Eigen::Index points) {
    if (points < 2) throw ValidationError("frequency grid needs at least 2 points", "grid.points");
    if (!(f_min_hz > 0) || !(f_max_hz > 0))
        throw ValidationError("log grid needs positive bounds", "grid.f_min_hz");
    Eigen::ArrayXd exponents = Eigen::ArrayXd::LinSpaced(points, std::log10(f_min_hz), std::log10(f_max_hz));
    Eigen::ArrayXd hz = Eigen::pow(10.0, exponents);
    // pin the endpoints exactly
    hz[0] = f_min_hz;
    hz[points - 1] = f_max_hz;
    return FrequencyGrid(std::move(hz));
}

Eigen::ArrayXd FrequencyGrid::angular() const { return 2.0 * M_PI * hz_; }

std::string_view to_string(SpectrumUnit unit) {
    switch (unit) {
        case SpectrumUnit::asd_m_per_rtHz: return "asd_m_per_rtHz";
        case SpectrumUnit::psd_m2_per_Hz: return "psd_m2_per_Hz";
        case SpectrumUnit::asd_v_per_rtHz: return "asd_v_per_rtHz";
        case SpectrumUnit::psd_v2_per_Hz: return "psd_v2_per_Hz";
        case SpectrumUnit::asd_hz_per_rtHz: return "asd_hz_per_rtHz";
        case SpectrumUnit::dimensionless_ratio: return "dimensionless_ratio";
        case SpectrumUnit::db_power_ratio: return "db_power_ratio";
    }
    return "unknown";
}

bool is_density(SpectrumUnit unit) {
    return unit != SpectrumUnit::dimensionless_ratio && unit != SpectrumUnit::db_power_ratio;
}

bool is_amplitude(SpectrumUnit unit) {
    return unit == SpectrumUnit::asd_m_per_rtHz || unit == SpectrumUnit::asd_v_per_rtHz ||
           unit == SpectrumUnit::asd_hz_per_rtHz;
}

NoiseSpectrum::NoiseSpectrum(FrequencyGrid g, Eigen::ArrayXd v, SpectrumUnit u, std::string l)
    : grid(std::move(g)), values(std::move(v)), unit(u), label(std::move(l)) {
    validate();
}

void NoiseSpectrum::validate() const {
    if (values.size() != grid.size())
        throw ValidationError("spectrum '" + label + "' has " + std::to_string(values.size()) +
                              " values for a grid of " + std::to_string(grid.size()));
    if (is_density(unit)) {
        // NaN marks bins a pipeline could not evaluate; negatives are never valid.
        if ((values < 0).any())
            throw ValidationError("spectral density '" + label + "' has negative values");
    }
}

NoiseSpectrum convert(const NoiseSpectrum& spectrum, SpectrumUnit target) {
    using U = SpectrumUnit;
    if (spectrum.unit == target) return spectrum;
    NoiseSpectrum out = spectrum;
    out.unit = target;
    auto pair = [&](U a, U b) {
        return (spectrum.unit == a && target == b) || (spectrum.unit == b && target == a);
    };
    const bool to_power = target == U::psd_m2_per_Hz || target == U::psd_v2_per_Hz;
    if (pair(U::asd_m_per_rtHz, U::psd_m2_per_Hz) || pair(U::asd_v_per_rtHz, U::psd_v2_per_Hz)) {
        if (to_power)
            out.values = spectrum.values.square();
        else
            out.values = spectrum.values.sqrt();
    } else if (pair(U::dimensionless_ratio, U::db_power_ratio)) {
        if (target == U::db_power_ratio)
            out.values = 10.0 * spectrum.values.log10();
        else
            out.values = Eigen::pow(10.0, spectrum.values / 10.0);
    } else {
        throw ValidationError("cannot convert " + std::string(to_string(spectrum.unit)) + " to " +
                              std::string(to_string(target)));
    }
    return out;
}

}  // namespace optomech
