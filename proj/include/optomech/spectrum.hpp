#pragma once

#include <Eigen/Core>
#include <string>
#include <string_view>

namespace optomech {

// Strictly increasing, finite, positive frequencies in Hz.
class FrequencyGrid {
public:
    FrequencyGrid() = default;
    explicit FrequencyGrid(Eigen::ArrayXd hz);

    static FrequencyGrid linear(double f_min_hz, double f_max_hz, Eigen::Index points);
    static FrequencyGrid logarithmic(double f_min_hz, double f_max_hz, Eigen::Index points);

    const Eigen::ArrayXd& hz() const { return hz_; }
    Eigen::ArrayXd angular() const;
    Eigen::Index size() const { return hz_.size(); }
    double operator[](Eigen::Index i) const { return hz_[i]; }

    bool operator==(const FrequencyGrid& other) const {
        return hz_.size() == other.hz_.size() && (hz_ == other.hz_).all();
    }

private:
    Eigen::ArrayXd hz_;
};

enum class SpectrumUnit {
    asd_m_per_rtHz,
    psd_m2_per_Hz,
    asd_v_per_rtHz,
    psd_v2_per_Hz,
    asd_hz_per_rtHz,
    dimensionless_ratio,
    db_power_ratio,
};

std::string_view to_string(SpectrumUnit unit);
bool is_density(SpectrumUnit unit);
bool is_amplitude(SpectrumUnit unit);

struct NoiseSpectrum {
    FrequencyGrid grid;
    Eigen::ArrayXd values;
    SpectrumUnit unit = SpectrumUnit::psd_m2_per_Hz;
    std::string label;

    NoiseSpectrum() = default;
    NoiseSpectrum(FrequencyGrid g, Eigen::ArrayXd v, SpectrumUnit u, std::string l);

    void validate() const;
};

// Unit conversion between the amplitude/power forms of the same quantity
// (m/rtHz <-> m^2/Hz, V/rtHz <-> V^2/Hz, ratio <-> dB). Any other pairing
// throws ValidationError.
NoiseSpectrum convert(const NoiseSpectrum& spectrum, SpectrumUnit target);

}  // namespace optomech
