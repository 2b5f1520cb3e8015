#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "optomech/delayline.hpp"
#include "optomech/spectrum.hpp"

namespace optomech {

struct TimeSeries {
    Eigen::ArrayXd samples;
    double sample_rate_hz = 0.0;
    std::string label;
};

enum class Window { hann, rectangular };

struct WelchOptions {
    Eigen::Index segment_length = 4096;
    Eigen::Index overlap = -1;  // samples; negative selects segment_length / 2
    Window window = Window::hann;
};

// Periodic window of the given length.
Eigen::ArrayXd make_window(Window window, Eigen::Index length);

// Number of segments Welch will average for a record of n samples.
Eigen::Index welch_segment_count(Eigen::Index n, const WelchOptions& options);

// Equivalent number of independent averages once segment overlap is taken
// into account (Welch 1967 variance reduction).
double welch_effective_averages(Eigen::Index n, const WelchOptions& options);

// One-sided PSD, each segment mean-removed and windowed. White noise of
// variance s^2 sampled at fs gives 2 s^2 / fs. The DC bin is dropped so the
// grid is strictly positive; the Nyquist bin (even segments) is kept and not
// doubled.
NoiseSpectrum welch_psd(const TimeSeries& x, const WelchOptions& options = {},
                        SpectrumUnit unit = SpectrumUnit::psd_v2_per_Hz);

// Two-detector spectra: S11 (locking detector), S22 (delay-line detector),
// complex S12 = <conj(X1) X2> and magnitude-squared coherence.
struct TwoChannelSpectra {
    FrequencyGrid grid;
    Eigen::ArrayXd s11;
    Eigen::ArrayXd s22;
    Eigen::ArrayXcd s12;
    Eigen::ArrayXd coherence;
    Eigen::Index n_averages = 0;   // 0 marks exact (model) spectra
    double effective_averages = 0.0;

    void validate() const;
};

TwoChannelSpectra cross_spectra(const TimeSeries& x, const TimeSeries& y, const WelchOptions& options = {});

enum class BinFlag : unsigned char { ok, coherence_floor, nonphysical_negative };
std::string_view to_string(BinFlag flag);

struct SubtractionResult {
    FrequencyGrid grid;
    Eigen::ArrayXd c1_asd;  // cavity signal with laser frequency noise removed; NaN where flagged
    Eigen::ArrayXd f_asd;   // frequency noise at the delay-line detector; NaN where S_n^2 > S22
    std::vector<BinFlag> flags;
    double coherence_floor = 0.0;

    Eigen::Index count(BinFlag flag) const;
    NoiseSpectrum c1_spectrum() const;
};

// Default floor: 3 / n_averages for estimated spectra, 0 for exact ones.
double default_coherence_floor(const TwoChannelSpectra& spectra);

// C1 = F sqrt(F^2 / (C S22) - 1), F^2 = S22 - S_n^2, evaluated per bin.
// The gain ratio lambda_1 cancels, so C1 is expressed in delay-line detector
// units (channel-1 volts divided by lambda_1).
SubtractionResult frequency_noise_subtract(const TwoChannelSpectra& spectra, const Eigen::ArrayXd& shot_psd,
                                           std::optional<double> coherence_floor = std::nullopt);
SubtractionResult frequency_noise_subtract(const TwoChannelSpectra& spectra, double shot_psd,
                                           std::optional<double> coherence_floor = std::nullopt);

// Gain ratio lambda_1 = |S12| / F^2 implied by the spectra.
Eigen::ArrayXd estimate_gain_ratio(const TwoChannelSpectra& spectra, const Eigen::ArrayXd& shot_psd);

// First-order (delta method) standard error of the recovered C1 ASD for
// spectra averaged over `effective_averages` independent segments, using the
// complex-Wishart covariance of the averaged cross-spectral matrix. NaN where
// C1 vanishes.
Eigen::ArrayXd subtraction_standard_error(const TwoChannelSpectra& truth, const Eigen::ArrayXd& shot_psd,
                                          double effective_averages);

// V/rtHz at the detector -> Hz/rtHz of laser frequency: divide by |dV/domega|
// (V s/rad, giving rad/s/rtHz) and by 2 pi.
NoiseSpectrum volts_to_hz(const NoiseSpectrum& volts_asd, const FringeCalibration& cal);

// Hz/rtHz -> m/rtHz of cavity length: multiply by L / (c / lambda).
NoiseSpectrum hz_to_meters(const NoiseSpectrum& hz_asd, double length_m, double wavelength_m);

// Volts per metre of the full chain, the inverse of hz_to_meters o volts_to_hz.
double volts_per_meter(const FringeCalibration& cal, double length_m, double wavelength_m);

}  // namespace optomech
