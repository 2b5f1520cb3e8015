#include "optomech/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <sstream>
#include <unsupported/Eigen/FFT>

#include "optomech/constants.hpp"
#include "optomech/errors.hpp"

namespace optomech {

namespace {

Eigen::Index resolved_overlap(const WelchOptions& options) {
    return options.overlap < 0 ? options.segment_length / 2 : options.overlap;
}

void check_options(Eigen::Index n, const WelchOptions& options) {
    const Eigen::Index overlap = resolved_overlap(options);
    if (options.segment_length < 4) throw ValidationError("Welch segment length must be >= 4", "welch.segment_length");
    if (overlap >= options.segment_length)
        throw ValidationError("Welch overlap must be smaller than the segment length", "welch.overlap");
    if (options.segment_length > n) {
        std::ostringstream msg;
        msg << "series of " << n << " samples is shorter than one Welch segment (" << options.segment_length << ")";
        throw ValidationError(msg.str(), "welch.segment_length");
    }
}

// Binary-counter cascade: segment spectra are merged pairwise, so the
// reduction tree depends only on the segment count.
template <typename Array>
class PairwiseSum {
public:
    void add(Array value) {
        std::size_t level = 0;
        while (level < slots_.size() && slots_[level].has_value()) {
            value = *slots_[level] + value;
            slots_[level].reset();
            ++level;
        }
        if (level == slots_.size()) slots_.emplace_back();
        slots_[level] = std::move(value);
    }

    Array total() const {
        std::optional<Array> acc;
        for (const auto& slot : slots_) {
            if (!slot) continue;
            acc = acc ? Array(*slot + *acc) : *slot;
        }
        return *acc;
    }

private:
    std::vector<std::optional<Array>> slots_;
};

struct SegmentTransformer {
    Eigen::Index length;
    Eigen::ArrayXd window;
    Eigen::FFT<double> fft;
    std::vector<double> buffer;
    std::vector<std::complex<double>> spectrum;

    SegmentTransformer(Eigen::Index len, Window w)
        : length(len), window(make_window(w, len)), buffer(static_cast<std::size_t>(len)) {
        fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
    }

    // positive-frequency bins 1..length/2 of the detrended, windowed segment
    Eigen::ArrayXcd transform(const Eigen::ArrayXd& samples, Eigen::Index start) {
        const auto seg = samples.segment(start, length);
        const double mean = seg.mean();
        for (Eigen::Index i = 0; i < length; ++i)
            buffer[static_cast<std::size_t>(i)] = (seg[i] - mean) * window[i];
        fft.fwd(spectrum, buffer);
        const Eigen::Index bins = length / 2;
        Eigen::ArrayXcd out(bins);
        for (Eigen::Index k = 0; k < bins; ++k) out[k] = spectrum[static_cast<std::size_t>(k + 1)];
        return out;
    }
};

// one-sided scale per bin: 2 / (fs sum w^2), Nyquist undoubled
Eigen::ArrayXd one_sided_scale(Eigen::Index length, double fs, const Eigen::ArrayXd& window) {
    const Eigen::Index bins = length / 2;
    Eigen::ArrayXd scale = Eigen::ArrayXd::Constant(bins, 2.0 / (fs * window.square().sum()));
    if (length % 2 == 0) scale[bins - 1] *= 0.5;
    return scale;
}

FrequencyGrid welch_grid(Eigen::Index length, double fs) {
    const Eigen::Index bins = length / 2;
    return FrequencyGrid(Eigen::ArrayXd::LinSpaced(bins, 1.0, static_cast<double>(bins)) * (fs / length));
}

}  // namespace

Eigen::ArrayXd make_window(Window window, Eigen::Index length) {
    if (window == Window::rectangular) return Eigen::ArrayXd::Ones(length);
    const Eigen::ArrayXd n = Eigen::ArrayXd::LinSpaced(length, 0.0, static_cast<double>(length - 1));
    return 0.5 - 0.5 * (2.0 * M_PI * n / static_cast<double>(length)).cos();
}

Eigen::Index welch_segment_count(Eigen::Index n, const WelchOptions& options) {
    check_options(n, options);
    const Eigen::Index step = options.segment_length - resolved_overlap(options);
    return (n - options.segment_length) / step + 1;
}

double welch_effective_averages(Eigen::Index n, const WelchOptions& options) {
    const Eigen::Index segments = welch_segment_count(n, options);
    const Eigen::Index step = options.segment_length - resolved_overlap(options);
    const Eigen::ArrayXd w = make_window(options.window, options.segment_length);
    const double norm = w.square().sum();
    double correlation = 0.0;
    for (Eigen::Index j = 1; j < segments; ++j) {
        const Eigen::Index shift = j * step;
        if (shift >= options.segment_length) break;
        const Eigen::Index len = options.segment_length - shift;
        const double overlap = (w.head(len) * w.segment(shift, len)).sum() / norm;
        correlation += (1.0 - static_cast<double>(j) / segments) * overlap * overlap;
    }
    return static_cast<double>(segments) / (1.0 + 2.0 * correlation);
}

NoiseSpectrum welch_psd(const TimeSeries& x, const WelchOptions& options, SpectrumUnit unit) {
    if (!(x.sample_rate_hz > 0)) throw ValidationError("sample rate must be > 0", "signal.sample_rate_hz");
    const Eigen::Index segments = welch_segment_count(x.samples.size(), options);
    const Eigen::Index step = options.segment_length - resolved_overlap(options);

    SegmentTransformer tf(options.segment_length, options.window);
    PairwiseSum<Eigen::ArrayXd> acc;
    for (Eigen::Index s = 0; s < segments; ++s) acc.add(tf.transform(x.samples, s * step).abs2());

    Eigen::ArrayXd psd = acc.total() * one_sided_scale(options.segment_length, x.sample_rate_hz, tf.window) /
                         static_cast<double>(segments);
    return NoiseSpectrum(welch_grid(options.segment_length, x.sample_rate_hz), std::move(psd), unit,
                         x.label.empty() ? "psd" : x.label);
}

void TwoChannelSpectra::validate() const {
    const Eigen::Index n = grid.size();
    if (s11.size() != n || s22.size() != n || s12.size() != n || coherence.size() != n)
        throw ValidationError("two-channel spectra arrays do not match the grid");
    if ((s11 < 0).any() || (s22 < 0).any()) throw ValidationError("auto spectra must be >= 0");
    if ((coherence < 0).any() || (coherence > 1).any()) throw ValidationError("coherence must lie in [0, 1]");
}

TwoChannelSpectra cross_spectra(const TimeSeries& x, const TimeSeries& y, const WelchOptions& options) {
    if (x.sample_rate_hz != y.sample_rate_hz)
        throw ValidationError("channels have different sample rates (" + std::to_string(x.sample_rate_hz) + " vs " +
                              std::to_string(y.sample_rate_hz) + " Hz)");
    if (x.samples.size() != y.samples.size()) throw ValidationError("channels have different lengths");
    if (!(x.sample_rate_hz > 0)) throw ValidationError("sample rate must be > 0", "signal.sample_rate_hz");

    const Eigen::Index n = x.samples.size();
    const Eigen::Index segments = welch_segment_count(n, options);
    const Eigen::Index step = options.segment_length - resolved_overlap(options);
    const Eigen::Index bins = options.segment_length / 2;

    SegmentTransformer tx(options.segment_length, options.window);
    SegmentTransformer ty(options.segment_length, options.window);
    // columns: |X|^2, |Y|^2, Re(conj(X) Y), Im(conj(X) Y)
    PairwiseSum<Eigen::ArrayXXd> acc;
    for (Eigen::Index s = 0; s < segments; ++s) {
        const Eigen::ArrayXcd fx = tx.transform(x.samples, s * step);
        const Eigen::ArrayXcd fy = ty.transform(y.samples, s * step);
        const Eigen::ArrayXcd cross = fx.conjugate() * fy;
        Eigen::ArrayXXd block(bins, 4);
        block.col(0) = fx.abs2();
        block.col(1) = fy.abs2();
        block.col(2) = cross.real();
        block.col(3) = cross.imag();
        acc.add(std::move(block));
    }

    const Eigen::ArrayXd scale =
        one_sided_scale(options.segment_length, x.sample_rate_hz, tx.window) / static_cast<double>(segments);
    const Eigen::ArrayXXd sum = acc.total();

    TwoChannelSpectra out;
    out.grid = welch_grid(options.segment_length, x.sample_rate_hz);
    out.s11 = sum.col(0) * scale;
    out.s22 = sum.col(1) * scale;
    out.s12.resize(bins);
    out.s12.real() = sum.col(2) * scale;
    out.s12.imag() = sum.col(3) * scale;
    const Eigen::ArrayXd denom = out.s11 * out.s22;
    out.coherence = (denom > 0).select(out.s12.abs2() / denom, 0.0).min(1.0).max(0.0);
    out.n_averages = segments;
    out.effective_averages = welch_effective_averages(n, options);
    return out;
}

std::string_view to_string(BinFlag flag) {
    switch (flag) {
        case BinFlag::ok: return "ok";
        case BinFlag::coherence_floor: return "coherence_floor";
        case BinFlag::nonphysical_negative: return "nonphysical_negative";
    }
    return "unknown";
}

Eigen::Index SubtractionResult::count(BinFlag flag) const {
    return static_cast<Eigen::Index>(std::count(flags.begin(), flags.end(), flag));
}

NoiseSpectrum SubtractionResult::c1_spectrum() const {
    return NoiseSpectrum(grid, c1_asd, SpectrumUnit::asd_v_per_rtHz, "c1");
}

double default_coherence_floor(const TwoChannelSpectra& spectra) {
    return spectra.n_averages > 0 ? 3.0 / static_cast<double>(spectra.n_averages) : 0.0;
}

SubtractionResult frequency_noise_subtract(const TwoChannelSpectra& spectra, const Eigen::ArrayXd& shot_psd,
                                           std::optional<double> coherence_floor) {
    spectra.validate();
    const Eigen::Index n = spectra.grid.size();
    if (shot_psd.size() != n) throw ValidationError("shot-noise PSD length does not match the spectra");
    if ((shot_psd < 0).any()) throw ValidationError("shot-noise PSD must be >= 0");

    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    SubtractionResult out;
    out.grid = spectra.grid;
    out.coherence_floor = coherence_floor.value_or(default_coherence_floor(spectra));
    out.c1_asd = Eigen::ArrayXd::Constant(n, nan);
    out.f_asd = Eigen::ArrayXd::Constant(n, nan);
    out.flags.assign(static_cast<std::size_t>(n), BinFlag::ok);

    for (Eigen::Index i = 0; i < n; ++i) {
        auto& flag = out.flags[static_cast<std::size_t>(i)];
        const double f2 = spectra.s22[i] - shot_psd[i];
        if (f2 < 0) {
            flag = BinFlag::nonphysical_negative;
            continue;
        }
        out.f_asd[i] = std::sqrt(f2);
        const double c = spectra.coherence[i];
        if (f2 == 0 || c <= out.coherence_floor) {
            flag = BinFlag::coherence_floor;
            continue;
        }
        const double radicand = f2 / (c * spectra.s22[i]) - 1.0;
        if (radicand < 0) {
            flag = BinFlag::nonphysical_negative;
            continue;
        }
        out.c1_asd[i] = out.f_asd[i] * std::sqrt(radicand);
    }
    return out;
}

SubtractionResult frequency_noise_subtract(const TwoChannelSpectra& spectra, double shot_psd,
                                           std::optional<double> coherence_floor) {
    return frequency_noise_subtract(spectra, Eigen::ArrayXd::Constant(spectra.grid.size(), shot_psd),
                                    coherence_floor);
}

Eigen::ArrayXd estimate_gain_ratio(const TwoChannelSpectra& spectra, const Eigen::ArrayXd& shot_psd) {
    const Eigen::ArrayXd f2 = spectra.s22 - shot_psd;
    return (f2 > 0).select(spectra.s12.abs() / f2, std::numeric_limits<double>::quiet_NaN());
}

Eigen::ArrayXd subtraction_standard_error(const TwoChannelSpectra& truth, const Eigen::ArrayXd& shot_psd,
                                          double effective_averages) {
    if (!(effective_averages > 0)) throw ValidationError("effective averages must be > 0");
    const Eigen::Index n = truth.grid.size();
    Eigen::ArrayXd sigma(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double a = truth.s11[i];
        const double b = truth.s22[i];
        const std::complex<double> z = truth.s12[i];
        const double q = std::norm(z);
        const double f2 = b - shot_psd[i];
        const double c1_sq = f2 * f2 * a / q - f2;
        if (!(q > 0) || !(c1_sq > 0)) {
            sigma[i] = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        // gradient of C1^2 with respect to (S11, S22, Re S12, Im S12)
        Eigen::Vector4d grad;
        grad << f2 * f2 / q, 2.0 * f2 * a / q - 1.0, -2.0 * f2 * f2 * a * z.real() / (q * q),
            -2.0 * f2 * f2 * a * z.imag() / (q * q);
        const std::complex<double> z2 = z * z;
        Eigen::Matrix4d cov;
        cov << a * a, q, a * z.real(), a * z.imag(),                                     //
            q, b * b, b * z.real(), b * z.imag(),                                        //
            a * z.real(), b * z.real(), 0.5 * (a * b + z2.real()), 0.5 * z2.imag(),      //
            a * z.imag(), b * z.imag(), 0.5 * z2.imag(), 0.5 * (a * b - z2.real());
        const double var_sq = grad.dot(cov * grad) / effective_averages;
        sigma[i] = std::sqrt(var_sq) / (2.0 * std::sqrt(c1_sq));
    }
    return sigma;
}

NoiseSpectrum volts_to_hz(const NoiseSpectrum& volts_asd, const FringeCalibration& cal) {
    if (volts_asd.unit != SpectrumUnit::asd_v_per_rtHz)
        throw ValidationError("volts_to_hz expects an asd_v_per_rtHz spectrum");
    check_operating_point(cal);
    const double slope = std::abs(fringe_slope(cal));
    NoiseSpectrum out = volts_asd;
    out.values = volts_asd.values / (slope * two_pi<double>);
    out.unit = SpectrumUnit::asd_hz_per_rtHz;
    return out;
}

NoiseSpectrum hz_to_meters(const NoiseSpectrum& hz_asd, double length_m, double wavelength_m) {
    if (hz_asd.unit != SpectrumUnit::asd_hz_per_rtHz)
        throw ValidationError("hz_to_meters expects an asd_hz_per_rtHz spectrum");
    if (!(length_m > 0) || !(wavelength_m > 0))
        throw ValidationError("cavity length and wavelength must be > 0", "cavity.length_m");
    NoiseSpectrum out = hz_asd;
    out.values = hz_asd.values * (length_m * wavelength_m / Constants::c);
    out.unit = SpectrumUnit::asd_m_per_rtHz;
    return out;
}

double volts_per_meter(const FringeCalibration& cal, double length_m, double wavelength_m) {
    check_operating_point(cal);
    return std::abs(fringe_slope(cal)) * two_pi<double> * Constants::c / (length_m * wavelength_m);
}

}  // namespace optomech
