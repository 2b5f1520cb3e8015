#include "optomech/synth.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <unsupported/Eigen/FFT>

#include "optomech/errors.hpp"

namespace optomech {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

enum Stream : std::uint64_t { kFrequencyNoise = 1, kCavitySignal = 2, kShotNoise = 3, kFringeNoise = 4 };

// Coloured Gaussian process with one-sided ASD profile, n samples (even).
Eigen::ArrayXd colour(const CounterRng& rng, std::uint64_t stream, const AsdProfile& profile, double fs,
                      Eigen::Index n) {
    const Eigen::Index half = n / 2;
    std::vector<std::complex<double>> spectrum(static_cast<std::size_t>(half + 1));
    const double base = fs * static_cast<double>(n);
    bool any = false;
    for (Eigen::Index k = 1; k <= half; ++k) {
        const double f = fs * static_cast<double>(k) / static_cast<double>(n);
        const double asd = profile.at(f);
        if (asd == 0) continue;
        any = true;
        const auto [g1, g2] = rng.normal_pair(stream, static_cast<std::uint64_t>(k));
        if (k == half) {
            // Nyquist bin is real: variance S fs n / 2 carries the full power
            spectrum[static_cast<std::size_t>(k)] = asd * std::sqrt(base / 2.0) * g1;
        } else {
            spectrum[static_cast<std::size_t>(k)] = asd * std::sqrt(base / 4.0) * std::complex<double>(g1, g2);
        }
    }
    if (!any) return Eigen::ArrayXd::Zero(n);
    Eigen::FFT<double> fft;
    fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
    std::vector<double> out;
    fft.inv(out, spectrum, n);
    return Eigen::Map<Eigen::ArrayXd>(out.data(), n);
}

}  // namespace

std::uint64_t CounterRng::bits(std::uint64_t stream, std::uint64_t index) const {
    const std::uint64_t key = mix64(seed_ + kGolden) ^ mix64(stream * kGolden + 0x632BE59BD9B4E019ull);
    return mix64(key + index * kGolden);
}

double CounterRng::uniform(std::uint64_t stream, std::uint64_t index) const {
    return (static_cast<double>(bits(stream, index) >> 11) + 1.0) * 0x1.0p-53;
}

std::pair<double, double> CounterRng::normal_pair(std::uint64_t stream, std::uint64_t index) const {
    const double u1 = uniform(stream, 2 * index);
    const double u2 = uniform(stream, 2 * index + 1);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    return {r * std::cos(theta), r * std::sin(theta)};
}

double AsdProfile::at(double f_hz) const {
    if (knots_hz.size() == 1) return asd.front();
    if (f_hz <= knots_hz.front()) return asd.front();
    if (f_hz >= knots_hz.back()) return asd.back();
    const auto it = std::upper_bound(knots_hz.begin(), knots_hz.end(), f_hz);
    const auto hi = static_cast<std::size_t>(it - knots_hz.begin());
    const std::size_t lo = hi - 1;
    const double t = std::log(f_hz / knots_hz[lo]) / std::log(knots_hz[hi] / knots_hz[lo]);
    return asd[lo] + t * (asd[hi] - asd[lo]);
}

Eigen::ArrayXd AsdProfile::at(const Eigen::ArrayXd& f_hz) const {
    Eigen::ArrayXd out(f_hz.size());
    for (Eigen::Index i = 0; i < f_hz.size(); ++i) out[i] = at(f_hz[i]);
    return out;
}

double AsdProfile::lowest_knot_hz() const { return knots_hz.front(); }
double AsdProfile::highest_knot_hz() const { return knots_hz.back(); }

void AsdProfile::validate(const char* name) const {
    const std::string field = std::string("signal.") + name;
    if (knots_hz.empty() || knots_hz.size() != asd.size())
        throw ValidationError(field + ": knots and values must be non-empty and of equal length", field);
    for (std::size_t i = 0; i < knots_hz.size(); ++i) {
        if (!(knots_hz[i] > 0) || !std::isfinite(knots_hz[i]))
            throw ValidationError(field + ": knot frequencies must be finite and > 0", field);
        if (i > 0 && !(knots_hz[i] > knots_hz[i - 1]))
            throw ValidationError(field + ": knot frequencies must increase", field);
        if (!(asd[i] >= 0) || !std::isfinite(asd[i]))
            throw ValidationError(field + ": ASD values must be finite and >= 0", field);
    }
}

void SignalModel::validate() const {
    frequency_noise.validate("frequency_noise");
    cavity_signal.validate("cavity_signal");
    shot_noise.validate("shot_noise");
    if (!(gain_ratio > 0)) throw ValidationError("gain ratio lambda_1 must be > 0", "signal.gain_ratio");
}

TwoChannelSpectra oracle_spectra(const SignalModel& model, const FrequencyGrid& grid) {
    model.validate();
    const Eigen::ArrayXd& f = grid.hz();
    const Eigen::ArrayXd F2 = model.frequency_noise.at(f).square();
    const Eigen::ArrayXd C2 = model.cavity_signal.at(f).square();
    const Eigen::ArrayXd N2 = model.shot_noise.at(f).square();
    const double lam = model.gain_ratio;

    TwoChannelSpectra out;
    out.grid = grid;
    out.s11 = (F2 + C2) * lam * lam;
    out.s22 = F2 + N2;
    out.s12 = (lam * F2).cast<std::complex<double>>();
    const Eigen::ArrayXd denom = out.s11 * out.s22;
    out.coherence = (denom > 0).select(lam * lam * F2.square() / denom, 0.0);
    out.n_averages = 0;
    out.effective_averages = 0.0;
    return out;
}

Eigen::ArrayXd shot_psd_on(const SignalModel& model, const FrequencyGrid& grid) {
    return model.shot_noise.at(grid.hz()).square();
}

std::pair<TimeSeries, TimeSeries> generate_timeseries(const SignalModel& model, double sample_rate_hz,
                                                      double duration_s) {
    model.validate();
    if (!(sample_rate_hz > 0)) throw ValidationError("sample rate must be > 0", "signal.sample_rate_hz");
    if (!(duration_s > 0)) throw ValidationError("duration must be > 0", "signal.duration_s");

    double f_max = 0.0;
    double f_min = std::numeric_limits<double>::infinity();
    for (const AsdProfile* p : {&model.frequency_noise, &model.cavity_signal, &model.shot_noise}) {
        if (p->is_flat()) continue;
        f_max = std::max(f_max, p->highest_knot_hz());
        f_min = std::min(f_min, p->lowest_knot_hz());
    }
    if (f_max > 0 && !(sample_rate_hz > 2.0 * f_max)) {
        std::ostringstream msg;
        msg << "sample rate " << sample_rate_hz << " Hz does not exceed twice the highest model frequency " << f_max
            << " Hz";
        throw ValidationError(msg.str(), "signal.sample_rate_hz");
    }
    if (std::isfinite(f_min) && duration_s * f_min < 1.0) {
        std::ostringstream msg;
        msg << "duration " << duration_s << " s cannot resolve the lowest model frequency " << f_min
            << " Hz (need >= " << 1.0 / f_min << " s)";
        throw ValidationError(msg.str(), "signal.duration_s");
    }
    auto n = static_cast<Eigen::Index>(std::floor(sample_rate_hz * duration_s));
    n -= n % 2;
    if (n < 4) throw ValidationError("duration too short: fewer than 4 samples", "signal.duration_s");

    const CounterRng rng(model.seed);
    const Eigen::ArrayXd f = colour(rng, kFrequencyNoise, model.frequency_noise, sample_rate_hz, n);
    const Eigen::ArrayXd c1 = colour(rng, kCavitySignal, model.cavity_signal, sample_rate_hz, n);
    const Eigen::ArrayXd sn = colour(rng, kShotNoise, model.shot_noise, sample_rate_hz, n);

    TimeSeries ch1{model.gain_ratio * (f + c1), sample_rate_hz, "PD_L"};
    TimeSeries ch2{f + sn, sample_rate_hz, "PD_F"};
    return {std::move(ch1), std::move(ch2)};
}

double shot_noise_asd(double detected_power_w, double photon_energy_j, double responsivity_v_per_w) {
    if (!(detected_power_w > 0)) throw ValidationError("detected power must be > 0", "signal.detected_power_w");
    if (!(photon_energy_j > 0)) throw ValidationError("photon energy must be > 0");
    return responsivity_v_per_w * std::sqrt(2.0 * photon_energy_j * detected_power_w);
}

FringeSweep generate_fringe_sweep(double offset_v, double amplitude_v, double phase_start, double phase_end,
                                  Eigen::Index samples, double noise_sigma_v, std::uint64_t seed) {
    if (samples < 2) throw ValidationError("fringe sweep needs at least 2 samples");
    const CounterRng rng(seed);
    FringeSweep sweep;
    sweep.drive = Eigen::ArrayXd::LinSpaced(samples, phase_start, phase_end);
    sweep.volts.resize(samples);
    for (Eigen::Index i = 0; i < samples; ++i) {
        const double noise =
            noise_sigma_v > 0 ? noise_sigma_v * rng.normal_pair(kFringeNoise, static_cast<std::uint64_t>(i)).first : 0.0;
        sweep.volts[i] = fringe_model(offset_v, amplitude_v, sweep.drive[i]) + noise;
    }
    return sweep;
}

}  // namespace optomech
