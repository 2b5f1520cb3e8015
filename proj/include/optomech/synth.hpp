#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "optomech/delayline.hpp"
#include "optomech/spectral.hpp"

namespace optomech {

// Counter-based generator: every draw is a pure function of (seed, stream,
// index), so any subset of draws can be produced in any order or in parallel
// without changing the result. SplitMix64 finalizer as the mixing function.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t bits(std::uint64_t stream, std::uint64_t index) const;
    // uniform on (0, 1]
    double uniform(std::uint64_t stream, std::uint64_t index) const;
    // standard normal pair from draws 2*index and 2*index + 1 (Box-Muller)
    std::pair<double, double> normal_pair(std::uint64_t stream, std::uint64_t index) const;

private:
    std::uint64_t seed_;
};

// ASD shape: linear interpolation in log f between knots, constant beyond
// the end knots. A single knot is a flat spectrum.
struct AsdProfile {
    std::vector<double> knots_hz;
    std::vector<double> asd;

    static AsdProfile flat(double value) { return {{1.0}, {value}}; }

    double at(double f_hz) const;
    Eigen::ArrayXd at(const Eigen::ArrayXd& f_hz) const;
    double lowest_knot_hz() const;
    double highest_knot_hz() const;
    bool is_flat() const { return knots_hz.size() <= 1; }
    void validate(const char* name) const;
};

// Two-detector signal model, in delay-line detector volts:
//   PD_L: x1 = lambda_1 (f + c1)     S11 = (F^2 + C1^2) lambda_1^2
//   PD_F: x2 = f + n                 S22 = F^2 + S_n^2
//                                    S12 = lambda_1 F^2
struct SignalModel {
    AsdProfile frequency_noise;  // F
    AsdProfile cavity_signal;    // C1
    AsdProfile shot_noise;       // S_n
    double gain_ratio = 1.0;     // lambda_1
    std::uint64_t seed = 0;

    void validate() const;
};

TwoChannelSpectra oracle_spectra(const SignalModel& model, const FrequencyGrid& grid);

// Shot-noise PSD of the delay-line detector on a grid.
Eigen::ArrayXd shot_psd_on(const SignalModel& model, const FrequencyGrid& grid);

// Stationary Gaussian realisation by frequency-domain colouring; returns
// (PD_L, PD_F). The sample count is fs * duration rounded down to an even
// number. Deterministic in model.seed.
std::pair<TimeSeries, TimeSeries> generate_timeseries(const SignalModel& model, double sample_rate_hz,
                                                      double duration_s);

// Detector shot noise: responsivity * P * sqrt(2 h f / P) = responsivity * sqrt(2 h f P).
double shot_noise_asd(double detected_power_w, double photon_energy_j, double responsivity_v_per_w);

// Fringe recorded while the drive (linear in optical phase) runs from
// phase_start to phase_end, with additive Gaussian noise.
FringeSweep generate_fringe_sweep(double offset_v, double amplitude_v, double phase_start, double phase_end,
                                  Eigen::Index samples, double noise_sigma_v, std::uint64_t seed);

}  // namespace optomech
