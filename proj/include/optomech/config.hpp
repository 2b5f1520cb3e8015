#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "optomech/delayline.hpp"
#include "optomech/io.hpp"
#include "optomech/noise_budget.hpp"
#include "optomech/spectral.hpp"
#include "optomech/synth.hpp"

namespace optomech {

inline constexpr std::string_view kConfigSchema = "optomech.config/1";

struct GridSpec {
    double f_min_hz = 0.0;
    double f_max_hz = 0.0;
    Eigen::Index points = 0;
    bool logarithmic = true;

    FrequencyGrid build() const;
};

struct CavitySpec {
    Cavity cavity;
    PowerHold hold = PowerHold::input_power;  // the power the config fixed
    bool transmission_inferred = false;
};

struct SweepSpec {
    std::vector<double> targets_hz;
    DetuningSearch search;
};

struct FringeSpec {
    std::optional<double> offset_v;
    std::optional<double> amplitude_v;
    double delay_s = 0.0;
    double lock_v = 0.0;
    std::optional<std::filesystem::path> sweep_file;

    // Needs offset_v and amplitude_v.
    FringeCalibration calibration() const;
};

enum class ProfileUnit { v_per_rtHz, hz_per_rtHz, m_per_rtHz };

struct ProfileSpec {
    AsdProfile profile;
    ProfileUnit unit = ProfileUnit::v_per_rtHz;
    bool from_budget = false;  // cavity signal only: total budget ASD as ground truth
};

struct ShotNoiseSpec {
    std::optional<double> asd_v_per_rtHz;
    double detected_power_w = 0.0;
    double responsivity_v_per_w = 0.0;
};

struct SignalSpec {
    ProfileSpec cavity_signal;
    ProfileSpec frequency_noise;
    ShotNoiseSpec shot_noise;
    double gain_ratio = 1.0;
    double sample_rate_hz = 0.0;
    double duration_s = 0.0;
    std::optional<std::filesystem::path> input_record;
};

// Scalar error annotations reported beside the sub-SQL depth; never applied
// to the curves.
struct UncertaintyAnnotations {
    double calibration_repeatability = 0.01;
    double sql_mass_fraction = 0.05;
    double total = 0.051;

    void validate() const;
};

struct OutputSpec {
    bool write_record = false;
    RecordFormat record_format = RecordFormat::binary;
};

struct RunConfig {
    std::filesystem::path base_dir;  // relative paths in the config resolve against this
    std::uint64_t seed = 0;
    std::optional<CavitySpec> cavity;
    std::optional<Oscillator> oscillator;
    std::optional<GridSpec> grid;
    BudgetOptions budget;
    std::optional<SweepSpec> sweep;
    std::optional<FringeSpec> fringe;
    std::optional<SignalSpec> signal;
    WelchOptions welch;
    UncertaintyAnnotations uncertainty;
    OutputSpec output;

    const CavitySpec& require_cavity() const;
    const Oscillator& require_oscillator() const;
    const GridSpec& require_grid() const;
    const SweepSpec& require_sweep() const;
    const FringeSpec& require_fringe() const;
    const SignalSpec& require_signal() const;
};

// Parses and validates every section present. Unknown keys, wrong types and
// missing required fields throw ValidationError naming the dotted field path.
RunConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

}  // namespace optomech
