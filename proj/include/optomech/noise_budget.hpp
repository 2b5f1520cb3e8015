#pragma once

#include <optional>
#include <string>
#include <vector>

#include "optomech/core.hpp"
#include "optomech/spectrum.hpp"

namespace optomech {

using Oscillator = MechanicalOscillator<double>;
using Cavity = CavityConfig<double>;
using SpringState = OpticalSpringState<double>;

// Which response the readout sees.
//  mechanical     - bare mirror susceptibility, back-action from Gamma_meas
//  optical_spring - spring-stiffened mode (Omega_OS, Gamma_m + Gamma_OS), back-action
//                   from radiation-pressure shot noise of the circulating field
enum class Dynamics { mechanical, optical_spring };

// resonant: report displacement as read out, SQL = hbar |chi|
// free_mass: refer everything to free-mass displacement, SQL = hbar / (m Omega^2)
// automatic: free_mass when the whole grid lies above 10 Omega_0, else resonant
enum class SqlReference { automatic, resonant, free_mass };

struct MeasurementRate {
    enum class Kind { fixed, automatic, optimal };
    Kind kind = Kind::automatic;
    double rad_s = 0.0;

    static MeasurementRate fixed(double rate) { return {Kind::fixed, rate}; }
    static MeasurementRate automatic() { return {Kind::automatic, 0.0}; }
    static MeasurementRate optimal() { return {Kind::optimal, 0.0}; }
};

struct BudgetOptions {
    Dynamics dynamics = Dynamics::optical_spring;
    SqlReference sql_reference = SqlReference::automatic;
    MeasurementRate rate = MeasurementRate::automatic();
    std::optional<double> optical_damping_rad_s;
};

struct SubSqlBand {
    double f_lo_hz = 0.0;
    double f_hi_hz = 0.0;
    double f_min_hz = 0.0;
    double depth_db = 0.0;  // -min(ratio), > 0 inside a band
};

// All density components are one-sided amplitude spectra in m/rtHz.
struct BudgetReport {
    NoiseSpectrum quantum;
    NoiseSpectrum thermal;
    NoiseSpectrum total;
    NoiseSpectrum sql;
    NoiseSpectrum ratio_to_sql;  // db_power_ratio
    std::optional<SubSqlBand> band;
    double min_ratio_db = 0.0;
    double min_ratio_hz = 0.0;

    Dynamics dynamics = Dynamics::optical_spring;
    SqlReference sql_reference = SqlReference::resonant;  // resolved, never automatic
    double detuning = 0.0;
    double measurement_rate_rad_s = 0.0;  // NaN when the per-bin optimum was used
    std::optional<SpringState> spring;
};

// Rate at which the uncertainty product is saturated against the radiation-pressure force:
// the quantum-limited readout for this cavity.
double auto_measurement_rate(const Cavity& cavity, const Oscillator& osc);

BudgetReport build_budget(const Cavity& cavity, const Oscillator& osc, const FrequencyGrid& grid,
                          const BudgetOptions& options = {});

// Contiguous band with ratio < 0 dB around the global minimum. Edges are
// interpolated linearly in (log f, dB); an edge that runs off the grid is
// clamped to the grid end. nullopt when the ratio never dips below 0 dB
// (by more than 1e-9 dB).
std::optional<SubSqlBand> sub_sql_band(const NoiseSpectrum& ratio_db);
std::optional<SubSqlBand> sub_sql_band(const BudgetReport& report);

// --------------------------------------------------------------------------
// Detuning sweeps

// What the sweep keeps fixed while the detuning changes.
enum class PowerHold { input_power, circulating_power };

// far: |delta| above the stiffness maximum (Omega_OS falls as |delta| grows)
// near: 0 < |delta| below it (Omega_OS -> Omega_0 as delta -> 0-)
enum class SpringBranch { far, near };

struct DetuningSearch {
    PowerHold hold = PowerHold::circulating_power;
    SpringBranch branch = SpringBranch::far;
};

// Template cavity re-detuned, with the held power kept fixed.
Cavity with_detuning(const Cavity& cavity_template, double detuning, PowerHold hold);

// |delta| at which K_OS peaks for the chosen hold mode.
double peak_stiffness_detuning(PowerHold hold);

// Negative detuning at which the exact Omega_OS equals the target. Throws
// DomainError (with the achievable range) when the target cannot be reached
// on the requested branch.
double detuning_for_os_frequency(double target_rad_s, const Cavity& cavity_template, const Oscillator& osc,
                                 const DetuningSearch& search = {});

struct SweepEntry {
    double target_rad_s = 0.0;
    std::optional<double> detuning;
    std::optional<BudgetReport> report;
    std::string error;  // set when the target was unreachable or the budget failed

    bool ok() const { return report.has_value(); }
};

// One budget per target, in input order. Entries are independent; a failure
// in one target is recorded in that entry and does not affect the others.
std::vector<SweepEntry> sweep_detunings(const std::vector<double>& targets_rad_s, const Cavity& cavity_template,
                                        const Oscillator& osc, const FrequencyGrid& grid,
                                        const BudgetOptions& options = {}, const DetuningSearch& search = {});

std::string_view to_string(Dynamics d);
std::string_view to_string(SqlReference r);

}  // namespace optomech
