#include "optomech/noise_budget.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace optomech {

namespace {

using K = Constants;

// Ratios within this of 0 dB are rounding, not a band.
constexpr double kBandTolerance_db = 1e-9;

SqlReference resolve_reference(SqlReference requested, const Oscillator& osc, const FrequencyGrid& grid) {
    if (requested != SqlReference::automatic) return requested;
    const double lowest = 2.0 * M_PI * grid.hz().minCoeff();
    return lowest > 10.0 * osc.resonance_rad_s ? SqlReference::free_mass : SqlReference::resonant;
}

double omega_os_at(const Cavity& cavity_template, const Oscillator& osc, double detuning, PowerHold hold) {
    const Cavity cav = with_detuning(cavity_template, detuning, hold);
    return optical_spring_frequency(optical_spring_constant(cav), osc);
}

}  // namespace

double auto_measurement_rate(const Cavity& cavity, const Oscillator& osc) {
    const double x = osc.zero_point_rms();
    // one-sided force PSD 2 * hbar^2 Gamma / x^2 matched to the radiation-pressure PSD
    return x * x * radiation_pressure_force_psd(cavity) / (2.0 * K::hbar * K::hbar);
}

BudgetReport build_budget(const Cavity& cavity, const Oscillator& osc, const FrequencyGrid& grid,
                          const BudgetOptions& options) {
    cavity.validate();
    osc.validate();
    if (options.optical_damping_rad_s && !(*options.optical_damping_rad_s > 0))
        throw ValidationError("optical damping must be > 0", "budget.optical_damping_rad_s");

    const Eigen::ArrayXd omega = grid.angular();
    const Eigen::Index n = omega.size();
    const double m = osc.mass_kg;

    BudgetReport report;
    report.dynamics = options.dynamics;
    report.sql_reference = resolve_reference(options.sql_reference, osc, grid);
    report.detuning = cavity.detuning;

    Eigen::ArrayXd quantum(n), thermal(n), sql(n);

    if (options.dynamics == Dynamics::mechanical) {
        double fixed_rate = std::numeric_limits<double>::quiet_NaN();
        if (options.rate.kind == MeasurementRate::Kind::fixed) fixed_rate = options.rate.rad_s;
        if (options.rate.kind == MeasurementRate::Kind::automatic) fixed_rate = auto_measurement_rate(cavity, osc);
        if (options.rate.kind != MeasurementRate::Kind::optimal && !(fixed_rate > 0))
            throw ValidationError("measurement rate must be > 0", "budget.measurement_rate");
        report.measurement_rate_rad_s = fixed_rate;

        for (Eigen::Index i = 0; i < n; ++i) {
            const double w = omega[i];
            const double rate =
                options.rate.kind == MeasurementRate::Kind::optimal ? optimal_measurement_rate(osc, w) : fixed_rate;
            const MeasurementModel<double> model{rate, osc};
            const double chi2 = std::norm(susceptibility(osc, w));
            quantum[i] = 2.0 * quantum_noise_psd(model, w);
            thermal[i] = thermal_noise_psd(osc, w);
            if (report.sql_reference == SqlReference::free_mass) {
                const double refer = 1.0 / (m * m * w * w * w * w * chi2);
                quantum[i] *= refer;
                thermal[i] *= refer;
                sql[i] = 2.0 * K::hbar / (m * w * w);
            } else {
                sql[i] = 2.0 * sql_psd(osc, w);
            }
        }
    } else {
        const SpringState spring = optical_spring_state(cavity, osc, options.optical_damping_rad_s);
        report.spring = spring;
        const double force_psd = radiation_pressure_force_psd(cavity);
        const double limit = auto_measurement_rate(cavity, osc);
        double rate = limit;
        switch (options.rate.kind) {
            case MeasurementRate::Kind::automatic: break;
            case MeasurementRate::Kind::optimal:
                throw ValidationError(
                    "per-bin optimal measurement rate is only defined for mechanical dynamics; the optical-spring "
                    "back-action is fixed by the cavity",
                    "budget.measurement_rate");
            case MeasurementRate::Kind::fixed:
                rate = options.rate.rad_s;
                if (!(rate > 0)) throw ValidationError("measurement rate must be > 0", "budget.measurement_rate");
                if (rate > limit * (1.0 + 1e-12)) {
                    std::ostringstream msg;
                    msg << "measurement rate " << rate << " rad/s exceeds the quantum-limited rate " << limit
                        << " rad/s for this cavity (imprecision x back-action would drop below hbar^2/4)";
                    throw ValidationError(msg.str(), "budget.measurement_rate");
                }
                break;
        }
        report.measurement_rate_rad_s = rate;

        const double x = osc.zero_point_rms();
        const double imprecision = x * x / (2.0 * rate);  // one-sided
        const double damping = osc.damping_rate() + options.optical_damping_rad_s.value_or(0.0);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double w = omega[i];
            const double chi2 = std::norm(susceptibility(m, spring.angular_frequency, damping, w));
            quantum[i] = imprecision + chi2 * force_psd;
            thermal[i] = chi2 * thermal_force_psd(osc, w);
            if (report.sql_reference == SqlReference::free_mass) {
                const double refer = 1.0 / (m * m * w * w * w * w * chi2);
                quantum[i] *= refer;
                thermal[i] *= refer;
                sql[i] = 2.0 * K::hbar / (m * w * w);
            } else {
                sql[i] = 2.0 * K::hbar * std::sqrt(chi2);
            }
        }
    }

    const Eigen::ArrayXd total = quantum + thermal;
    report.quantum = NoiseSpectrum(grid, quantum.sqrt(), SpectrumUnit::asd_m_per_rtHz, "quantum");
    report.thermal = NoiseSpectrum(grid, thermal.sqrt(), SpectrumUnit::asd_m_per_rtHz, "thermal");
    report.total = NoiseSpectrum(grid, total.sqrt(), SpectrumUnit::asd_m_per_rtHz, "total");
    report.sql = NoiseSpectrum(grid, sql.sqrt(), SpectrumUnit::asd_m_per_rtHz, "sql");
    report.ratio_to_sql =
        NoiseSpectrum(grid, 10.0 * (total / sql).log10(), SpectrumUnit::db_power_ratio, "ratio_to_sql");

    Eigen::Index argmin = 0;
    report.min_ratio_db = report.ratio_to_sql.values.minCoeff(&argmin);
    report.min_ratio_hz = grid[argmin];
    report.band = sub_sql_band(report.ratio_to_sql);
    return report;
}

std::optional<SubSqlBand> sub_sql_band(const NoiseSpectrum& ratio_db) {
    if (ratio_db.unit != SpectrumUnit::db_power_ratio)
        throw ValidationError("sub_sql_band needs a db_power_ratio spectrum");
    const Eigen::ArrayXd& r = ratio_db.values;
    const Eigen::ArrayXd& f = ratio_db.grid.hz();
    Eigen::Index imin = 0;
    const double rmin = r.minCoeff(&imin);
    if (!(rmin < -kBandTolerance_db)) return std::nullopt;

    Eigen::Index lo = imin;
    while (lo > 0 && r[lo - 1] < 0) --lo;
    Eigen::Index hi = imin;
    while (hi + 1 < r.size() && r[hi + 1] < 0) ++hi;

    // zero crossing between bins a (>= 0) and b (< 0), linear in (log f, dB)
    auto crossing = [&](Eigen::Index a, Eigen::Index b) {
        const double t = r[a] / (r[a] - r[b]);
        const double la = std::log(f[a]);
        const double lb = std::log(f[b]);
        return std::exp(la + t * (lb - la));
    };

    SubSqlBand band;
    band.f_lo_hz = lo > 0 ? crossing(lo - 1, lo) : f[0];
    band.f_hi_hz = hi + 1 < r.size() ? crossing(hi + 1, hi) : f[r.size() - 1];
    band.f_min_hz = f[imin];
    band.depth_db = -rmin;
    return band;
}

std::optional<SubSqlBand> sub_sql_band(const BudgetReport& report) { return sub_sql_band(report.ratio_to_sql); }

Cavity with_detuning(const Cavity& cavity_template, double detuning, PowerHold hold) {
    Cavity cav = cavity_template;
    cav.detuning = detuning;
    if (hold == PowerHold::circulating_power) {
        cav.input_power_w =
            input_power_for_circulating(circulating_power(cavity_template), cavity_template.transmission, detuning);
    }
    return cav;
}

double peak_stiffness_detuning(PowerHold hold) {
    // K_OS ~ |d| / (1 + d^2) with P_C held, ~ |d| / (1 + d^2)^2 with P_in held
    return hold == PowerHold::circulating_power ? 1.0 : 1.0 / std::sqrt(3.0);
}

double detuning_for_os_frequency(double target_rad_s, const Cavity& cavity_template, const Oscillator& osc,
                                 const DetuningSearch& search) {
    cavity_template.validate();
    osc.validate();
    const double omega0 = osc.resonance_rad_s;
    const double peak = peak_stiffness_detuning(search.hold);
    const double omega_peak = omega_os_at(cavity_template, osc, -peak, search.hold);

    auto unreachable = [&](const char* why) {
        std::ostringstream msg;
        msg << "optical spring target " << target_rad_s / (2 * M_PI) << " Hz unreachable (" << why
            << "): achievable range on the " << (search.branch == SpringBranch::far ? "far" : "near")
            << " branch is (" << omega0 / (2 * M_PI) << ", " << omega_peak / (2 * M_PI) << "] Hz";
        return DomainError(msg.str());
    };

    if (!(target_rad_s >= omega0)) throw unreachable("below mechanical resonance");
    if (target_rad_s > omega_peak * (1.0 + 1e-12)) throw unreachable("above the stiffness maximum");
    if (target_rad_s >= omega_peak) return -peak;
    if (target_rad_s == omega0) {
        if (search.branch == SpringBranch::near) return -0.0;
        throw unreachable("reached only as |delta| -> infinity");
    }

    auto omega_at = [&](double abs_detuning) {
        return omega_os_at(cavity_template, osc, -abs_detuning, search.hold);
    };

    // bracket [a, b] on |delta| with omega_at(a) and omega_at(b) on opposite sides
    double a = 0.0;
    double b = peak;
    if (search.branch == SpringBranch::far) {
        a = peak;
        b = 2.0 * peak;
        while (omega_at(b) > target_rad_s) {
            a = b;
            b *= 2.0;
            if (b > 1e12) throw unreachable("no bracket found");
        }
    }

    // bisection; Omega_OS is monotone on each branch
    const bool increasing = search.branch == SpringBranch::near;
    for (int iter = 0; iter < 400; ++iter) {
        const double mid = 0.5 * (a + b);
        const double w = omega_at(mid);
        if (std::abs(w - target_rad_s) <= 1e-13 * target_rad_s || mid == a || mid == b) return -mid;
        if ((w < target_rad_s) == increasing)
            a = mid;
        else
            b = mid;
    }
    return -0.5 * (a + b);
}

std::vector<SweepEntry> sweep_detunings(const std::vector<double>& targets_rad_s, const Cavity& cavity_template,
                                        const Oscillator& osc, const FrequencyGrid& grid,
                                        const BudgetOptions& options, const DetuningSearch& search) {
    std::vector<SweepEntry> entries(targets_rad_s.size());
    for (std::size_t i = 0; i < targets_rad_s.size(); ++i) {
        SweepEntry& entry = entries[i];
        entry.target_rad_s = targets_rad_s[i];
        try {
            entry.detuning = detuning_for_os_frequency(entry.target_rad_s, cavity_template, osc, search);
            const Cavity cav = with_detuning(cavity_template, *entry.detuning, search.hold);
            entry.report = build_budget(cav, osc, grid, options);
        } catch (const std::exception& e) {
            entry.error = e.what();
        }
    }
    return entries;
}

std::string_view to_string(Dynamics d) { return d == Dynamics::mechanical ? "mechanical" : "optical_spring"; }

std::string_view to_string(SqlReference r) {
    switch (r) {
        case SqlReference::automatic: return "auto";
        case SqlReference::resonant: return "resonant";
        case SqlReference::free_mass: return "free_mass";
    }
    return "unknown";
}

}  // namespace optomech
