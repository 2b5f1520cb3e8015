#include "optomech/commands.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>

#include "optomech/errors.hpp"

namespace optomech {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

ojson number_or_null(double v) { return std::isfinite(v) ? ojson(v) : ojson(nullptr); }

void emit(CommandResult& result, const CommandOptions& options, const fs::path& name, std::string_view content) {
    write_file_atomic(options.out_dir / name, content);
    result.files.push_back(name);
}

std::string dump(const ojson& j) { return j.dump(2) + "\n"; }

ojson uncertainty_json(const UncertaintyAnnotations& u) {
    return {{"calibration_repeatability", u.calibration_repeatability},
            {"sql_mass_fraction", u.sql_mass_fraction},
            {"total", u.total},
            {"applied_to_curves", false}};
}

ojson band_json(const std::optional<SubSqlBand>& band, const UncertaintyAnnotations& u) {
    if (!band) return nullptr;
    return {{"f_lo_hz", band->f_lo_hz},
            {"f_hi_hz", band->f_hi_hz},
            {"f_min_hz", band->f_min_hz},
            {"depth_db", band->depth_db},
            {"depth_db_uncertainty", band->depth_db * u.total},
            {"amplitude_ratio_to_sql", std::pow(10.0, -band->depth_db / 20.0)},
            {"power_reduction_percent", 100.0 * (1.0 - std::pow(10.0, -band->depth_db / 10.0))}};
}

ojson spring_json(const std::optional<SpringState>& spring) {
    if (!spring) return nullptr;
    ojson j{{"stiffness_n_per_m", spring->stiffness},
            {"frequency_hz", spring->angular_frequency / two_pi<double>},
            {"optical_damping_rad_s", nullptr},
            {"quality_factor", nullptr}};
    if (spring->optical_damping) j["optical_damping_rad_s"] = *spring->optical_damping;
    if (spring->quality_factor) j["quality_factor"] = *spring->quality_factor;
    return j;
}

ojson budget_summary(const BudgetReport& report, const Cavity& cavity, const CavitySpec& spec, const Oscillator& osc,
                     const UncertaintyAnnotations& u) {
    ojson j;
    j["dynamics"] = to_string(report.dynamics);
    j["sql_reference"] = to_string(report.sql_reference);
    j["detuning"] = report.detuning;
    j["input_power_w"] = cavity.input_power_w;
    j["circulating_power_w"] = circulating_power(cavity);
    j["transmission"] = cavity.transmission;
    j["measurement_rate_rad_s"] = number_or_null(report.measurement_rate_rad_s);
    j["spring"] = spring_json(report.spring);
    j["band"] = band_json(report.band, u);
    j["min_ratio_db"] = report.min_ratio_db;
    j["min_ratio_hz"] = report.min_ratio_hz;
    j["depth_db"] = -report.min_ratio_db;

    if (cavity.detuning < 0) {
        try {
            const double r = backaction_to_sql_ratio_at_spring(cavity, osc);
            j["backaction_to_sql_at_spring"] = {{"amplitude_ratio", r}, {"power_ratio_db", 20.0 * std::log10(r)}};
        } catch (const DomainError&) {
            j["backaction_to_sql_at_spring"] = nullptr;
        }
    }

    // Consistency of the configured transmission with the quoted linewidth.
    ojson check;
    const double t_lw = transmission_from_linewidth(cavity.length_m, cavity.linewidth_hwhm_hz);
    check["transmission_from_linewidth"] = t_lw;
    check["transmission_inferred"] = spec.transmission_inferred;
    Cavity alt = cavity;
    alt.transmission = t_lw;
    if (spec.hold == PowerHold::circulating_power)
        alt.input_power_w = input_power_for_circulating(circulating_power(cavity), t_lw, cavity.detuning);
    try {
        check["spring_frequency_hz_at_linewidth_transmission"] =
            optical_spring_frequency(optical_spring_constant(alt), osc) / two_pi<double>;
    } catch (const DomainError&) {
        check["spring_frequency_hz_at_linewidth_transmission"] = nullptr;
    }
    j["linewidth_consistency"] = check;
    j["uncertainty"] = uncertainty_json(u);
    return j;
}

ojson table_json(const CsvTable& table) {
    ojson cols = ojson::object();
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        ojson values = ojson::array();
        for (Eigen::Index r = 0; r < table.data.rows(); ++r)
            values.push_back(number_or_null(table.data(r, static_cast<Eigen::Index>(c))));
        cols[table.columns[c]] = std::move(values);
    }
    return {{"schema", table.schema}, {"columns", std::move(cols)}};
}

void write_table(CommandResult& result, const CommandOptions& options, const std::string& stem,
                 const CsvTable& table) {
    if (options.format == OutputFormat::csv)
        emit(result, options, stem + ".csv", to_csv(table));
    else
        emit(result, options, stem + ".json", dump(table_json(table)));
}

std::string hz_label(double hz) {
    std::string s = format_number(hz);
    std::replace(s.begin(), s.end(), '.', 'p');
    return s + "Hz";
}

double interpolate_log(const FrequencyGrid& grid, const Eigen::ArrayXd& values, double f) {
    const Eigen::ArrayXd& x = grid.hz();
    if (f <= x[0]) return values[0];
    if (f >= x[x.size() - 1]) return values[values.size() - 1];
    const auto it = std::upper_bound(x.data(), x.data() + x.size(), f);
    const Eigen::Index hi = it - x.data();
    const Eigen::Index lo = hi - 1;
    const double t = std::log(f / x[lo]) / std::log(x[hi] / x[lo]);
    return values[lo] + t * (values[hi] - values[lo]);
}

}  // namespace

CsvTable budget_table(const BudgetReport& report) {
    const Eigen::Index n = report.total.grid.size();
    CsvTable table{std::string(schema::budget),
                   {"frequency_hz", "quantum_asd_m_per_rtHz", "thermal_asd_m_per_rtHz", "total_asd_m_per_rtHz",
                    "sql_asd_m_per_rtHz", "ratio_db_power"},
                   Eigen::MatrixXd(n, 6)};
    table.data.col(0) = report.total.grid.hz().matrix();
    table.data.col(1) = report.quantum.values.matrix();
    table.data.col(2) = report.thermal.values.matrix();
    table.data.col(3) = report.total.values.matrix();
    table.data.col(4) = report.sql.values.matrix();
    table.data.col(5) = report.ratio_to_sql.values.matrix();
    return table;
}

// ---------------------------------------------------------------------------

CommandResult cmd_budget(const RunConfig& config, const CommandOptions& options) {
    const CavitySpec& spec = config.require_cavity();
    const Oscillator& osc = config.require_oscillator();
    const FrequencyGrid grid = config.require_grid().build();

    const BudgetReport report = build_budget(spec.cavity, osc, grid, config.budget);

    CommandResult result;
    write_table(result, options, "budget", budget_table(report));
    result.summary = {{"schema", "optomech.budget_summary/1"}, {"command", "budget"}};
    result.summary.update(budget_summary(report, spec.cavity, spec, osc, config.uncertainty));
    result.summary["files"] = ojson::array();
    for (const auto& f : result.files) result.summary["files"].push_back(f.generic_string());
    emit(result, options, "budget_summary.json", dump(result.summary));
    return result;
}

CommandResult cmd_sweep(const RunConfig& config, const CommandOptions& options) {
    const CavitySpec& spec = config.require_cavity();
    const Oscillator& osc = config.require_oscillator();
    const FrequencyGrid grid = config.require_grid().build();
    const SweepSpec& sweep = config.require_sweep();

    CommandResult result;
    std::vector<double> targets;
    for (double t : sweep.targets_hz) {
        const bool dup = std::any_of(targets.begin(), targets.end(),
                                     [&](double u) { return std::abs(u - t) <= 1e-9 * std::max(u, t); });
        if (dup)
            result.warnings.push_back("duplicate sweep target " + format_number(t) + " Hz ignored");
        else
            targets.push_back(t);
    }
    std::vector<double> targets_rad;
    for (double t : targets) targets_rad.push_back(two_pi<double> * t);

    const std::vector<SweepEntry> entries =
        sweep_detunings(targets_rad, spec.cavity, osc, grid, config.budget, sweep.search);

    struct Row {
        double omega_os;
        ojson json;
    };
    std::vector<Row> ok_rows;
    ojson failed = ojson::array();
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const SweepEntry& e = entries[i];
        const double target_hz = targets[i];
        if (!e.ok()) {
            failed.push_back({{"target_hz", target_hz}, {"error", e.error}});
            continue;
        }
        const BudgetReport& r = *e.report;
        const std::string stem = "sweep_" + hz_label(target_hz);
        write_table(result, options, stem, budget_table(r));
        const Cavity cav = with_detuning(spec.cavity, *e.detuning, sweep.search.hold);
        ojson j{{"target_hz", target_hz},
                {"detuning", *e.detuning},
                {"spring_frequency_hz", r.spring->angular_frequency / two_pi<double>},
                {"input_power_w", cav.input_power_w},
                {"circulating_power_w", circulating_power(cav)},
                {"measurement_rate_rad_s", number_or_null(r.measurement_rate_rad_s)},
                {"depth_db", -r.min_ratio_db},
                {"min_ratio_hz", r.min_ratio_hz},
                {"band", band_json(r.band, config.uncertainty)},
                {"file", result.files.back().generic_string()}};
        ok_rows.push_back({r.spring->angular_frequency, std::move(j)});
    }
    std::stable_sort(ok_rows.begin(), ok_rows.end(),
                     [](const Row& a, const Row& b) { return a.omega_os < b.omega_os; });

    result.summary = {{"schema", "optomech.sweep_summary/1"},
                      {"command", "sweep"},
                      {"hold", sweep.search.hold == PowerHold::circulating_power ? "circulating_power" : "input_power"},
                      {"branch", sweep.search.branch == SpringBranch::far ? "far" : "near"},
                      {"entries", ojson::array()},
                      {"errors", std::move(failed)},
                      {"warnings", result.warnings},
                      {"uncertainty", uncertainty_json(config.uncertainty)}};
    for (auto& row : ok_rows) result.summary["entries"].push_back(std::move(row.json));
    emit(result, options, "sweep_summary.json", dump(result.summary));
    return result;
}

// ---------------------------------------------------------------------------

namespace {

double scale_for(ProfileUnit unit, double v_per_hz, double v_per_m) {
    switch (unit) {
        case ProfileUnit::v_per_rtHz: return 1.0;
        case ProfileUnit::hz_per_rtHz: return v_per_hz;
        case ProfileUnit::m_per_rtHz: return v_per_m;
    }
    return 1.0;
}

AsdProfile scaled(AsdProfile p, double factor) {
    for (double& a : p.asd) a *= factor;
    return p;
}

}  // namespace

CommandResult cmd_calibrate_demo(const RunConfig& config, const CommandOptions& options) {
    const SignalSpec& sig = config.require_signal();
    const FringeSpec& fringe = config.require_fringe();
    const CavitySpec& cav_spec = config.require_cavity();
    const Cavity& cavity = cav_spec.cavity;

    const FringeCalibration cal = fringe.calibration();
    cal.validate();
    check_operating_point(cal);
    const double v_per_hz = std::abs(fringe_slope(cal)) * two_pi<double>;
    const double v_per_m = volts_per_meter(cal, cavity.length_m, cavity.wavelength_m);

    // Ground truth for the cavity signal, in delay-line volts.
    std::optional<BudgetReport> budget;
    AsdProfile c1_profile;
    if (sig.cavity_signal.from_budget) {
        budget = build_budget(cavity, config.require_oscillator(), config.require_grid().build(), config.budget);
        const Eigen::ArrayXd& f = budget->total.grid.hz();
        c1_profile.knots_hz.assign(f.data(), f.data() + f.size());
        const Eigen::ArrayXd v = budget->total.values * v_per_m;
        c1_profile.asd.assign(v.data(), v.data() + v.size());
    } else {
        c1_profile = scaled(sig.cavity_signal.profile, scale_for(sig.cavity_signal.unit, v_per_hz, v_per_m));
    }

    SignalModel model;
    model.cavity_signal = c1_profile;
    model.frequency_noise = scaled(sig.frequency_noise.profile, scale_for(sig.frequency_noise.unit, v_per_hz, v_per_m));
    const double shot = sig.shot_noise.asd_v_per_rtHz
                            ? *sig.shot_noise.asd_v_per_rtHz
                            : shot_noise_asd(sig.shot_noise.detected_power_w,
                                             Constants::h * cavity.optical_frequency_hz(),
                                             sig.shot_noise.responsivity_v_per_w);
    model.shot_noise = AsdProfile::flat(shot);
    model.gain_ratio = sig.gain_ratio;
    model.seed = options.seed.value_or(config.seed);
    model.validate();

    CommandResult result;

    // Record: supplied or synthesised.
    std::optional<fs::path> input = options.input;
    if (!input && sig.input_record) input = sig.input_record;
    TimeSeries ch1, ch2;
    if (input) {
        std::tie(ch1, ch2) = read_record(*input).to_series();
    } else {
        std::tie(ch1, ch2) = generate_timeseries(model, sig.sample_rate_hz, sig.duration_s);
        if (config.output.write_record) {
            const bool csv = config.output.record_format == RecordFormat::csv;
            const fs::path name = csv ? "record.csv" : "record.bin";
            emit(result, options, name, encode_record(TwoChannelRecord::from_series(ch1, ch2), config.output.record_format));
        }
    }

    const TwoChannelSpectra spectra = cross_spectra(ch1, ch2, config.welch);
    const Eigen::ArrayXd shot_psd = shot_psd_on(model, spectra.grid);
    const SubtractionResult sub = frequency_noise_subtract(spectra, shot_psd);
    const TwoChannelSpectra truth_spectra = oracle_spectra(model, spectra.grid);
    const Eigen::ArrayXd sigma_v = subtraction_standard_error(truth_spectra, shot_psd, spectra.effective_averages);

    const NoiseSpectrum recovered_m = hz_to_meters(volts_to_hz(sub.c1_spectrum(), cal), cavity.length_m, cavity.wavelength_m);
    const Eigen::ArrayXd& f = spectra.grid.hz();
    const Eigen::ArrayXd truth_m = c1_profile.at(f) / v_per_m;
    const Eigen::ArrayXd sigma_m = sigma_v / v_per_m;

    // Analysis band: the configured grid if any, else every bin.
    double f_lo = f[0], f_hi = f[f.size() - 1];
    if (config.grid) {
        f_lo = config.grid->f_min_hz;
        f_hi = config.grid->f_max_hz;
    }
    std::vector<Eigen::Index> rows;
    for (Eigen::Index i = 0; i < f.size(); ++i)
        if (f[i] >= f_lo && f[i] <= f_hi) rows.push_back(i);
    if (rows.empty()) throw ValidationError("no Welch bins fall inside the analysis grid", "grid.f_min_hz");

    const std::optional<Oscillator> osc = config.oscillator;
    CsvTable table{std::string(schema::calibration),
                   {"frequency_hz", "truth_asd_m_per_rtHz", "recovered_asd_m_per_rtHz", "sigma_asd_m_per_rtHz",
                    "sql_asd_m_per_rtHz", "flag"},
                   Eigen::MatrixXd(static_cast<Eigen::Index>(rows.size()), 6)};
    Eigen::Index unflagged = 0, within = 0;
    double max_rel = 0.0;
    std::map<BinFlag, Eigen::Index> flag_counts{
        {BinFlag::ok, 0}, {BinFlag::coherence_floor, 0}, {BinFlag::nonphysical_negative, 0}};
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const Eigen::Index i = rows[r];
        const auto row = static_cast<Eigen::Index>(r);
        const double sql = osc ? free_mass_sql_asd(osc->mass_kg, two_pi<double> * f[i])
                               : std::numeric_limits<double>::quiet_NaN();
        table.data.row(row) << f[i], truth_m[i], recovered_m.values[i], sigma_m[i], sql,
            static_cast<double>(sub.flags[static_cast<std::size_t>(i)]);
        ++flag_counts[sub.flags[static_cast<std::size_t>(i)]];
        if (sub.flags[static_cast<std::size_t>(i)] != BinFlag::ok) continue;
        ++unflagged;
        const double err = std::abs(recovered_m.values[i] - truth_m[i]);
        if (truth_m[i] > 0) max_rel = std::max(max_rel, err / truth_m[i]);
        if (err <= 3.0 * sigma_m[i]) ++within;
    }
    write_table(result, options, "calibration", table);

    // Exact-spectra path on the same bins: no estimator noise, so recovery
    // should be limited by rounding only.
    const SubtractionResult exact = frequency_noise_subtract(truth_spectra, shot_psd);
    double exact_rel = 0.0;
    for (Eigen::Index i : rows) {
        const double t = c1_profile.at(f[i]);
        if (exact.flags[static_cast<std::size_t>(i)] == BinFlag::ok && t > 0)
            exact_rel = std::max(exact_rel, std::abs(exact.c1_asd[i] - t) / t);
    }

    ojson summary{{"schema", "optomech.calibration_summary/1"},
                  {"command", "calibrate-demo"},
                  {"seed", model.seed},
                  {"source", input ? "record" : "synthetic"},
                  {"sample_rate_hz", ch1.sample_rate_hz},
                  {"samples", ch1.samples.size()},
                  {"welch",
                   {{"segment_length", config.welch.segment_length},
                    {"averages", spectra.n_averages},
                    {"effective_averages", spectra.effective_averages},
                    {"resolution_hz", ch1.sample_rate_hz / static_cast<double>(config.welch.segment_length)}}},
                  {"fringe",
                   {{"offset_v", cal.offset_v},
                    {"amplitude_v", cal.amplitude_v},
                    {"delay_s", cal.delay_s},
                    {"lock_v", cal.lock_v},
                    {"volts_per_hz", v_per_hz},
                    {"volts_per_meter", v_per_m}}},
                  {"analysis_band_hz", {f_lo, f_hi}},
                  {"bins", rows.size()},
                  {"unflagged_bins", unflagged},
                  {"flags",
                   {{"ok", flag_counts[BinFlag::ok]},
                    {"coherence_floor", flag_counts[BinFlag::coherence_floor]},
                    {"nonphysical_negative", flag_counts[BinFlag::nonphysical_negative]}}},
                  {"coherence_floor", sub.coherence_floor},
                  {"max_relative_error", unflagged ? ojson(max_rel) : ojson(nullptr)},
                  {"fraction_within_3sigma",
                   unflagged ? ojson(static_cast<double>(within) / static_cast<double>(unflagged)) : ojson(nullptr)},
                  {"exact_path_max_relative_error", exact_rel}};

    // Sub-SQL check at the spring frequency, averaged over +-1% in frequency.
    if (budget && budget->spring && osc) {
        const double f_os = budget->spring->angular_frequency / two_pi<double>;
        double rec = 0.0, tru = 0.0, sql = 0.0;
        Eigen::Index count = 0;
        for (Eigen::Index i : rows) {
            if (std::abs(f[i] - f_os) > 0.01 * f_os || sub.flags[static_cast<std::size_t>(i)] != BinFlag::ok)
                continue;
            rec += recovered_m.values[i] * recovered_m.values[i];
            tru += truth_m[i] * truth_m[i];
            const double s = free_mass_sql_asd(osc->mass_kg, two_pi<double> * f[i]);
            sql += s * s;
            ++count;
        }
        ojson at{{"frequency_hz", f_os}, {"bins", count}};
        at["recovered_ratio_db"] = count ? ojson(10.0 * std::log10(rec / sql)) : ojson(nullptr);
        at["truth_ratio_db"] = count ? ojson(10.0 * std::log10(tru / sql)) : ojson(nullptr);
        at["budget_ratio_db"] = interpolate_log(budget->ratio_to_sql.grid, budget->ratio_to_sql.values, f_os);
        summary["at_spring_frequency"] = at;
    }
    summary["uncertainty"] = uncertainty_json(config.uncertainty);
    summary["files"] = ojson::array();
    for (const auto& fl : result.files) summary["files"].push_back(fl.generic_string());
    result.summary = std::move(summary);
    emit(result, options, "calibration_summary.json", dump(result.summary));
    return result;
}

CommandResult cmd_fringe_fit(const RunConfig& config, const CommandOptions& options) {
    const FringeSpec& fringe = config.require_fringe();
    std::optional<fs::path> file = options.input;
    if (!file) file = fringe.sweep_file;
    if (!file) throw ValidationError("no fringe sweep file: set fringe.sweep_file or pass --input", "fringe.sweep_file");

    const FringeSweep sweep = read_fringe_sweep(*file);
    const FringeFit fit = fit_fringe(sweep);
    const FringeCalibration cal{fit.offset_v, fit.amplitude_v, fringe.delay_s, fringe.lock_v};
    cal.validate();
    check_operating_point(cal);

    CommandResult result;
    result.summary = {{"schema", "optomech.fringe_calibration/1"},
                      {"command", "fringe-fit"},
                      {"offset_v", cal.offset_v},
                      {"amplitude_v", cal.amplitude_v},
                      {"delay_s", cal.delay_s},
                      {"lock_v", cal.lock_v},
                      {"operating_phase_rad", operating_phase(cal)},
                      {"slope_v_s_per_rad", fringe_slope(cal)},
                      {"volts_per_hz", std::abs(fringe_slope(cal)) * two_pi<double>},
                      {"fit",
                       {{"residual_rms_v", fit.residual_rms_v},
                        {"fringes_covered", fit.fringes_covered},
                        {"phase_per_drive", fit.phase_per_drive},
                        {"phase_offset", fit.phase_offset},
                        {"samples", sweep.drive.size()}}}};
    emit(result, options, "fringe_calibration.json", dump(result.summary));
    return result;
}

// ---------------------------------------------------------------------------

namespace {

void report_error(std::ostream& err, std::string_view kind, const std::string& message, const std::string& field = {}) {
    ojson e{{"kind", kind}, {"message", message}};
    if (!field.empty()) e["field"] = field;
    err << ojson{{"error", e}}.dump() << "\n";
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Optomechanical noise budgets, detuning sweeps and delay-line calibration"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::string format = "csv";
    std::string input;

    app.add_option("--config", config_path, "Run configuration (JSON)")->required();
    app.add_option("--out", out_dir, "Output directory");
    app.add_option("--seed", seed, "Seed override for stochastic commands");
    app.add_option("--format", format, "Spectra format")->check(CLI::IsMember({"csv", "json"}));

    auto* budget = app.add_subcommand("budget", "Quantum and thermal noise budget against the SQL");
    auto* sweep = app.add_subcommand("sweep", "Budgets at a list of optical-spring frequencies");
    auto* demo = app.add_subcommand("calibrate-demo", "Synthetic two-detector calibration end to end");
    auto* fringe = app.add_subcommand("fringe-fit", "Delay-line fringe calibration from a sweep file");
    for (auto* sub : {budget, sweep, demo, fringe}) sub->fallthrough();
    demo->add_option("--input", input, "Two-channel record to analyse instead of synthesising one");
    fringe->add_option("--input", input, "Fringe sweep CSV (overrides fringe.sweep_file)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        report_error(err, "usage", e.what());
        return 2;
    }

    try {
        const RunConfig config = load_config(config_path);
        CommandOptions options;
        options.out_dir = out_dir;
        options.seed = seed;
        options.format = format == "json" ? OutputFormat::json : OutputFormat::csv;
        if (!input.empty()) options.input = fs::path(input);

        CommandResult result;
        if (*budget)
            result = cmd_budget(config, options);
        else if (*sweep)
            result = cmd_sweep(config, options);
        else if (*demo)
            result = cmd_calibrate_demo(config, options);
        else
            result = cmd_fringe_fit(config, options);

        for (const auto& w : result.warnings) err << ojson{{"warning", w}}.dump() << "\n";
        out << result.summary.dump(2) << "\n";
        return 0;
    } catch (const ValidationError& e) {
        report_error(err, "validation", e.what(), e.field());
        return 2;
    } catch (const DomainError& e) {
        report_error(err, "domain", e.what());
        return 1;
    } catch (const IoError& e) {
        report_error(err, "io", e.what());
        return 1;
    } catch (const std::exception& e) {
        report_error(err, "runtime", e.what());
        return 1;
    }
}

}  // namespace optomech
