#include "optomech/config.hpp"

#include <cmath>
#include <json.hpp>
#include <set>
#include <sstream>

#include "optomech/errors.hpp"

namespace optomech {

using json = nlohmann::json;

namespace {

// Object with a dotted path; records which keys were read so that leftovers
// can be rejected.
class Section {
public:
    Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
        if (!node_.is_object()) throw ValidationError(where() + " must be an object", path_);
    }

    std::string field(std::string_view key) const {
        return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
    }

    bool has(std::string_view key) const { return node_.contains(std::string(key)); }

    const json* find(std::string_view key) {
        const auto it = node_.find(std::string(key));
        if (it == node_.end()) return nullptr;
        used_.insert(std::string(key));
        return &*it;
    }

    const json& require(std::string_view key) {
        const json* v = find(key);
        if (!v) throw ValidationError("missing required field '" + field(key) + "'", field(key));
        return *v;
    }

    double number(std::string_view key) { return as_number(require(key), key); }

    std::optional<double> opt_number(std::string_view key) {
        const json* v = find(key);
        if (!v) return std::nullopt;
        return as_number(*v, key);
    }

    double number_or(std::string_view key, double fallback) { return opt_number(key).value_or(fallback); }

    std::optional<std::string> opt_string(std::string_view key) {
        const json* v = find(key);
        if (!v) return std::nullopt;
        if (!v->is_string()) throw ValidationError(field(key) + " must be a string", field(key));
        return v->get<std::string>();
    }

    std::optional<bool> opt_bool(std::string_view key) {
        const json* v = find(key);
        if (!v) return std::nullopt;
        if (!v->is_boolean()) throw ValidationError(field(key) + " must be true or false", field(key));
        return v->get<bool>();
    }

    std::vector<double> numbers(std::string_view key) {
        const json& v = require(key);
        if (!v.is_array()) throw ValidationError(field(key) + " must be an array of numbers", field(key));
        std::vector<double> out;
        for (const json& e : v) out.push_back(as_number(e, key));
        return out;
    }

    Section child(std::string_view key) { return Section(require(key), field(key)); }

    void finish() const {
        for (auto it = node_.begin(); it != node_.end(); ++it) {
            if (!used_.count(it.key()))
                throw ValidationError("unknown key '" + field(it.key()) + "'", field(it.key()));
        }
    }

    double as_number(const json& v, std::string_view key) const {
        if (!v.is_number()) throw ValidationError(field(key) + " must be a number", field(key));
        const double x = v.get<double>();
        if (!std::isfinite(x)) throw ValidationError(field(key) + " must be finite", field(key));
        return x;
    }

private:
    std::string where() const { return path_.empty() ? "config" : "'" + path_ + "'"; }

    const json& node_;
    std::string path_;
    std::set<std::string> used_;
};

template <typename Enum>
Enum choose(Section& s, std::string_view key, Enum fallback,
            std::initializer_list<std::pair<std::string_view, Enum>> options) {
    const auto value = s.opt_string(key);
    if (!value) return fallback;
    for (const auto& [name, e] : options)
        if (*value == name) return e;
    std::string allowed;
    for (const auto& [name, e] : options) allowed += (allowed.empty() ? "" : ", ") + std::string(name);
    throw ValidationError(s.field(key) + ": '" + *value + "' is not one of " + allowed, s.field(key));
}

CavitySpec parse_cavity(Section s) {
    CavitySpec spec;
    Cavity& c = spec.cavity;
    c.length_m = s.number("length_m");
    c.wavelength_m = s.number("wavelength_m");
    c.linewidth_hwhm_hz = s.number("linewidth_hwhm_hz");
    c.detuning = s.number("detuning");
    if (!(c.length_m > 0)) throw ValidationError("cavity length must be > 0", "cavity.length_m");
    if (!(c.linewidth_hwhm_hz > 0)) throw ValidationError("linewidth must be > 0", "cavity.linewidth_hwhm_hz");

    const json& t = s.require("transmission");
    if (t.is_string() && t.get<std::string>() == "from_linewidth") {
        c.transmission = transmission_from_linewidth(c.length_m, c.linewidth_hwhm_hz);
        spec.transmission_inferred = true;
    } else {
        if (!t.is_number())
            throw ValidationError("cavity.transmission must be a number or \"from_linewidth\"", "cavity.transmission");
        c.transmission = s.as_number(t, "transmission");
    }

    const bool has_in = s.has("input_power_w");
    const bool has_circ = s.has("circulating_power_w");
    if (has_in == has_circ)
        throw ValidationError("cavity needs exactly one of input_power_w or circulating_power_w",
                              "cavity.input_power_w");
    if (has_in) {
        c.input_power_w = s.number("input_power_w");
        spec.hold = PowerHold::input_power;
    } else {
        const double pc = s.number("circulating_power_w");
        if (!(pc > 0)) throw ValidationError("circulating power must be > 0", "cavity.circulating_power_w");
        c.input_power_w = input_power_for_circulating(pc, c.transmission, c.detuning);
        spec.hold = PowerHold::circulating_power;
    }
    s.finish();
    c.validate();
    return spec;
}

Oscillator parse_oscillator(Section s) {
    Oscillator o;
    o.mass_kg = s.number("mass_kg");
    o.resonance_rad_s = two_pi<double> * s.number("resonance_hz");
    o.quality_factor = s.number("quality_factor");
    o.temperature_k = s.number("temperature_k");
    o.damping = choose(s, "damping", DampingModel::structural,
                       {{"structural", DampingModel::structural}, {"viscous", DampingModel::viscous}});
    s.finish();
    o.validate();
    return o;
}

GridSpec parse_grid(Section s) {
    GridSpec g;
    g.f_min_hz = s.number("f_min_hz");
    g.f_max_hz = s.number("f_max_hz");
    const double points = s.number("points");
    if (!(points >= 2) || points != std::floor(points))
        throw ValidationError("grid.points must be an integer >= 2", "grid.points");
    g.points = static_cast<Eigen::Index>(points);
    g.logarithmic = choose(s, "spacing", true, {{"log", true}, {"linear", false}});
    s.finish();
    g.build();
    return g;
}

BudgetOptions parse_budget(Section s) {
    BudgetOptions b;
    b.dynamics = choose(s, "dynamics", Dynamics::optical_spring,
                        {{"optical_spring", Dynamics::optical_spring}, {"mechanical", Dynamics::mechanical}});
    b.sql_reference = choose(s, "sql_reference", SqlReference::automatic,
                             {{"auto", SqlReference::automatic},
                              {"resonant", SqlReference::resonant},
                              {"free_mass", SqlReference::free_mass}});
    if (const json* r = s.find("measurement_rate_rad_s")) {
        if (r->is_number()) {
            const double rate = s.as_number(*r, "measurement_rate_rad_s");
            if (!(rate > 0)) throw ValidationError("measurement rate must be > 0", "budget.measurement_rate_rad_s");
            b.rate = MeasurementRate::fixed(rate);
        } else if (r->is_string() && r->get<std::string>() == "auto") {
            b.rate = MeasurementRate::automatic();
        } else if (r->is_string() && r->get<std::string>() == "optimal") {
            b.rate = MeasurementRate::optimal();
        } else {
            throw ValidationError("budget.measurement_rate_rad_s must be a number, \"auto\" or \"optimal\"",
                                  "budget.measurement_rate_rad_s");
        }
    }
    b.optical_damping_rad_s = s.opt_number("optical_damping_rad_s");
    if (b.optical_damping_rad_s && !(*b.optical_damping_rad_s > 0))
        throw ValidationError("optical damping must be > 0", "budget.optical_damping_rad_s");
    s.finish();
    return b;
}

SweepSpec parse_sweep(Section s, PowerHold default_hold) {
    SweepSpec sw;
    sw.targets_hz = s.numbers("targets_hz");
    for (double t : sw.targets_hz)
        if (!(t > 0)) throw ValidationError("sweep targets must be > 0", "sweep.targets_hz");
    sw.search.branch =
        choose(s, "branch", SpringBranch::far, {{"far", SpringBranch::far}, {"near", SpringBranch::near}});
    sw.search.hold = choose(s, "hold", default_hold,
                            {{"input_power", PowerHold::input_power},
                             {"circulating_power", PowerHold::circulating_power}});
    s.finish();
    return sw;
}

FringeSpec parse_fringe(Section s, const std::filesystem::path& base) {
    FringeSpec f;
    f.offset_v = s.opt_number("offset_v");
    f.amplitude_v = s.opt_number("amplitude_v");
    if (f.amplitude_v && !(*f.amplitude_v > 0))
        throw ValidationError("fringe amplitude B must be > 0", "fringe.amplitude_v");
    const auto null_hz = s.opt_number("null_frequency_hz");
    const auto delay = s.opt_number("delay_s");
    if (null_hz.has_value() == delay.has_value())
        throw ValidationError("fringe needs exactly one of null_frequency_hz or delay_s", "fringe.null_frequency_hz");
    f.delay_s = null_hz ? tau_from_null(*null_hz) : *delay;
    if (!(f.delay_s > 0)) throw ValidationError("delay must be > 0", "fringe.delay_s");
    f.lock_v = s.number("lock_v");
    if (const auto file = s.opt_string("sweep_file")) f.sweep_file = base / *file;
    s.finish();
    if (f.offset_v && f.amplitude_v) f.calibration().validate();
    return f;
}

ProfileSpec parse_profile(Section s, bool allow_budget) {
    ProfileSpec p;
    if (const auto source = s.opt_string("source")) {
        if (!allow_budget || *source != "budget")
            throw ValidationError(s.field("source") + ": only \"budget\" is supported here", s.field("source"));
        p.from_budget = true;
        p.unit = ProfileUnit::m_per_rtHz;
        s.finish();
        return p;
    }
    p.profile.knots_hz = s.numbers("knots_hz");
    p.profile.asd = s.numbers("asd");
    p.unit = choose(s, "unit", ProfileUnit::v_per_rtHz,
                    {{"v_per_rtHz", ProfileUnit::v_per_rtHz},
                     {"hz_per_rtHz", ProfileUnit::hz_per_rtHz},
                     {"m_per_rtHz", ProfileUnit::m_per_rtHz}});
    s.finish();
    return p;
}

SignalSpec parse_signal(Section s, const std::filesystem::path& base) {
    SignalSpec sig;
    sig.cavity_signal = parse_profile(s.child("cavity_signal"), true);
    sig.frequency_noise = parse_profile(s.child("frequency_noise"), false);
    if (sig.frequency_noise.unit == ProfileUnit::m_per_rtHz)
        throw ValidationError("frequency noise must be in v_per_rtHz or hz_per_rtHz", "signal.frequency_noise.unit");
    {
        Section sn = s.child("shot_noise");
        sig.shot_noise.asd_v_per_rtHz = sn.opt_number("asd_v_per_rtHz");
        if (!sig.shot_noise.asd_v_per_rtHz) {
            sig.shot_noise.detected_power_w = sn.number("detected_power_w");
            sig.shot_noise.responsivity_v_per_w = sn.number("responsivity_v_per_w");
            if (!(sig.shot_noise.detected_power_w > 0))
                throw ValidationError("detected power must be > 0", "signal.shot_noise.detected_power_w");
        } else if (!(*sig.shot_noise.asd_v_per_rtHz >= 0)) {
            throw ValidationError("shot noise ASD must be >= 0", "signal.shot_noise.asd_v_per_rtHz");
        }
        sn.finish();
    }
    sig.gain_ratio = s.number_or("gain_ratio", 1.0);
    if (!(sig.gain_ratio > 0)) throw ValidationError("gain ratio must be > 0", "signal.gain_ratio");
    sig.sample_rate_hz = s.number("sample_rate_hz");
    sig.duration_s = s.number("duration_s");
    if (!(sig.sample_rate_hz > 0)) throw ValidationError("sample rate must be > 0", "signal.sample_rate_hz");
    if (!(sig.duration_s > 0)) throw ValidationError("duration must be > 0", "signal.duration_s");
    if (const auto rec = s.opt_string("input_record")) sig.input_record = base / *rec;
    s.finish();
    return sig;
}

WelchOptions parse_welch(Section s) {
    WelchOptions w;
    const double seg = s.number_or("segment_length", static_cast<double>(w.segment_length));
    if (!(seg >= 2) || seg != std::floor(seg))
        throw ValidationError("welch.segment_length must be an integer >= 2", "welch.segment_length");
    w.segment_length = static_cast<Eigen::Index>(seg);
    if (const auto ov = s.opt_number("overlap")) {
        if (!(*ov >= 0 && *ov < seg) || *ov != std::floor(*ov))
            throw ValidationError("welch.overlap must be an integer in [0, segment_length)", "welch.overlap");
        w.overlap = static_cast<Eigen::Index>(*ov);
    }
    w.window = choose(s, "window", Window::hann, {{"hann", Window::hann}, {"rectangular", Window::rectangular}});
    s.finish();
    return w;
}

UncertaintyAnnotations parse_uncertainty(Section s) {
    UncertaintyAnnotations u;
    u.calibration_repeatability = s.number_or("calibration_repeatability", u.calibration_repeatability);
    u.sql_mass_fraction = s.number_or("sql_mass_fraction", u.sql_mass_fraction);
    u.total = s.number_or("total", u.total);
    s.finish();
    u.validate();
    return u;
}

OutputSpec parse_output(Section s) {
    OutputSpec o;
    o.write_record = s.opt_bool("write_record").value_or(false);
    o.record_format = choose(s, "record_format", RecordFormat::binary,
                             {{"binary", RecordFormat::binary}, {"csv", RecordFormat::csv}});
    s.finish();
    return o;
}

template <typename T>
const T& required(const std::optional<T>& v, const char* name) {
    if (!v) throw ValidationError(std::string("config has no '") + name + "' section", name);
    return *v;
}

}  // namespace

FrequencyGrid GridSpec::build() const {
    if (!(f_min_hz > 0)) throw ValidationError("grid.f_min_hz must be > 0", "grid.f_min_hz");
    if (!(f_max_hz > f_min_hz)) throw ValidationError("grid.f_max_hz must exceed f_min_hz", "grid.f_max_hz");
    return logarithmic ? FrequencyGrid::logarithmic(f_min_hz, f_max_hz, points)
                       : FrequencyGrid::linear(f_min_hz, f_max_hz, points);
}

FringeCalibration FringeSpec::calibration() const {
    if (!offset_v) throw ValidationError("missing required field 'fringe.offset_v'", "fringe.offset_v");
    if (!amplitude_v) throw ValidationError("missing required field 'fringe.amplitude_v'", "fringe.amplitude_v");
    return {*offset_v, *amplitude_v, delay_s, lock_v};
}

void UncertaintyAnnotations::validate() const {
    for (const auto& [v, name] : {std::pair{calibration_repeatability, "uncertainty.calibration_repeatability"},
                                  std::pair{sql_mass_fraction, "uncertainty.sql_mass_fraction"},
                                  std::pair{total, "uncertainty.total"}}) {
        if (!(v >= 0 && v < 1)) throw ValidationError(std::string(name) + " must lie in [0, 1)", name);
    }
    const double quad = std::hypot(calibration_repeatability, sql_mass_fraction);
    if (std::abs(total - quad) > 5e-4) {
        std::ostringstream msg;
        msg << "uncertainty.total = " << total << " is not the quadrature sum " << quad
            << " of its components (tolerance 5e-4)";
        throw ValidationError(msg.str(), "uncertainty.total");
    }
}

const CavitySpec& RunConfig::require_cavity() const { return required(cavity, "cavity"); }
const Oscillator& RunConfig::require_oscillator() const { return required(oscillator, "oscillator"); }
const GridSpec& RunConfig::require_grid() const { return required(grid, "grid"); }
const SweepSpec& RunConfig::require_sweep() const { return required(sweep, "sweep"); }
const FringeSpec& RunConfig::require_fringe() const { return required(fringe, "fringe"); }
const SignalSpec& RunConfig::require_signal() const { return required(signal, "signal"); }

RunConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("config is not valid JSON: ") + e.what());
    }
    Section s(root, "");
    RunConfig cfg;
    cfg.base_dir = base_dir;

    const auto schema_name = s.opt_string("schema");
    if (!schema_name) throw ValidationError("missing required field 'schema'", "schema");
    if (*schema_name != kConfigSchema)
        throw ValidationError("config schema '" + *schema_name + "' is not supported (expected '" +
                                  std::string(kConfigSchema) + "')",
                              "schema");

    if (const json* seed = s.find("seed")) {
        if (!seed->is_number_unsigned()) throw ValidationError("seed must be a non-negative integer", "seed");
        cfg.seed = seed->get<std::uint64_t>();
    }
    if (s.has("cavity")) cfg.cavity = parse_cavity(s.child("cavity"));
    if (s.has("oscillator")) cfg.oscillator = parse_oscillator(s.child("oscillator"));
    if (s.has("grid")) cfg.grid = parse_grid(s.child("grid"));
    if (s.has("budget")) cfg.budget = parse_budget(s.child("budget"));
    if (s.has("sweep"))
        cfg.sweep = parse_sweep(s.child("sweep"), cfg.cavity ? cfg.cavity->hold : PowerHold::input_power);
    if (s.has("fringe")) cfg.fringe = parse_fringe(s.child("fringe"), base_dir);
    if (s.has("signal")) cfg.signal = parse_signal(s.child("signal"), base_dir);
    if (s.has("welch")) cfg.welch = parse_welch(s.child("welch"));
    if (s.has("uncertainty")) cfg.uncertainty = parse_uncertainty(s.child("uncertainty"));
    if (s.has("output")) cfg.output = parse_output(s.child("output"));
    s.finish();
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const IoError& e) {
        throw ValidationError(std::string("cannot read config: ") + e.what(), "config");
    }
    return parse_config(text, path.parent_path());
}

}  // namespace optomech
