#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <json.hpp>
#include <limits>

#include "optomech/config.hpp"
#include "optomech/errors.hpp"
#include "optomech/io.hpp"

using namespace optomech;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / "optomech_io_test" / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

nlohmann::json base_config() {
    return nlohmann::json::parse(read_file(fs::path(OPTOMECH_SOURCE_DIR) / "configs" / "sub_sql_71mW.json"));
}

std::string field_of(const nlohmann::json& j) {
    try {
        parse_config(j.dump());
    } catch (const ValidationError& e) {
        return e.field();
    }
    return "<accepted>";
}

}  // namespace

TEST_CASE("number formatting round-trips") {
    for (double v : {0.0, 1.0, -2.5, 0.1, 1e-300, 6.02214076e23, 3.549e-17, M_PI}) {
        CHECK(std::stod(format_number(v)) == v);
    }
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(std::numeric_limits<double>::quiet_NaN()) == "nan");
    CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");
}

TEST_CASE("CSV round trip and schema checks") {
    CsvTable t{std::string(schema::budget), {"a", "b"}, Eigen::MatrixXd(3, 2)};
    t.data << 1.0, 0.1, 1e-18, std::numeric_limits<double>::quiet_NaN(), -3.0, 7.25;
    const std::string text = to_csv(t);
    CHECK(text.rfind("# schema: optomech.budget/1\na,b\n", 0) == 0);

    const auto back = parse_csv(text, schema::budget);
    CHECK(back.columns == t.columns);
    CHECK(back.data(0, 1) == 0.1);
    CHECK(back.data(1, 0) == 1e-18);
    CHECK(std::isnan(back.data(1, 1)));
    CHECK(back.column("b") == 1);
    CHECK_THROWS_AS(back.column("c"), IoError);

    CHECK_THROWS_AS(parse_csv(text, schema::calibration), IoError);
    CHECK_THROWS_AS(parse_csv("a,b\n1,2\n", schema::budget), IoError);
    CHECK_THROWS_AS(parse_csv("# schema: optomech.budget/1\na,b\n1\n", schema::budget), IoError);
    CHECK_THROWS_AS(parse_csv("# schema: optomech.budget/1\na,b\n1,x\n", schema::budget), IoError);

    const fs::path dir = scratch("csv");
    write_file_atomic(dir / "sub" / "t.csv", text);
    CHECK(read_csv(dir / "sub" / "t.csv", schema::budget).data.rows() == 3);
    CHECK_FALSE(fs::exists(dir / "sub" / "t.csv.tmp"));
    CHECK_THROWS_AS(read_file(dir / "missing.csv"), IoError);
}

TEST_CASE("two-channel records") {
    const Eigen::Index n = 257;
    const Eigen::ArrayXd t = Eigen::ArrayXd::LinSpaced(n, 0, n - 1) / 1e6;
    const TimeSeries a{(t * 1e4).sin() * 1e-3, 1e6, "ch1"};
    const TimeSeries b{(t * 3e4).cos() + 1.0 / 3.0, 1e6, "ch2"};
    const auto rec = TwoChannelRecord::from_series(a, b);
    CHECK(rec.t_s[1] == doctest::Approx(1e-6));

    const std::string bin = encode_record(rec, RecordFormat::binary);
    CHECK(bin.size() == 16 + static_cast<std::size_t>(n) * 24);
    CHECK(bin.substr(0, 16) == std::string(kRecordMagic, 16));

    const fs::path dir = scratch("record");
    for (auto format : {RecordFormat::binary, RecordFormat::csv}) {
        const fs::path p = dir / (format == RecordFormat::binary ? "r.bin" : "r.csv");
        write_record(p, rec, format);
        const auto back = read_record(p);
        CHECK((back.t_s == rec.t_s).all());
        CHECK((back.ch1_v == rec.ch1_v).all());
        CHECK((back.ch2_v == rec.ch2_v).all());
        const auto [x, y] = back.to_series();
        CHECK(x.sample_rate_hz == doctest::Approx(1e6).epsilon(1e-9));
        CHECK(y.samples.size() == n);
    }

    write_file_atomic(dir / "short.bin", std::string(kRecordMagic, 16) + std::string(10, '\0'));
    CHECK_THROWS_AS(read_record(dir / "short.bin"), IoError);
}

TEST_CASE("fringe sweep files") {
    const fs::path dir = scratch("fringe");
    FringeSweep s{Eigen::ArrayXd::LinSpaced(5, 0, 1), Eigen::ArrayXd::LinSpaced(5, 1, 3)};
    write_fringe_sweep(dir / "s.csv", s);
    const auto back = read_fringe_sweep(dir / "s.csv");
    CHECK((back.drive == s.drive).all());
    CHECK((back.volts == s.volts).all());

    const auto shipped = read_fringe_sweep(fs::path(OPTOMECH_SOURCE_DIR) / "configs" / "fringe_sweep.csv");
    CHECK(shipped.drive.size() == 1200);
}

TEST_CASE("shipped configs parse") {
    for (const char* name : {"sub_sql_71mW.json", "calibrate_demo.json", "zero_temperature_optimal.json", "fringe_fit.json"}) {
        CAPTURE(name);
        CHECK_NOTHROW(load_config(fs::path(OPTOMECH_SOURCE_DIR) / "configs" / name));
    }
    const auto c = load_config(fs::path(OPTOMECH_SOURCE_DIR) / "configs" / "sub_sql_71mW.json");
    CHECK(c.seed == 20170601u);
    CHECK(c.require_oscillator().resonance_rad_s == doctest::Approx(2 * M_PI * 876.0));
    CHECK(c.require_cavity().hold == PowerHold::circulating_power);
    CHECK(circulating_power(c.require_cavity().cavity) == doctest::Approx(0.071));
    CHECK(c.require_grid().build().size() == 2000);
    CHECK(c.require_sweep().targets_hz.size() == 4);
    CHECK_THROWS_AS(c.require_signal(), ValidationError);

    const auto f = load_config(fs::path(OPTOMECH_SOURCE_DIR) / "configs" / "fringe_fit.json");
    CHECK(f.require_fringe().delay_s == doctest::Approx(2 / 4.09e6));
    CHECK(f.require_fringe().sweep_file->is_absolute());
}

TEST_CASE("config validation names the field") {
    auto j = base_config();
    j["cavity"]["lenght_m"] = 1.0;
    CHECK(field_of(j) == "cavity.lenght_m");

    j = base_config();
    j["oscillator"].erase("mass_kg");
    CHECK(field_of(j) == "oscillator.mass_kg");
    try {
        parse_config(j.dump());
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("oscillator.mass_kg") != std::string::npos);
    }

    j = base_config();
    j["oscillator"]["mass_kg"] = "heavy";
    CHECK(field_of(j) == "oscillator.mass_kg");

    j = base_config();
    j["oscillator"]["mass_kg"] = -1.0;
    CHECK(field_of(j) == "oscillator.mass_kg");

    j = base_config();
    j["cavity"]["input_power_w"] = 1e-5;
    CHECK(field_of(j).rfind("cavity.", 0) == 0);

    j = base_config();
    j["schema"] = "optomech.config/2";
    CHECK(field_of(j) == "schema");

    j = base_config();
    j["seed"] = -3;
    CHECK(field_of(j) == "seed");

    j = base_config();
    j["grid"]["spacing"] = "cubic";
    CHECK(field_of(j) == "grid.spacing");

    j = base_config();
    j["surprise"] = {};
    CHECK(field_of(j) == "surprise");

    CHECK_THROWS_AS(parse_config("{ not json"), ValidationError);
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ValidationError);
}

TEST_CASE("uncertainty annotations") {
    UncertaintyAnnotations u;
    CHECK_NOTHROW(u.validate());
    CHECK(std::hypot(u.calibration_repeatability, u.sql_mass_fraction) == doctest::Approx(u.total).epsilon(0.01));
    u.total = 0.06;
    CHECK_THROWS_AS(u.validate(), ValidationError);

    auto j = base_config();
    j["uncertainty"] = {{"calibration_repeatability", 0.03}, {"sql_mass_fraction", 0.04}, {"total", 0.05}};
    CHECK(parse_config(j.dump()).uncertainty.total == 0.05);
    j["uncertainty"]["total"] = 0.07;
    CHECK(field_of(j).rfind("uncertainty", 0) == 0);
}
