#include <doctest.h>

#include <cmath>
#include <random>

#include "optomech/core.hpp"

using namespace optomech;

namespace {

MechanicalOscillator<double> mirror_50ng() {
    return {50e-12, 2 * M_PI * 876.0, 25000.0, 29.0, DampingModel::structural};
}

CavityConfig<double> cavity_71mW(double transmission = 4.36e-4) {
    CavityConfig<double> c;
    c.length_m = 0.01;
    c.wavelength_m = 1064e-9;
    c.transmission = transmission;
    c.detuning = -3.1;
    c.linewidth_hwhm_hz = 520e3;
    // 71 mW circulating at delta = -3.1
    c.input_power_w = 0.071 * transmission * (1 + 3.1 * 3.1) / 4;
    return c;
}

}  // namespace

TEST_CASE("constants") {
    CHECK(Constants::h == doctest::Approx(2 * M_PI * Constants::hbar).epsilon(1e-12));
    CHECK(Constants::c == 299792458.0);
    CHECK(Constants::k_B == 1.380649e-23);
}

TEST_CASE("oscillator derived quantities and validation") {
    const auto osc = mirror_50ng();
    CHECK(osc.damping_rate() == doctest::Approx(2 * M_PI * 876.0 / 25000.0));
    CHECK(osc.stiffness() == doctest::Approx(50e-12 * std::pow(2 * M_PI * 876.0, 2)));
    CHECK(osc.zero_point_rms() == doctest::Approx(std::sqrt(1.054571817e-34 / (2 * 50e-12 * 2 * M_PI * 876.0))));

    auto bad = osc;
    bad.mass_kg = 0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = osc;
    bad.temperature_k = -1;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = osc;
    bad.temperature_k = 0;
    CHECK_NOTHROW(bad.validate());
}

TEST_CASE("circulating power") {
    auto c = cavity_71mW();
    c.detuning = 0;
    c.input_power_w = 7.74e-6;
    CHECK(circulating_power(c) == doctest::Approx(4 * 7.74e-6 / 4.36e-4));
    CHECK(circulating_power(c) == doctest::Approx(0.071).epsilon(2e-3));
    CHECK(circulating_power(c) == c.max_circulating_power());

    c.detuning = -3.1;
    CHECK(circulating_power(c) == doctest::Approx(c.max_circulating_power() / 10.61));
    CHECK(input_power_for_circulating(circulating_power(c), c.transmission, c.detuning) ==
          doctest::Approx(c.input_power_w));
}

TEST_CASE("transmission from linewidth") {
    // FSR = c / 2L = 14.99 GHz, FWHM = 1.04 MHz, F = 14413, T = 2 pi / F
    const double t = transmission_from_linewidth(0.01, 520e3);
    CHECK(t == doctest::Approx(4.36e-4).epsilon(1e-3));
}

TEST_CASE("optical spring constant") {
    auto c = cavity_71mW();
    // hand evaluation: 32 pi 3.1 0.071 / (1.064e-6 c 4.36e-4 10.61) = 14.99 N/m
    CHECK(optical_spring_constant(c) == doctest::Approx(15.0).epsilon(0.01));

    c.detuning = 0;
    CHECK(optical_spring_constant(c) == 0.0);

    c = cavity_71mW();
    c.detuning = 3.1;
    CHECK(optical_spring_constant(c) < 0);

    for (double d : {-10.0, -2.0, -0.3, 0.0, 0.3, 2.0, 10.0}) {
        c.detuning = d;
        CHECK(optical_spring_constant(c) * d <= 0);
    }
}

TEST_CASE("optical spring frequency") {
    const auto osc = mirror_50ng();
    CHECK(optical_spring_frequency(0.0, osc) == doctest::Approx(osc.resonance_rad_s));
    CHECK_THROWS_AS(optical_spring_frequency(-2 * osc.stiffness(), osc), DomainError);

    const double k = optical_spring_constant(cavity_71mW());
    const double f = optical_spring_frequency(k, osc) / (2 * M_PI);
    CHECK(f > 67e3 / 1.4);
    CHECK(f < 67e3 * 1.4);

    const double exact = optical_spring_frequency(k, osc);
    const double approx = optical_spring_frequency(k, osc, SpringForm::approximate);
    CHECK(std::abs(exact - approx) / exact < osc.stiffness() / (2 * k));

    const auto state = optical_spring_state(cavity_71mW(), osc, std::optional<double>(1.5e4));
    REQUIRE(state.quality_factor);
    CHECK(*state.quality_factor == doctest::Approx(state.angular_frequency / 1.5e4));
    CHECK_FALSE(optical_spring_state(cavity_71mW(), osc).quality_factor.has_value());
}

TEST_CASE("susceptibility") {
    const auto osc = mirror_50ng();
    const auto dc = susceptibility(osc, 0.0);
    CHECK(dc.real() == doctest::Approx(1 / osc.stiffness()));
    CHECK(dc.imag() == 0.0);
    CHECK(std::abs(susceptibility(osc, osc.resonance_rad_s)) ==
          doctest::Approx(osc.quality_factor / osc.stiffness()));

    const double w = 11 * std::sqrt(osc.quality_factor) * osc.resonance_rad_s;
    CHECK(std::abs(susceptibility(osc, w)) * osc.mass_kg * w * w == doctest::Approx(1.0).epsilon(0.01));

    const auto a = susceptibility(osc.mass_kg, osc.resonance_rad_s, osc.damping_rate(), 1234.0);
    const auto b = susceptibility(osc.mass_kg, osc.resonance_rad_s, -osc.damping_rate(), 1234.0);
    CHECK(a == std::conj(b));
    CHECK(std::abs(susceptibility(osc, 1234.0)) == std::abs(susceptibility(osc, -1234.0)));
}

TEST_CASE("imprecision, back-action and the uncertainty product") {
    const auto osc = mirror_50ng();
    const double hbar = Constants::hbar;
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> logu(-3, 9);
    for (int i = 0; i < 100; ++i) {
        const MeasurementModel<double> m{std::pow(10.0, logu(gen)), osc};
        CHECK(imprecision_psd(m) * backaction_psd(m) / (hbar * hbar / 4) == doctest::Approx(1.0).epsilon(1e-12));
    }
    const MeasurementModel<double> m1{100.0, osc}, m2{200.0, osc};
    CHECK(imprecision_psd(m2) == doctest::Approx(imprecision_psd(m1) / 2));
    CHECK(backaction_psd(m2) == doctest::Approx(backaction_psd(m1) * 2));

    const double w0 = osc.resonance_rad_s;
    const MeasurementModel<double> opt{optimal_measurement_rate(osc, w0), osc};
    const double chi = std::abs(susceptibility(osc, w0));
    CHECK(imprecision_psd(opt) == doctest::Approx(hbar * chi / 2));
    CHECK(chi * chi * backaction_psd(opt) == doctest::Approx(hbar * chi / 2));
    const double x = osc.zero_point_rms();
    CHECK(opt.measurement_rate == doctest::Approx(x * x * osc.mass_kg * osc.damping_rate() * w0 / (2 * hbar)));
}

TEST_CASE("quantum noise and the SQL") {
    const auto osc = mirror_50ng();
    const double hbar = Constants::hbar;
    for (double w : {0.3 * osc.resonance_rad_s, osc.resonance_rad_s, 40 * osc.resonance_rad_s}) {
        const double g = optimal_measurement_rate(osc, w);
        const double sql = sql_psd(osc, w);
        CHECK(quantum_noise_psd(MeasurementModel<double>{g, osc}, w) == doctest::Approx(sql).epsilon(1e-12));
        CHECK(quantum_noise_psd(MeasurementModel<double>{2 * g, osc}, w) == doctest::Approx(1.25 * sql));
        CHECK(quantum_noise_psd(MeasurementModel<double>{g / 2, osc}, w) == doctest::Approx(1.25 * sql));
        for (int k = -40; k <= 40; ++k) {
            const MeasurementModel<double> m{g * std::pow(10.0, k / 10.0), osc};
            CHECK(quantum_noise_psd(m, w) >= sql * (1 - 1e-12));
        }
        CHECK(sql == doctest::Approx(hbar * std::abs(susceptibility(osc, w))));
    }
    const double w = 1e3 * osc.resonance_rad_s;
    CHECK(sql_psd(osc, w) == doctest::Approx(hbar / (osc.mass_kg * w * w)).epsilon(1e-5));
    double prev = sql_psd(osc, 1.01 * osc.resonance_rad_s);
    for (int i = 2; i < 200; ++i) {
        const double cur = sql_psd(osc, (1 + 0.05 * i) * osc.resonance_rad_s);
        CHECK(cur < prev);
        prev = cur;
    }
}

TEST_CASE("free-mass SQL") {
    const double w = 2 * M_PI * 62.2e3;
    CHECK(free_mass_sql_asd(5.0e-11, w) == doctest::Approx(5.26e-18).epsilon(0.01));
    CHECK(free_mass_sql_asd(4 * 5.0e-11, w) == doctest::Approx(free_mass_sql_asd(5.0e-11, w) / 2));
    CHECK(free_mass_sql_asd(5.0e-11, w) / free_mass_sql_asd(5.0e-11, 2 * w) == doctest::Approx(2.0));
    CHECK_THROWS_AS(free_mass_sql_asd(0.0, w), ValidationError);
}

TEST_CASE("back-action to SQL ratio at the spring frequency") {
    const auto osc = mirror_50ng();
    for (double d : {-3.1, -1.0, -4.0}) {
        auto c = cavity_71mW();
        c.detuning = d;
        CHECK(backaction_to_sql_ratio_at_spring(c, osc) == doctest::Approx(std::sqrt(-1 / d)).epsilon(1e-10));
    }
    auto c = cavity_71mW();
    CHECK(20 * std::log10(backaction_to_sql_ratio_at_spring(c, osc)) == doctest::Approx(-4.91).epsilon(1e-3));
    c.detuning = 0.0;
    CHECK_THROWS_AS(backaction_to_sql_ratio_at_spring(c, osc), DomainError);
    c.detuning = 1.0;
    CHECK_THROWS_AS(backaction_to_sql_ratio_at_spring(c, osc), DomainError);
    CHECK_THROWS_AS(backaction_to_sql_ratio(cavity_71mW(), osc, 0.0), ValidationError);
}

TEST_CASE("radiation-pressure force PSD") {
    const auto c = cavity_71mW();
    const double f = Constants::c / c.wavelength_m;
    const double expected = std::pow(2 * circulating_power(c) / Constants::c, 2) * 2 * Constants::h * f / c.input_power_w;
    CHECK(radiation_pressure_force_psd(c) == doctest::Approx(expected));
}

TEST_CASE("thermal noise") {
    auto osc = mirror_50ng();
    const double w0 = osc.resonance_rad_s;
    const double kb = Constants::k_B;

    osc.damping = DampingModel::viscous;
    CHECK(thermal_noise_psd(osc, w0) ==
          doctest::Approx(4 * kb * osc.temperature_k * osc.quality_factor / (osc.mass_kg * w0 * w0 * w0)));
    const double viscous = thermal_noise_psd(osc, w0);
    osc.damping = DampingModel::structural;
    CHECK(thermal_noise_psd(osc, w0) == doctest::Approx(viscous));
    CHECK_THROWS_AS(thermal_noise_psd(osc, 0.0), ValidationError);

    osc.temperature_k = 0;
    for (double w : {10.0, w0, 1e6}) CHECK(thermal_noise_psd(osc, w) == 0.0);
}

TEST_CASE("cavity validation") {
    auto c = cavity_71mW();
    CHECK_NOTHROW(c.validate());
    c.transmission = 1.0;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = cavity_71mW();
    c.input_power_w = 0;
    CHECK_THROWS_AS(c.validate(), ValidationError);
}
