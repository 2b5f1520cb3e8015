#include <doctest.h>

#include <cmath>

#include "optomech/delayline.hpp"
#include "optomech/errors.hpp"
#include "optomech/synth.hpp"

using namespace optomech;

TEST_CASE("fringe model") {
    CHECK(fringe_model(2.0, 1.0, 0.0) == 3.0);
    CHECK(fringe_model(2.0, 1.0, M_PI / 2) == doctest::Approx(2.0));
    CHECK(fringe_model(2.0, 1.0, M_PI) == 1.0);
}

TEST_CASE("delay from the modulation null") {
    // about 100 m of fibre
    const double tau = 4.89e-7;
    CHECK(tau * 299792458.0 / 1.468 == doctest::Approx(100.0).epsilon(2e-3));
    CHECK(2 / tau == doctest::Approx(4.09e6).epsilon(1e-3));
    CHECK(tau_from_null(2 / tau) == doctest::Approx(tau));
    CHECK(tau_from_null(2.0) == 1.0);
    CHECK(tau_from_null(8.0) == tau_from_null(4.0) / 2);
    CHECK_THROWS_AS(tau_from_null(0.0), ValidationError);
}

TEST_CASE("operating phase and slope") {
    const double tau = 4.89e-7;
    CHECK(operating_phase({2.0, 1.0, tau, 2.0}) == doctest::Approx(M_PI / 2));
    CHECK(operating_phase({2.0, 1.0, tau, 3.0}) == 0.0);
    CHECK(operating_phase({2.0, 1.0, tau, 1.5}) == doctest::Approx(2 * M_PI / 3));
    CHECK_THROWS_AS(operating_phase({2.0, 1.0, tau, 3.5}), ValidationError);
    CHECK_THROWS_AS(operating_phase({2.0, 0.0, tau, 2.0}), ValidationError);

    CHECK(std::abs(fringe_slope({2.0, 1.0, tau, 2.0})) == doctest::Approx(4.89e-7));
    CHECK(fringe_slope({2.0, 1.0, tau, 3.0}) == 0.0);
    CHECK(std::abs(fringe_slope({2.0, 1.0, tau, 1.0})) < 1e-22);

    CHECK_THROWS_AS(check_operating_point({2.0, 1.0, tau, 3.0}), DomainError);
    CHECK_THROWS_AS(check_operating_point({2.0, 1.0, tau, 2.996}), DomainError);
    CHECK_NOTHROW(check_operating_point({2.0, 1.0, tau, 2.9}));

    for (double lock : {1.2, 1.7, 2.0, 2.4, 2.8}) {
        const FringeCalibration cal{2.0, 1.0, tau, lock};
        CHECK(fringe_model(cal.offset_v, cal.amplitude_v, operating_phase(cal)) ==
              doctest::Approx(lock).epsilon(1e-12));
        // numerical derivative in omega around the operating point
        const double w = operating_phase(cal) / tau;
        const double h = 1e-5 / tau;
        const double num = (fringe_model(2.0, 1.0, (w + h) * tau) - fringe_model(2.0, 1.0, (w - h) * tau)) / (2 * h);
        CHECK(num == doctest::Approx(fringe_slope(cal)).epsilon(1e-8));
    }
}

TEST_CASE("fringe fit") {
    const auto clean = generate_fringe_sweep(2.0, 1.0, 0.3, 0.3 + 3.5 * 2 * M_PI, 2000, 0.0, 1);
    const auto fit = fit_fringe(clean);
    CHECK(fit.offset_v == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(fit.amplitude_v == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(fit.residual_rms_v < 1e-9);
    CHECK(fit.fringes_covered == doctest::Approx(3.5).epsilon(1e-6));

    // imperfect visibility: B well below A
    const auto dim = fit_fringe(generate_fringe_sweep(5.0, 0.4, -1.0, 9.0, 1500, 0.0, 1));
    CHECK(dim.offset_v == doctest::Approx(5.0).epsilon(1e-9));
    CHECK(dim.amplitude_v == doctest::Approx(0.4).epsilon(1e-9));

    for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
        const auto noisy = fit_fringe(generate_fringe_sweep(2.0, 1.0, 0.0, 2.2 * 2 * M_PI, 1000, 0.01, seed));
        CHECK(noisy.offset_v == doctest::Approx(2.0).epsilon(0.01));
        CHECK(noisy.amplitude_v == doctest::Approx(1.0).epsilon(0.01));
        CHECK(noisy.residual_rms_v == doctest::Approx(0.01).epsilon(0.2));
    }

    // order of samples does not matter
    auto reversed = clean;
    reversed.drive = clean.drive.reverse().eval();
    reversed.volts = clean.volts.reverse().eval();
    CHECK(fit_fringe(reversed).amplitude_v == doctest::Approx(1.0).epsilon(1e-9));

    FringeSweep flat{Eigen::ArrayXd::LinSpaced(100, 0, 1), Eigen::ArrayXd::Constant(100, 2.0)};
    CHECK_THROWS_AS(fit_fringe(flat), ValidationError);

    const auto partial = generate_fringe_sweep(2.0, 1.0, 0.2, 0.2 + 0.6 * 2 * M_PI, 500, 0.0, 1);
    try {
        fit_fringe(partial);
        FAIL("expected DomainError");
    } catch (const DomainError& e) {
        CHECK(std::string(e.what()).find("partial fringe") != std::string::npos);
        CHECK(std::string(e.what()).find("fringes") != std::string::npos);
    }
}
