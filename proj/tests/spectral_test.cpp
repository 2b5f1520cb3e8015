#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "optomech/errors.hpp"
#include "optomech/spectral.hpp"
#include "optomech/synth.hpp"

using namespace optomech;

namespace {

Eigen::ArrayXd white(Eigen::Index n, std::uint64_t seed, std::uint64_t stream = 0) {
    const CounterRng rng(seed);
    Eigen::ArrayXd x(n);
    for (Eigen::Index i = 0; i < n; i += 2) {
        const auto [a, b] = rng.normal_pair(stream, static_cast<std::uint64_t>(i / 2));
        x[i] = a;
        if (i + 1 < n) x[i + 1] = b;
    }
    return x;
}

TwoChannelSpectra exact(double s11, double s22, std::complex<double> s12) {
    TwoChannelSpectra s;
    s.grid = FrequencyGrid::linear(1.0, 2.0, 2);
    s.s11 = Eigen::ArrayXd::Constant(2, s11);
    s.s22 = Eigen::ArrayXd::Constant(2, s22);
    s.s12 = Eigen::ArrayXcd::Constant(2, s12);
    s.coherence = Eigen::ArrayXd::Constant(2, std::norm(s12) / (s11 * s22));
    return s;
}

}  // namespace

TEST_CASE("Welch PSD of white noise") {
    WelchOptions o;
    o.segment_length = 256;
    const Eigen::Index n = 256 + 127 * 128;  // 128 segments
    const TimeSeries x{white(n, 3), 1.0, "w"};
    const auto psd = welch_psd(x, o);
    CHECK(welch_segment_count(n, o) == 128);
    CHECK(psd.grid.size() == 128);
    CHECK(psd.grid[127] == doctest::Approx(0.5));
    CHECK(psd.values.mean() == doctest::Approx(2.0).epsilon(0.05));

    const TimeSeries zero{Eigen::ArrayXd::Zero(4096), 10.0, "z"};
    CHECK((welch_psd(zero).values == 0).all());

    const TimeSeries shorty{Eigen::ArrayXd::Ones(100), 1.0, "s"};
    CHECK_THROWS_AS(welch_psd(shorty), ValidationError);
    o.overlap = 256;
    CHECK_THROWS_AS(welch_psd(x, o), ValidationError);
}

TEST_CASE("Welch PSD of a sinusoid integrates to its power") {
    const double fs = 1000.0, a = 1.7, f0 = 123.4;
    WelchOptions o;
    o.segment_length = 512;
    const Eigen::Index n = 512 + 31 * 256;  // 32 averages
    const Eigen::ArrayXd t = Eigen::ArrayXd::LinSpaced(n, 0, n - 1) / fs;
    const TimeSeries x{a * (2 * M_PI * f0 * t).sin(), fs, "sine"};
    const auto psd = welch_psd(x, o);
    const double df = fs / 512;
    double power = 0;
    for (Eigen::Index i = 0; i < psd.grid.size(); ++i)
        if (std::abs(psd.grid[i] - f0) < 6 * df) power += psd.values[i] * df;
    CHECK(power == doctest::Approx(a * a / 2).epsilon(0.01));
}

TEST_CASE("effective averages") {
    WelchOptions o;
    o.segment_length = 128;
    o.overlap = 0;
    CHECK(welch_effective_averages(128 * 40, o) == doctest::Approx(40.0));
    o.overlap = 64;
    const double neff = welch_effective_averages(128 * 40, o);
    const double k = welch_segment_count(128 * 40, o);
    // Hann at 50% overlap: rho = 1/6 between neighbours
    CHECK(neff == doctest::Approx(k / (1 + 2 * (1 - 1 / k) / 36)).epsilon(1e-3));
}

TEST_CASE("cross spectra") {
    WelchOptions o;
    o.segment_length = 64;
    const Eigen::Index n = 64 + 1023 * 32;  // 1024 averages
    const Eigen::ArrayXd a = white(n, 5, 0);
    const Eigen::ArrayXd b = white(n, 5, 1);

    const auto same = cross_spectra({a, 1.0, "a"}, {a, 1.0, "a"}, o);
    CHECK((same.coherence - 1.0).abs().maxCoeff() < 1e-12);
    CHECK(same.n_averages == 1024);

    const auto indep = cross_spectra({a, 1.0, "a"}, {b, 1.0, "b"}, o);
    CHECK(indep.coherence.mean() > 0.5 / indep.effective_averages);
    CHECK(indep.coherence.mean() < 2.0 / indep.effective_averages);

    const auto half = cross_spectra({a, 1.0, "a"}, {a + b, 1.0, "ab"}, o);
    CHECK((half.coherence - 0.5).abs().maxCoeff() < 0.1);

    for (const auto* s : {&same, &indep, &half}) {
        CHECK((s->s12.abs2() <= s->s11 * s->s22 * (1 + 1e-12)).all());
        CHECK((s->coherence >= 0).all());
        CHECK((s->coherence <= 1).all());
    }

    CHECK_THROWS_AS(cross_spectra({a, 1.0, "a"}, {b, 2.0, "b"}, o), ValidationError);
    CHECK_THROWS_AS(cross_spectra({a, 1.0, "a"}, {b.head(n - 1), 1.0, "b"}, o), ValidationError);
}

TEST_CASE("frequency-noise subtraction on exact spectra") {
    // F = 3, C1 = 4, S_n = 0, lambda = 1
    auto s = exact(25, 9, 9);
    CHECK(s.coherence[0] == doctest::Approx(0.36));
    auto r = frequency_noise_subtract(s, 0.0);
    CHECK(r.c1_asd[0] == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(r.f_asd[0] == 3.0);
    CHECK(r.count(BinFlag::ok) == 2);

    // channels share only F
    s = exact(4, 4, 4);
    r = frequency_noise_subtract(s, 0.0);
    CHECK(r.c1_asd[0] == 0.0);
    CHECK(r.flags[0] == BinFlag::ok);

    // no frequency noise at all
    s = exact(4, 2, 0);
    r = frequency_noise_subtract(s, 2.0);
    CHECK(r.flags[0] == BinFlag::coherence_floor);
    CHECK(std::isnan(r.c1_asd[0]));

    // shot noise above S22
    r = frequency_noise_subtract(exact(25, 9, 9), 10.0);
    CHECK(r.flags[0] == BinFlag::nonphysical_negative);

    // C S22 > F^2: negative radicand
    r = frequency_noise_subtract(exact(25, 9, 9), 6.0);
    CHECK(r.flags[0] == BinFlag::nonphysical_negative);
    CHECK(std::isnan(r.c1_asd[0]));

    // below an explicit floor
    r = frequency_noise_subtract(exact(25, 9, 9), 0.0, 0.5);
    CHECK(r.flags[0] == BinFlag::coherence_floor);

    // shot noise removed before the estimate: F = 3, C1 = 4, S_n = 2, lambda = 0.3
    const double lam = 0.3;
    s = exact((9 + 16) * lam * lam, 9 + 4, lam * 9);
    r = frequency_noise_subtract(s, 4.0);
    CHECK(r.c1_asd[0] == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(estimate_gain_ratio(s, Eigen::ArrayXd::Constant(2, 4.0))[0] == doctest::Approx(lam));
}

TEST_CASE("gain-ratio invariance on estimated spectra") {
    WelchOptions o;
    o.segment_length = 128;
    const Eigen::Index n = 128 * 40;
    const Eigen::ArrayXd f = white(n, 9, 0), c = 0.7 * white(n, 9, 1), sn = 0.2 * white(n, 9, 2);
    const auto base = frequency_noise_subtract(cross_spectra({f + c, 1.0, "1"}, {f + sn, 1.0, "2"}, o), 0.04 * 2);
    for (double k : {0.1, 10.0}) {
        const auto scaled =
            frequency_noise_subtract(cross_spectra({k * (f + c), 1.0, "1"}, {f + sn, 1.0, "2"}, o), 0.04 * 2);
        for (Eigen::Index i = 0; i < base.grid.size(); ++i) {
            if (base.flags[static_cast<std::size_t>(i)] != BinFlag::ok) continue;
            CHECK(scaled.c1_asd[i] == doctest::Approx(base.c1_asd[i]).epsilon(1e-10));
        }
    }
}

TEST_CASE("standard error matches complex-Wishart Monte Carlo") {
    // per-bin spectra drawn directly from the two-channel Gaussian model
    const double F = 1.0, C = 0.8, Sn = 0.3, lam = 2.0;
    const int averages = 64, trials = 4000;
    std::mt19937_64 gen(17);
    std::normal_distribution<double> g(0.0, std::sqrt(0.5));
    auto cg = [&] { return std::complex<double>(g(gen), g(gen)); };

    std::vector<double> estimates;
    for (int t = 0; t < trials; ++t) {
        double s11 = 0, s22 = 0;
        std::complex<double> s12 = 0;
        for (int k = 0; k < averages; ++k) {
            const auto f = F * cg(), c = C * cg(), n = Sn * cg();
            const auto x1 = lam * (f + c), x2 = f + n;
            s11 += std::norm(x1);
            s22 += std::norm(x2);
            s12 += std::conj(x1) * x2;
        }
        auto s = exact(s11 / averages, s22 / averages, s12 / double(averages));
        const auto r = frequency_noise_subtract(s, Sn * Sn, 0.0);
        if (r.flags[0] == BinFlag::ok) estimates.push_back(r.c1_asd[0]);
    }
    double mean = 0, var = 0;
    for (double e : estimates) mean += e;
    mean /= static_cast<double>(estimates.size());
    for (double e : estimates) var += (e - mean) * (e - mean);
    const double sd = std::sqrt(var / static_cast<double>(estimates.size() - 1));

    const auto truth = exact((F * F + C * C) * lam * lam, F * F + Sn * Sn, lam * F * F);
    const double sigma = subtraction_standard_error(truth, Eigen::ArrayXd::Constant(2, Sn * Sn), averages)[0];
    CHECK(estimates.size() > 0.99 * trials);
    CHECK(sd == doctest::Approx(sigma).epsilon(0.1));
    CHECK(mean == doctest::Approx(C).epsilon(0.05));

    const double sigma4 = subtraction_standard_error(truth, Eigen::ArrayXd::Constant(2, Sn * Sn), 4 * averages)[0];
    CHECK(sigma4 == doctest::Approx(sigma / 2));
}

TEST_CASE("unit chain") {
    const auto g = FrequencyGrid::linear(1.0, 3.0, 3);
    const NoiseSpectrum v(g, Eigen::ArrayXd::LinSpaced(3, 1.0, 3.0), SpectrumUnit::asd_v_per_rtHz, "v");

    // |dV/domega| = B tau = 1 / (2 pi) makes volts_to_hz the identity
    const FringeCalibration unit{0.0, 1.0, 1.0 / (2 * M_PI), 0.0};
    CHECK((volts_to_hz(v, unit).values - v.values).abs().maxCoeff() < 1e-15);
    CHECK(volts_to_hz(v, unit).unit == SpectrumUnit::asd_hz_per_rtHz);

    // slope B tau per rad/s: 1 V/rtHz over 2 pi B tau Hz
    const FringeCalibration cal{2.0, 1.0, 4.89e-7, 2.5};
    const double slope = 1.0 * 4.89e-7 * std::sin(std::acos(0.5));
    CHECK(volts_to_hz(v, cal).values[0] == doctest::Approx(1.0 / (2 * M_PI * slope)));

    const NoiseSpectrum hz(g, Eigen::ArrayXd::Ones(3), SpectrumUnit::asd_hz_per_rtHz, "hz");
    const double factor = hz_to_meters(hz, 0.01, 1064e-9).values[0];
    CHECK(factor == doctest::Approx(0.01 * 1064e-9 / 299792458.0).epsilon(1e-14));
    CHECK(factor == doctest::Approx(3.55e-17).epsilon(1e-3));
    CHECK(hz_to_meters(hz, 299792458.0, 1.0).values[0] == doctest::Approx(1.0));

    const double k = 7.25;
    NoiseSpectrum vk = v;
    vk.values *= k;
    const Eigen::ArrayXd m1 = hz_to_meters(volts_to_hz(vk, cal), 0.01, 1064e-9).values;
    const Eigen::ArrayXd m2 = k * hz_to_meters(volts_to_hz(v, cal), 0.01, 1064e-9).values;
    CHECK(((m1 - m2).abs() / m2).maxCoeff() < 1e-14);
    CHECK(volts_per_meter(cal, 0.01, 1064e-9) == doctest::Approx(v.values[0] / m2[0] * k));

    const FringeCalibration turning{2.0, 1.0, 4.89e-7, 2.999};
    CHECK_THROWS_AS(volts_to_hz(v, turning), DomainError);
    CHECK_THROWS_AS(volts_to_hz(hz, cal), ValidationError);
}
