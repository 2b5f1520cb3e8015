#include "optomech/delayline.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <unsupported/Eigen/NonLinearOptimization>
#include <vector>

#include "optomech/errors.hpp"

namespace optomech {

void FringeCalibration::validate() const {
    if (!(amplitude_v > 0)) throw ValidationError("fringe amplitude B must be > 0", "fringe.amplitude_v");
    if (!(delay_s > 0)) throw ValidationError("delay tau must be > 0", "fringe.delay_s");
    if (!std::isfinite(offset_v)) throw ValidationError("fringe offset A must be finite", "fringe.offset_v");
    if (!(std::abs(lock_v - offset_v) <= amplitude_v)) {
        std::ostringstream msg;
        msg << "lock voltage " << lock_v << " V lies outside the fringe [A - B, A + B] = [" << offset_v - amplitude_v
            << ", " << offset_v + amplitude_v << "] V";
        throw ValidationError(msg.str(), "fringe.lock_v");
    }
}

double tau_from_null(double null_frequency_hz) {
    if (!(null_frequency_hz > 0)) throw ValidationError("null frequency must be > 0", "fringe.null_frequency_hz");
    return 2.0 / null_frequency_hz;
}

double operating_phase(const FringeCalibration& cal) {
    cal.validate();
    const double arg = std::clamp((cal.lock_v - cal.offset_v) / cal.amplitude_v, -1.0, 1.0);
    return std::acos(arg);
}

double fringe_slope(const FringeCalibration& cal) {
    return -cal.amplitude_v * cal.delay_s * std::sin(operating_phase(cal));
}

void check_operating_point(const FringeCalibration& cal, double min_sine) {
    const double s = std::sin(operating_phase(cal));
    if (std::abs(s) < min_sine) {
        std::ostringstream msg;
        msg << "lock voltage sits at a fringe turning point (|sin(omega tau)| = " << std::abs(s) << " < " << min_sine
            << "); the volts-to-frequency slope is not usable";
        throw DomainError(msg.str());
    }
}

namespace {

// residuals of A + p cos(k d) + q sin(k d) - v, parameters (A, p, q, k)
struct CosineResidual {
    using Scalar = double;
    enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
    using InputType = Eigen::VectorXd;
    using ValueType = Eigen::VectorXd;
    using JacobianType = Eigen::MatrixXd;

    const Eigen::ArrayXd& d;
    const Eigen::ArrayXd& v;

    int inputs() const { return 4; }
    int values() const { return static_cast<int>(d.size()); }

    int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& fvec) const {
        const Eigen::ArrayXd phase = x[3] * d;
        fvec = (x[0] + x[1] * phase.cos() + x[2] * phase.sin() - v).matrix();
        return 0;
    }

    int df(const Eigen::VectorXd& x, Eigen::MatrixXd& fjac) const {
        const Eigen::ArrayXd phase = x[3] * d;
        const Eigen::ArrayXd c = phase.cos();
        const Eigen::ArrayXd s = phase.sin();
        fjac.col(0).setOnes();
        fjac.col(1) = c.matrix();
        fjac.col(2) = s.matrix();
        fjac.col(3) = (d * (-x[1] * s + x[2] * c)).matrix();
        return 0;
    }
};

// Linear least squares for (A, p, q) at fixed k; returns the residual norm.
double solve_linear(const Eigen::ArrayXd& d, const Eigen::ArrayXd& v, double k, Eigen::Vector3d& apq) {
    Eigen::MatrixXd design(d.size(), 3);
    design.col(0).setOnes();
    design.col(1) = (k * d).cos().matrix();
    design.col(2) = (k * d).sin().matrix();
    apq = design.colPivHouseholderQr().solve(v.matrix());
    return (design * apq - v.matrix()).norm();
}

double percentile(std::vector<double> values, double q) {
    const auto idx = static_cast<std::size_t>(q * static_cast<double>(values.size() - 1));
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(idx), values.end());
    return values[idx];
}

}  // namespace

FringeFit fit_fringe(const FringeSweep& sweep) {
    const Eigen::Index n = sweep.volts.size();
    if (sweep.drive.size() != n) throw ValidationError("fringe sweep drive and volts lengths differ");
    if (n < 8) throw ValidationError("fringe sweep needs at least 8 samples");
    if (!sweep.drive.allFinite() || !sweep.volts.allFinite())
        throw ValidationError("fringe sweep contains non-finite samples");

    // order by drive
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return sweep.drive[a] < sweep.drive[b]; });
    Eigen::ArrayXd drive(n), volts(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        drive[i] = sweep.drive[order[static_cast<std::size_t>(i)]];
        volts[i] = sweep.volts[order[static_cast<std::size_t>(i)]];
    }

    const double vmax = volts.maxCoeff();
    const double vmin = volts.minCoeff();
    if (!(vmax - vmin > 1e-12 * std::max(1.0, std::abs(vmax))))
        throw ValidationError("fringe sweep is constant: no interference visible");
    const double span = drive[n - 1] - drive[0];
    if (!(span > 0)) throw ValidationError("fringe sweep drive does not vary");

    // stage 1: trimmed extrema
    std::vector<double> vv(volts.data(), volts.data() + n);
    const double hi = percentile(vv, 0.995);
    const double lo = percentile(vv, 0.005);
    const double a_seed = 0.5 * (hi + lo);
    const double b_seed = 0.5 * (hi - lo);

    // mid-level crossings with hysteresis give the fringe count
    int crossings = 0;
    int state = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double x = volts[i] - a_seed;
        const int s = x > 0.3 * b_seed ? 1 : (x < -0.3 * b_seed ? -1 : 0);
        if (s != 0 && state != 0 && s != state) ++crossings;
        if (s != 0) state = s;
    }

    const Eigen::ArrayXd centered = drive - 0.5 * (drive[0] + drive[n - 1]);

    // stage 2: scan k around the crossing estimate, then Levenberg-Marquardt
    const double k_lo = M_PI * std::max(0.25, crossings - 1.0) / span;
    const double k_hi = M_PI * (crossings + 1.5) / span;
    const int steps = 400;
    double best_k = k_lo;
    double best_res = std::numeric_limits<double>::infinity();
    Eigen::Vector3d apq;
    for (int i = 0; i <= steps; ++i) {
        const double k = k_lo + (k_hi - k_lo) * i / steps;
        const double res = solve_linear(centered, volts, k, apq);
        if (res < best_res) {
            best_res = res;
            best_k = k;
        }
    }
    solve_linear(centered, volts, best_k, apq);

    Eigen::VectorXd x(4);
    x << apq[0], apq[1], apq[2], best_k;
    CosineResidual functor{centered, volts};
    Eigen::LevenbergMarquardt<CosineResidual> lm(functor);
    lm.parameters.xtol = 1e-15;
    lm.parameters.ftol = 1e-15;
    lm.parameters.maxfev = 2000;
    lm.minimize(x);

    Eigen::VectorXd residual(n);
    functor(x, residual);

    FringeFit fit;
    fit.offset_v = x[0];
    fit.amplitude_v = std::hypot(x[1], x[2]);
    double k = x[3];
    double phi = std::atan2(-x[2], x[1]);
    if (k < 0) {
        k = -k;
        phi = -phi;
    }
    fit.phase_per_drive = k;
    fit.phase_offset = phi - k * 0.5 * (drive[0] + drive[n - 1]);
    fit.residual_rms_v = std::sqrt(residual.squaredNorm() / static_cast<double>(n));
    fit.fringes_covered = k * span / (2.0 * M_PI);

    if (fit.fringes_covered < 0.99 || (vmax - vmin) < 0.95 * 2.0 * fit.amplitude_v) {
        std::ostringstream msg;
        msg << "partial fringe: sweep spans " << fit.fringes_covered << " fringes (phase span "
            << k * span << " rad, voltage span " << vmax - vmin << " V of 2B = " << 2.0 * fit.amplitude_v
            << " V); at least one full fringe is required";
        throw DomainError(msg.str());
    }
    return fit;
}

}  // namespace optomech
