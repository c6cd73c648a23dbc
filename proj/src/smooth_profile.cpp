#include "smooth_profile.hpp"

#include "errors.hpp"
#include "quadrature.hpp"

#include <cmath>
#include <sstream>

namespace jdlab {

namespace {

double sigma(double t) {
    if (t <= 1.5e-3) return 0.0; // exp(-1/t) underflows anyway
    return std::exp(-1.0 / t);
}

double sigma_deriv(double t) {
    if (t <= 1.5e-3) return 0.0;
    return std::exp(-1.0 / t) / (t * t);
}

} // namespace

double smooth_step(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double a = sigma(t);
    const double b = sigma(1.0 - t);
    return a / (a + b);
}

double smooth_step_deriv(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    const double a = sigma(t);
    const double b = sigma(1.0 - t);
    const double da = sigma_deriv(t);
    const double db = sigma_deriv(1.0 - t);
    const double denom = (a + b) * (a + b);
    return (da * b + a * db) / denom;
}

double piecewise_shape(double u) {
    u = std::fabs(u);
    if (u <= 0.5) return 1.0;
    if (u < 1.0) return std::exp(-4.0 * (u - 0.5) * (u - 0.5));
    return std::exp(-u);
}

SmoothProfile::SmoothProfile() {
    constexpr int kCells = 4096;
    h_ = 1.0 / kCells;
    s_nodes_.resize(kCells + 1);
    std::vector<double> s(kCells + 1);
    for (int i = 0; i <= kCells; ++i) {
        s[i] = smooth_step(i * h_);
        s_nodes_[i] = s[i];
    }
    q_nodes_ = prefix_integral(s, h_);
    // q(1) = 1/2 exactly by the symmetry of the step; pin it so the tail
    // piece glues without a jump.
    const double scale = 0.5 / q_nodes_.back();
    for (double& v : q_nodes_) v *= scale;

    // audit the bands the construction promises
    double worst = -1.0;
    for (int i = 0; i <= 30000; ++i) {
        const double u = i * 1e-3;
        const double e = std::exp(-u);
        const double f = value(u);
        const double fp = std::fabs(deriv(u));
        const double fpp = std::fabs(second_deriv(u));
        worst = std::max(worst, 0.5 * e - f);
        worst = std::max(worst, f - 2.0 * e);
        worst = std::max(worst, fp - 5.0 * e);
        worst = std::max(worst, fpp - 14.0 * e);
    }
    envelope_margin_ = worst;
    if (worst > 0.0) {
        std::ostringstream msg;
        msg << "smooth profile violates its envelope bands by " << worst;
        throw NumericError(msg.str());
    }
}

double SmoothProfile::q(double u) const {
    u = std::fabs(u);
    if (u >= 1.0) return u - 0.5;
    const double t = u / h_;
    std::size_t i = static_cast<std::size_t>(t);
    if (i >= q_nodes_.size() - 1) i = q_nodes_.size() - 2;
    const double x = t - static_cast<double>(i); // in [0,1)
    // cubic Hermite with exact endpoint slopes
    const double q0 = q_nodes_[i], q1 = q_nodes_[i + 1];
    const double m0 = s_nodes_[i] * h_, m1 = s_nodes_[i + 1] * h_;
    const double x2 = x * x, x3 = x2 * x;
    return (2 * x3 - 3 * x2 + 1) * q0 + (x3 - 2 * x2 + x) * m0 +
           (-2 * x3 + 3 * x2) * q1 + (x3 - x2) * m1;
}

double SmoothProfile::slope(double u) const {
    u = std::fabs(u);
    if (u >= 1.0) return 1.0;
    return smooth_step(u);
}

double SmoothProfile::value(double u) const { return std::exp(-q(u)); }

double SmoothProfile::deriv(double u) const { return -slope(u) * value(u); }

double SmoothProfile::second_deriv(double u) const {
    u = std::fabs(u);
    const double s = slope(u);
    const double sp = u >= 1.0 ? 0.0 : smooth_step_deriv(u);
    return (s * s - sp) * value(u);
}

const SmoothProfile& smooth_profile() {
    static const SmoothProfile instance;
    return instance;
}

} // namespace jdlab
