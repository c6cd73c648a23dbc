#include "stats.hpp"

#include "errors.hpp"

#include <algorithm>
#include <cmath>

namespace jdlab {

double mean(std::span<const double> xs) {
    if (xs.empty()) throw ValidationError("mean: empty sample");
    double s = 0.0;
    for (double v : xs) s += v;
    return s / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) {
    if (xs.size() < 2) throw ValidationError("sample_variance: need at least 2 points");
    const double m = mean(xs);
    double s1 = 0.0, s2 = 0.0;
    for (double v : xs) {
        const double d = v - m;
        s1 += d * d;
        s2 += d;
    }
    const double n = static_cast<double>(xs.size());
    return (s1 - s2 * s2 / n) / (n - 1.0);
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw ValidationError("fit_line: need matching samples of size >= 2");
    const double n = static_cast<double>(x.size());
    const double mx = mean(x);
    const double my = mean(y);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw ValidationError("fit_line: degenerate abscissae");
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ssr = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - fit.intercept - fit.slope * x[i];
        ssr += r * r;
    }
    fit.slope_se = x.size() > 2 ? std::sqrt(ssr / (n - 2.0) / sxx) : 0.0;
    return fit;
}

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x * M_SQRT1_2);
}

namespace {

// Kolmogorov limiting distribution Q(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2)
double kolmogorov_q(double lambda) {
    if (lambda < 1e-8) return 1.0;
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += sign * term;
        if (term < 1e-16) break;
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

} // namespace

KsResult ks_test_normal(std::span<const double> xs, double sigma2) {
    if (xs.size() < 8) throw ValidationError("ks_test_normal: need at least 8 points");
    if (!(sigma2 > 0.0)) throw ValidationError("ks_test_normal: sigma2 must be > 0");
    std::vector<double> sorted(xs.begin(), xs.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    const double sd = std::sqrt(sigma2);
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double cdf = normal_cdf(sorted[i] / sd);
        const double lo = static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n;
        d = std::max(d, std::max(std::fabs(cdf - lo), std::fabs(hi - cdf)));
    }
    const double sqn = std::sqrt(n);
    KsResult r;
    r.statistic = d;
    r.p_value = kolmogorov_q((sqn + 0.12 + 0.11 / sqn) * d);
    return r;
}

double batch_means_se(std::span<const double> xs, std::size_t n_batches) {
    if (xs.size() < 2 * n_batches) n_batches = std::max<std::size_t>(2, xs.size() / 2);
    const std::size_t len = xs.size() / n_batches;
    std::vector<double> batch(n_batches, 0.0);
    for (std::size_t b = 0; b < n_batches; ++b) {
        double s = 0.0;
        for (std::size_t i = b * len; i < (b + 1) * len; ++i) s += xs[i];
        batch[b] = s / static_cast<double>(len);
    }
    return std::sqrt(sample_variance(batch) / static_cast<double>(n_batches));
}

double fit_decay_rate(std::span<const double> u, std::span<const double> y) {
    std::vector<double> ux, ly;
    for (std::size_t i = 0; i < u.size() && i < y.size(); ++i) {
        if (y[i] > 0.0) {
            ux.push_back(u[i]);
            ly.push_back(std::log(y[i]));
        }
    }
    if (ux.size() < 2) return 0.0;
    return -fit_line(ux, ly).slope;
}

} // namespace jdlab
