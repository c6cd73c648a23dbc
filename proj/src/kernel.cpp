#include "kernel.hpp"

#include "csvio.hpp"
#include "errors.hpp"
#include "quadrature.hpp"

#include <cmath>

namespace jdlab {

double KernelSpec::moment(int i) const {
    auto f = [&](double x) { return std::pow(x, i) * (*this)(x); };
    // integrand is a polynomial of degree <= i + 2*coeffs.size(); 64 nodes
    // are exact far beyond any order we build
    return integrate_gl(f, -1.0, 1.0, 64);
}

KernelSpec build_kernel(int M) {
    if (M < 1) throw ValidationError("build_kernel: order must be >= 1");
    // conditions: unit mass and vanishing even moments 2,4,...,<=M
    const int m = M / 2; // number of even-moment conditions
    const int n = m + 1;
    // A[i][j] = integral x^(2i) (1-x^2) x^(2j) dx = 4 / ((2(i+j)+1)(2(i+j)+3))
    std::vector<std::vector<double>> A(n, std::vector<double>(n + 1, 0.0));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const int k = i + j;
            A[i][j] = 4.0 / ((2.0 * k + 1.0) * (2.0 * k + 3.0));
        }
        A[i][n] = i == 0 ? 1.0 : 0.0;
    }
    // Gaussian elimination with partial pivoting
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::fabs(A[r][col]) > std::fabs(A[piv][col])) piv = r;
        std::swap(A[piv], A[col]);
        if (std::fabs(A[col][col]) < 1e-14)
            throw NumericError("build_kernel: singular moment system");
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = A[r][col] / A[col][col];
            for (int c = col; c <= n; ++c) A[r][c] -= f * A[col][c];
        }
    }
    KernelSpec k;
    k.order = M;
    k.coeffs.resize(n);
    for (int i = 0; i < n; ++i) k.coeffs[i] = A[i][n] / A[i][i];
    double sup = 0.0;
    for (int i = 0; i <= 4000; ++i) sup = std::max(sup, std::fabs(k(i / 4000.0)));
    k.sup_norm = sup;
    return k;
}

namespace {

double bump_window(double x) {
    const double x2 = x * x;
    if (x2 >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - x2)); // normalised so the window is 1 at 0
}

double bump_window_deriv(double x) {
    const double x2 = x * x;
    if (x2 >= 1.0) return 0.0;
    const double d = 1.0 - x2;
    return bump_window(x) * (-2.0 * x / (d * d));
}

} // namespace

double BumpSpec::operator()(double x) const {
    return bump_window(x) * (1.0 - c * x * x);
}

double BumpSpec::deriv(double x) const {
    return bump_window_deriv(x) * (1.0 - c * x * x) + bump_window(x) * (-2.0 * c * x);
}

double BumpSpec::mass() const {
    auto f = [&](double x) { return (*this)(x); };
    return integrate(f, -1.0, 1.0, 1e-13).value;
}

BumpSpec build_bump() {
    // window * (1 - c x^2) keeps the centre value at exactly 1 for any c;
    // c kills the mass.
    const double i0 = integrate([](double x) { return bump_window(x); }, -1.0, 1.0, 1e-14).value;
    const double i2 =
        integrate([](double x) { return x * x * bump_window(x); }, -1.0, 1.0, 1e-14).value;
    BumpSpec b;
    b.c = i0 / i2;
    double sup = 0.0, dsup = 0.0;
    for (int i = -4000; i <= 4000; ++i) {
        const double x = i / 4000.0;
        sup = std::max(sup, std::fabs(b(x)));
        dsup = std::max(dsup, std::fabs(b.deriv(x)));
    }
    b.sup_norm = sup;
    b.deriv_sup = dsup;
    return b;
}

DensityEstimate estimate_density(const PathRecord& path, const KernelSpec& k,
                                 const EstimateConfig& cfg) {
    if (path.size() < 2) throw ValidationError("estimate_density: path too short");
    const int d = path.dim;
    for (int i = 0; i < d; ++i)
        if (!(cfg.bandwidth[i] > 0.0) || cfg.bandwidth[i] > 1.0)
            throw ValidationError("estimate_density: bandwidth must lie in (0,1]");
    DensityEstimate est;
    est.points = cfg.eval_points;
    est.bandwidth = cfg.bandwidth;
    est.effective_T = path.horizon();
    est.values.resize(cfg.eval_points.size());
    for (std::size_t p = 0; p < cfg.eval_points.size(); ++p)
        est.values[p] = estimate_density_at(path, k, cfg.bandwidth, cfg.eval_points[p].data());
    return est;
}

double estimate_density_at(const PathRecord& path, const KernelSpec& k,
                           const std::array<double, 2>& h, const double* x) {
    const int d = path.dim;
    const std::size_t n = path.size();
    const double T = path.horizon();
    const double inv_h0 = 1.0 / h[0];
    const double inv_h1 = d == 2 ? 1.0 / h[1] : 0.0;
    double acc = 0.0;
    const double* s = path.states.data();
    if (d == 1) {
        const double x0 = x[0], h0 = h[0];
        for (std::size_t i = 0; i < n; ++i) {
            const double dx = x0 - s[i];
            if (dx > h0 || dx < -h0) continue;
            double w = k(dx * inv_h0);
            if (i == 0 || i == n - 1) w *= 0.5;
            acc += w;
        }
        return acc * path.dt / (T * h0);
    }
    const double x0 = x[0], x1 = x[1], h0 = h[0], h1 = h[1];
    for (std::size_t i = 0; i < n; ++i) {
        const double dx0 = x0 - s[2 * i];
        if (dx0 > h0 || dx0 < -h0) continue;
        const double dx1 = x1 - s[2 * i + 1];
        if (dx1 > h1 || dx1 < -h1) continue;
        double w = k(dx0 * inv_h0) * k(dx1 * inv_h1);
        if (i == 0 || i == n - 1) w *= 0.5;
        acc += w;
    }
    return acc * path.dt / (T * h0 * h1);
}

std::array<double, 2> default_bandwidth(double T, int dim) {
    if (!(T >= 1.0)) throw ValidationError("default_bandwidth: requires T >= 1");
    if (dim == 1) return {1.0 / std::sqrt(T), 0.0};
    if (dim != 2) throw ValidationError("default_bandwidth: dim must be 1 or 2");
    if (T <= 1.0) throw ValidationError("default_bandwidth: dimension two requires T > 1");
    const double h = std::sqrt(std::log(T) / T);
    return {h, h};
}

void density_to_csv(const DensityEstimate& est, int dim, const std::string& filename) {
    CsvWriter csv(filename);
    csv.header(dim == 1 ? std::vector<std::string>{"x1", "mu_hat"}
                        : std::vector<std::string>{"x1", "x2", "mu_hat"});
    for (std::size_t i = 0; i < est.points.size(); ++i) {
        if (dim == 1)
            csv.row({est.points[i][0], est.values[i]});
        else
            csv.row({est.points[i][0], est.points[i][1], est.values[i]});
    }
}

} // namespace jdlab
