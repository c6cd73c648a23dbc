#pragma once

#include "simulate.hpp"

#include <array>
#include <vector>

namespace jdlab {

// Compactly supported polynomial kernel on [-1,1] with unit mass and
// vanishing moments 1..order. Even by construction, zero at the endpoints:
// K(x) = (1 - x^2) * sum_j coeffs[j] * x^(2j).
struct KernelSpec {
    int order = 1;
    std::vector<double> coeffs;
    double sup_norm = 0.0;

    double operator()(double x) const {
        const double x2 = x * x;
        if (x2 >= 1.0) return 0.0;
        double poly = 0.0;
        for (std::size_t j = coeffs.size(); j-- > 0;) poly = poly * x2 + coeffs[j];
        return (1.0 - x2) * poly;
    }
    // integral of x^i K(x), exact Gauss-Legendre
    double moment(int i) const;
};

// Smallest-degree kernel of the family above with moments 1..M vanishing.
KernelSpec build_kernel(int M);

// Smooth bump used by the perturbation families: value 1 at the origin,
// zero mass, compact support in [-1,1], flat to all orders at the edges.
struct BumpSpec {
    double c = 0.0;        // mass-cancelling quadratic correction
    double sup_norm = 1.0; // attained at 0
    double deriv_sup = 0.0;

    double operator()(double x) const;
    double deriv(double x) const;
    double mass() const; // quadrature of the built bump
};
BumpSpec build_bump();

struct EstimateConfig {
    std::array<double, 2> bandwidth{0.0, 0.0}; // per axis, in (0,1]
    std::vector<std::array<double, 2>> eval_points;
};

struct DensityEstimate {
    std::vector<std::array<double, 2>> points;
    std::vector<double> values;
    double effective_T = 0.0;
    std::array<double, 2> bandwidth{0.0, 0.0};
};

// Occupation-time average of the rescaled kernel along the path, trapezoid
// weights in time.
DensityEstimate estimate_density(const PathRecord& path, const KernelSpec& k,
                                 const EstimateConfig& cfg);

// Scalar fast path: the estimate at a single point.
double estimate_density_at(const PathRecord& path, const KernelSpec& k,
                           const std::array<double, 2>& h, const double* x);

// T^(-1/2) in dimension one, (log T / T)^(1/2) per axis in dimension two.
std::array<double, 2> default_bandwidth(double T, int dim);

void density_to_csv(const DensityEstimate& est, int dim, const std::string& filename);

} // namespace jdlab
