#pragma once

#include <functional>
#include <vector>

namespace jdlab {

struct QuadResult {
    double value = 0.0;
    double error = 0.0; // achieved absolute error estimate
};

// Adaptive Gauss-Kronrod (G7/K15) on [a,b] to absolute tolerance abs_tol.
// Throws NumericError with the achieved tolerance if the interval budget
// runs out before the estimate converges.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double abs_tol, int max_intervals = 4000);

// Non-throwing single-panel G7/K15 evaluation, used by the adaptive driver.
QuadResult gk15(const std::function<double(double)>& f, double a, double b);

// Gauss-Legendre nodes/weights on [-1,1]; cached per order.
struct GaussRule {
    std::vector<double> x;
    std::vector<double> w;
};
const GaussRule& gauss_legendre(int n);

// Fixed-order Gauss-Legendre on [a,b].
double integrate_gl(const std::function<double(double)>& f, double a, double b, int n);

// Composite Simpson prefix integrals: given samples y_i of f on a uniform
// grid x0 + i*h (n odd intervals are handled with a trapezoid tail on the
// last cell), returns P_i = integral from x0 to x_i.
std::vector<double> prefix_integral(const std::vector<double>& y, double h);

} // namespace jdlab
