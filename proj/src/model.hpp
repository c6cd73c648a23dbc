#pragma once

#include "levy.hpp"

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace jdlab {

using VecFn = std::function<void(const double* x, double* out)>; // R^d -> R^d
using MatFn = std::function<void(const double* x, double* out)>; // R^d -> R^{dxd} row major

// One jump-diffusion specification: drift b, diffusion a, jump coefficient
// gamma, jump measure F, start point. Immutable after construction.
struct ModelSpec {
    int dim = 1;
    std::string id;
    VecFn drift;
    MatFn diffusion;
    MatFn jump_coeff;
    LevyMeasure levy = LevyMeasure::none(1);
    std::array<double, 2> x0{0.0, 0.0};

    bool constant_coeffs = false;          // a and gamma do not depend on x
    double lipschitz_cap = 10.0;           // audit threshold for finite-difference slopes
    std::function<double(const double*)> invariant_density; // closed form when known

    bool has_closed_form() const { return static_cast<bool>(invariant_density); }
};

struct AuditItem {
    std::string name;
    bool pass = false;
    std::array<double, 2> worst{0.0, 0.0}; // witness point
    double value = 0.0;                    // audited quantity at the witness
    std::string detail;
};

struct AssumptionReport {
    std::vector<AuditItem> items;
    bool all_pass() const {
        for (const auto& it : items)
            if (!it.pass) return false;
        return true;
    }
    const AuditItem* find(const std::string& name) const {
        for (const auto& it : items)
            if (it.name == name) return &it;
        return nullptr;
    }
};

struct AuditGrid {
    double lo = -20.0;
    double hi = 20.0;
    int points_per_axis = 401;
};

// Desk-scale audit of the standing assumptions on a finite grid: coefficient
// regularity and ellipticity, the inward-drift fit on |x| >= rho, the jump
// measure's small-jump envelope and exponential moment, symmetry when the
// activity index is 1, and diffusion smoothness in dimension one.
AssumptionReport audit_assumptions(const ModelSpec& spec, const AuditGrid& grid, double tol);

// Constant gate for the drift-inversion constructions with scalar constant
// coefficients: c4 < a^2 / (2 gamma^2 * 16 * 28).
bool check_c4_condition(double a, double gamma, double c4);

// Smooth even surrogate for exp(eps|x|): exact outside (-1,1), an even
// quartic matched to value and two derivatives at |x| = 1 inside, >= 1.
struct LyapunovSpec {
    double eps = 0.0;
    double c0 = 0.0, c2 = 0.0, c4 = 0.0;
    double operator()(double x) const;
};
LyapunovSpec make_lyapunov(double eps);

// Built-in model catalogue, addressable by id.
const ModelSpec& catalogue(const std::string& id);
std::vector<std::string> catalogue_ids();

} // namespace jdlab
