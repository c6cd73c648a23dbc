#pragma once

#include <vector>

namespace jdlab {

// C-infinity transition step: 0 for t <= 0, 1 for t >= 1, all derivatives
// flat at both ends.
double smooth_step(double t);
double smooth_step_deriv(double t);

// Piecewise reference shape: 1 on [0,1/2], exp(-4(u-1/2)^2) on (1/2,1),
// exp(-u) beyond 1. Continuous but kinked at u = 1.
double piecewise_shape(double u);

// Smooth, strictly positive, even-extendable profile f on [0, inf) with
//   f(u) = exp(-q(u)),  q' = smooth_step,  q(u) = u - 1/2 for u >= 1,
// so that f is constant-flat at 0, exactly proportional to exp(-u) in the
// tail (f'/f = -1 for u > 1), and stays inside the band
//   [exp(-u)/2, 2 exp(-u)]   with |f'| <= 5 exp(-u), |f''| <= 14 exp(-u).
// Construction fails loudly if the sampled audit of those bands ever
// trips, so downstream code can rely on them.
class SmoothProfile {
public:
    SmoothProfile();

    double value(double u) const;        // f(|u|)
    double deriv(double u) const;        // df/du at |u| (>= 0 side)
    double second_deriv(double u) const; // d2f/du2 at |u|

    // largest relative violation of the envelope bands on the audit grid
    // (negative when everything passes, by margin)
    double envelope_margin() const { return envelope_margin_; }

private:
    double q(double u) const;
    double slope(double u) const; // q'(|u|)

    std::vector<double> q_nodes_;  // q at uniform nodes on [0,1]
    std::vector<double> s_nodes_;  // q' at the same nodes
    double h_ = 0.0;
    double envelope_margin_ = 0.0;
};

// Process-wide instance; the profile is fixed, building it once is enough.
const SmoothProfile& smooth_profile();

} // namespace jdlab
