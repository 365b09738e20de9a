#pragma once

#include <functional>

namespace npz {

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;  // accumulated embedded-rule estimate
    std::size_t evaluations = 0;
};

// Adaptive bisection with the Gauss-Kronrod (7, 15) pair on [a, b].
// Throws ToleranceNotMet when the subdivision budget is exhausted before the
// summed error estimate drops below abs_tol.
QuadratureResult integrate_gk15(const std::function<double(double)>& f, double a, double b,
                                double abs_tol, std::size_t max_intervals = 20000);

}  // namespace npz
