// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>

namespace volsre {

struct InnovationDist;

struct QuadResult
{
    double value = 0.0;
    double error = 0.0;       ///< Kronrod-Gauss error estimate
    std::size_t intervals = 0;
};

/// Globally adaptive 15-point Gauss-Kronrod on [a, b]. Stops when the summed
/// error estimate drops below tol * max(1, |value|).
QuadResult integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-10,
                     std::size_t max_intervals = 4000);

/// Integral over [a, +inf) through z = a + u / (1 - u).
QuadResult integrate_to_infinity(const std::function<double(double)>& f, double a, double tol = 1e-10,
                                 std::size_t max_intervals = 4000);

/// E[f(Z)] for the innovation law, integrating (-inf, 0] and [0, inf)
/// separately so kinks of |z| sit on an interval end.
QuadResult expectation(const InnovationDist& dist, const std::function<double(double)>& f,
                       double tol = 1e-10);

}  // namespace volsre
