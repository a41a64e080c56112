// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace volsre {

struct NelderMeadOptions
{
    double tol = 1e-6;          ///< on the simplex diameter (max-norm)
    std::size_t max_iter = 2000;
    double initial_step = 0.1;
};

struct NelderMeadResult
{
    std::vector<double> x;
    double f = 0.0;
    std::size_t iterations = 0;
    std::size_t evaluations = 0;
    bool converged = false;
};

/*!
 * Nelder-Mead simplex minimization (standard coefficients 1, 2, 1/2, 1/2).
 *
 * Meant for normalized coordinates in [0, 1]^d: the initial simplex steps
 * away from x0 by initial_step along each axis, or toward the interior when
 * that would leave the unit cube. f may return +infinity as an extreme
 * barrier; NaN is treated as +infinity.
 */
NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                             std::vector<double> x0, const NelderMeadOptions& opts = {});

}  // namespace volsre
