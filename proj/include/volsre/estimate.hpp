// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "volsre/filter.hpp"
#include "volsre/models.hpp"

namespace volsre {

struct FitOptions
{
    std::size_t starts = 8;
    double penalty = 1e3;
    double margin = 1e-3;
    double tol = 1e-6;             ///< simplex diameter, relative to each box width
    std::size_t max_iter = 2000;   ///< per simplex run
    std::uint64_t seed = 0;        ///< start points
    std::size_t burn = kDefaultBurn;
    std::optional<double> g_init;
    unsigned workers = 0;          ///< 0 = all cores
};

struct FitResult
{
    ParamVector theta_hat{};
    double qlik = 0.0;
    double constraint_value = 0.0;  ///< empirical Lyapunov coefficient at theta_hat
    std::size_t n = 0;
    std::size_t starts = 0;
    std::size_t feasible_starts = 0;
    bool converged = false;
    std::size_t iterations = 0;
    std::size_t best_start_index = 0;
    std::uint64_t seed = 0;
};

/*!
 * Constrained QLIK estimator.
 *
 * Minimizes F = qlik + penalty * max(0, lyap + margin)^2 over the box by
 * Nelder-Mead from `starts` Latin-hypercube points (each followed by one
 * restart from its optimum), lyap being empirical_lyapunov_value. Axes of
 * zero width stay fixed. A start is feasible when qlik is finite and
 * lyap < 0 at its optimum without the penalty. The best feasible start wins
 * by qlik, then constraint value, then start index. `converged` requires the
 * simplex test to have passed and feasibility.
 *
 * Throws InfeasibleError when no start ends feasible.
 */
FitResult fit(ModelKind model, std::span<const double> x, const ParamBox& box, const FitOptions& opts = {});

/// The repaired start points fit() uses, in start order.
std::vector<ParamVector> fit_start_points(ModelKind model, std::span<const double> x, const ParamBox& box,
                                          const FitOptions& opts = {});

/// Penalized objective minimized by fit(); +infinity outside the box.
double fit_objective(ModelKind model, std::span<const double> x, const ParamBox& box, const FitOptions& opts,
                     const ParamVector& theta);

struct ProfilePoint
{
    ParamVector theta;
    double qlik = 0.0;
    double constraint = 0.0;
};

/// qlik and empirical Lyapunov value along one axis through `center`.
std::vector<ProfilePoint> profile(ModelKind model, std::span<const double> x, const ParamVector& center,
                                  std::size_t axis, std::span<const double> grid,
                                  std::size_t burn = kDefaultBurn);

/// CSV `alpha,beta,gamma,delta,qlik,constraint`.
void write_profile_csv(const std::vector<ProfilePoint>& points, std::ostream& out);

}  // namespace volsre
