// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "volsre/models.hpp"

namespace volsre {

inline constexpr std::size_t kDefaultBurn = 50;
/// |g| above this (EGARCH, pre-exponential) marks the filter divergent.
inline constexpr double kDivergenceThreshold = 700.0;

//---------------------------------------------------------------------------//
/*!
 * Output of the observation-driven filter g_1(theta)..g_n(theta).
 *
 * g_init plays the role of g_0 and the pre-sample observation X_0 is taken
 * as 0, so g_1 = alpha + beta g_0. Under EGARCH g_init is first clamped to
 * the state-space floor alpha / (1 - beta). After a divergence the remaining
 * entries repeat the last finite value.
 */
struct FilterTrajectory
{
    std::vector<double> g;
    ParamVector theta{};
    ModelKind model = ModelKind::Egarch11;
    double g_init = 0.0;
    std::size_t burn = kDefaultBurn;
    bool divergent = false;
};

/// alpha / (1 - beta) for both models.
double default_g_init(ModelKind model, const ParamVector& theta);

FilterTrajectory run_filter(ModelKind model, const ParamVector& theta, std::span<const double> x,
                            std::optional<double> g_init = std::nullopt, std::size_t burn = kDefaultBurn);

struct QlikValue
{
    double value = 0.0;
    std::size_t n_effective = 0;
};

/*!
 * QLIK criterion: mean over t = burn+1..n of (X_t^2 / l(g_t) + log l(g_t)) / 2,
 * l the model link. +infinity if the filter diverges. Evaluated in one pass
 * without storing the trajectory.
 */
QlikValue qlik(ModelKind model, const ParamVector& theta, std::span<const double> x,
               std::optional<double> g_init = std::nullopt, std::size_t burn = kDefaultBurn);

/// QLIK of an existing trajectory.
QlikValue qlik(const FilterTrajectory& traj, std::span<const double> x);

struct Forecast
{
    std::vector<double> sigma2_hat;  ///< in-sample l(g_t)
    double next = 0.0;               ///< l(phi(g_n, X_n)), the variance of X_{n+1}
    bool divergent = false;
};

Forecast forecast(ModelKind model, const ParamVector& theta, std::span<const double> x,
                  std::optional<double> g_init = std::nullopt);

/// CSV `t,g,sigma2_hat`.
void write_trajectory_csv(const FilterTrajectory& traj, std::ostream& out);

}  // namespace volsre
