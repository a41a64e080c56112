// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "volsre/models.hpp"

namespace volsre {

enum class LyapunovKind
{
    EmpiricalOnData,
    ModelImpliedMc,
};

//---------------------------------------------------------------------------//
/*!
 * Estimate of E log Lambda, the Lyapunov coefficient of the observation
 * driven SRE. A negative value certifies (empirical) invertibility.
 *
 * When some log term is -infinity (beta = 0 and a zero innovation term)
 * value is -infinity, std_error is 0 and neg_inf_terms counts the terms.
 */
struct LyapunovReport
{
    double value = 0.0;
    double std_error = 0.0;
    std::size_t count = 0;
    LyapunovKind kind = LyapunovKind::EmpiricalOnData;
    std::size_t neg_inf_terms = 0;
    double tail_bound = 0.0;  ///< model-implied only: truncation bound on the inner series

    bool has_neg_inf() const { return neg_inf_terms > 0; }
};

/*!
 * Sample mean of log lipschitz_coeff(theta, X_t) over the data.
 *
 * The standard error uses non-overlapping batch means with batch length
 * floor(sqrt(n)) since the terms are serially dependent through the
 * volatility. For GARCH every term is log beta.
 */
LyapunovReport empirical_lyapunov(ModelKind model, const ParamVector& theta, std::span<const double> x);

/// Mean only, without the batch-means pass. Used as the estimator constraint.
double empirical_lyapunov_value(ModelKind model, const ParamVector& theta, std::span<const double> x);

inline constexpr std::size_t kDefaultTrunc = 200;

/*!
 * Monte Carlo estimate of the EGARCH Lyapunov coefficient implied by the
 * model at theta0,
 *   E log max{beta, exp(log sigma^2_0 / 2 - alpha / (2 (1 - beta)))
 *                     (gamma Z_0 + delta |Z_0|) / 2 - beta},
 * with log sigma^2_0 from its MA expansion truncated after `trunc` terms.
 * Draws are iid; chunk c of 1024 draws uses block c of the ModelImpliedMc
 * stream, so the result does not depend on `workers` (0 = all cores).
 */
LyapunovReport model_implied_lyapunov(const ParamVector& theta0, const InnovationDist& dist, std::size_t m,
                                      std::size_t trunc = kDefaultTrunc, std::uint64_t seed = 0,
                                      unsigned workers = 0);

struct ScanPoint
{
    ParamVector theta;
    LyapunovReport report;
};

/*!
 * model_implied_lyapunov over a tensor grid of the box. An axis with one
 * point sits at its lower bound. Points violating delta >= |gamma| are
 * skipped. Every point reuses the same seed (common random numbers).
 */
std::vector<ScanPoint> region_scan(const ParamBox& box, const std::array<std::size_t, 4>& grid,
                                   const InnovationDist& dist, std::size_t m, std::size_t trunc,
                                   std::uint64_t seed, unsigned workers = 0);

/// CSV `alpha,beta,gamma,delta,value,se`.
void write_scan_csv(const std::vector<ScanPoint>& points, std::ostream& out);

}  // namespace volsre
