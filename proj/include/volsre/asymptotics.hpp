// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <cstdint>

#include "volsre/models.hpp"

namespace volsre {

/// Moments of Z_0 and of V_0 = beta - (gamma Z_0 + delta |Z_0|) / 2.
struct InnovationMoments
{
    double e_absz = 0.0;
    double e_z4 = 0.0;       ///< +infinity when undefined (Student-t, nu <= 4)
    double e_zabsz = 0.0;    ///< E Z|Z|, zero for symmetric laws
    double e_v = 0.0;
    double e_v2 = 0.0;
    double e_absz_v = 0.0;

    bool e_z4_finite() const;
};

/// E|Z| and E Z|Z| by adaptive quadrature against the density (tolerance
/// 1e-10); the V moments follow from them with E Z = 0 and E Z^2 = 1.
InnovationMoments innovation_moments(const ParamVector& theta0, const InnovationDist& dist);

struct MmPrimeCheck
{
    bool ok = false;
    double margin = 0.0;  ///< 1 - E V_0^2
};

/// E Z^4 finite and E V_0^2 < 1, the condition for B (and V) to exist.
MmPrimeCheck check_mm_prime(const InnovationMoments& mom);

/*!
 * Closed-form diagonal of B = E[grad g grad g^T] at theta0 (EGARCH).
 *
 * B11, B33 and B44 follow the classical series computation. B22 is obtained
 * from the stationary second moments of (log sigma^2, d g / d beta):
 * with y = log sigma^2 and D = d g / d beta,
 *   E y, E y^2 from y_t = alpha + beta y_{t-1} + W_{t-1},
 *   E D = E y / (1 - E V), E yD from the joint recursion,
 *   B22 = (E y^2 + 2 E V E yD) / (1 - E V^2).
 * `b22_printed` is the alternative three-part expansion kept for reference;
 * it does not agree with B = E[grad g grad g^T] (see README).
 *
 * Throws DomainError("near-singular moments") when a denominator is below
 * 1e-10, and InfeasibleError when (MM') fails.
 */
struct BDiagClosed
{
    std::array<double, 4> diag{};
    double b22_printed = 0.0;
};

BDiagClosed b_diag_closed_form(const ParamVector& theta0, const InnovationMoments& mom);

struct BMatrixEstimate
{
    Eigen::MatrixXd b;
    Eigen::MatrixXd se;      ///< delete-one-chunk jackknife
    std::size_t m = 0;
    std::size_t L = 0;
    double tail_bound = 0.0;
};

inline constexpr std::size_t kDefaultBReplications = 100000;
inline constexpr std::size_t kDefaultBTrunc = 400;

/*!
 * Monte Carlo estimate of B for EGARCH(1,1).
 *
 * Each replication warms log sigma^2 up over L steps from alpha / (1 - beta)
 * and then runs grad g_t = U_{t-1} + V_{t-1} grad g_{t-1} for L steps from
 * 0, which equals the series truncated after L terms. Replications come in
 * chunks of 256 on blocks of the GradientSeriesMc stream. tail_bound is
 * (E V_0^2)^L. Does not require (MM'); without it the estimates grow with L.
 */
BMatrixEstimate b_matrix_mc(const ParamVector& theta0, const InnovationDist& dist,
                            std::size_t m = kDefaultBReplications, std::size_t L = kDefaultBTrunc,
                            std::uint64_t seed = 0, unsigned workers = 0);

/*!
 * Monte Carlo estimate of B = E[grad log sigma^2 grad log sigma^2^T] for
 * GARCH(1,1) (3 x 3), with
 * grad sigma^2_t = (1, sigma^2_{t-1}, X^2_{t-1}) + beta grad sigma^2_{t-1}.
 * tail_bound is beta^L.
 */
BMatrixEstimate garch_b_matrix_mc(const ParamVector& theta0, const InnovationDist& dist,
                                  std::size_t m = kDefaultBReplications, std::size_t L = kDefaultBTrunc,
                                  std::uint64_t seed = 0, unsigned workers = 0);

struct AsymptoticReport
{
    Eigen::MatrixXd B;
    Eigen::MatrixXd P;   ///< B / 2
    Eigen::MatrixXd Q;   ///< (E Z^4 - 1) B / 4
    Eigen::MatrixXd V;   ///< (E Z^4 - 1) B^{-1}
    Eigen::VectorXd se;  ///< sqrt(V_ii / n)
    double e_z4 = 0.0;
    std::size_t n = 0;
    /// max-abs residuals, relative to max(1, max |V|) and max(1, E Z^4 - 1)
    double sandwich_residual = 0.0;  ///< P^{-1} Q P^{-1} - V
    double identity_residual = 0.0;  ///< V B - (E Z^4 - 1) I
};

/*!
 * Sandwich covariance from B. Throws DomainError when B is not positive
 * definite, or its reciprocal condition number is below 1e-12 (linear
 * independence violated or Monte Carlo noise), or e_z4 <= 1.
 */
AsymptoticReport asymptotic_variance(const Eigen::MatrixXd& B, double e_z4, std::size_t n);

}  // namespace volsre
