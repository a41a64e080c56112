// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "volsre/models.hpp"

namespace volsre {

/// Observation series X_1..X_n. Simulated paths also carry the latent
/// variance and the innovations, with x[t] = sqrt(sigma2[t]) z[t].
struct Path
{
    std::vector<double> x;
    std::optional<std::vector<double>> sigma2;
    std::vector<double> z;
    std::uint64_t seed = 0;
    ModelKind model = ModelKind::Egarch11;
    ParamVector theta0{};

    std::size_t size() const { return x.size(); }

    /// Wraps observed data (no latent quantities).
    static Path from_observations(std::vector<double> x);
};

inline constexpr std::size_t kDefaultBurnIn = 2000;

/*!
 * Simulates n observations after burn_in discarded steps.
 *
 * The recursion starts at the unconditional mean: alpha / (1 - beta) for the
 * EGARCH log-variance, alpha / (1 - beta - gamma) for the GARCH variance when
 * beta + gamma < 1 (else alpha / (1 - beta)). Innovations come from the
 * Innovations stream of `seed`. Throws InfeasibleError for a GARCH parameter
 * with E log(beta + gamma Z^2) >= 0.
 */
Path simulate(ModelKind model, const ParamVector& theta0, const InnovationDist& dist, std::size_t n,
              std::size_t burn_in = kDefaultBurnIn, std::uint64_t seed = 0);

struct McEstimate
{
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t count = 0;
};

/// Monte Carlo mean and standard error of log(beta + gamma Z^2) (GARCH).
McEstimate stationarity_lyapunov(const ParamVector& theta0, const InnovationDist& dist, std::size_t m,
                                 std::uint64_t seed);

/// E log(beta + gamma Z^2) by quadrature; -inf when beta = gamma = 0.
double stationarity_lyapunov_exact(const ParamVector& theta0, const InnovationDist& dist);

/// CSV `t,x,sigma2` (t from 1, 17 significant digits). sigma2 is left empty
/// for observed data.
void write_path_csv(const Path& path, std::ostream& out);

}  // namespace volsre
