// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <string_view>

//---------------------------------------------------------------------------//
// Data-parallel inner loops. Every kernel exists as a scalar reference and,
// on x86-64 hosts with AVX2+FMA, as a vectorized variant selected at run
// time. Variants agree to rounding (tests/test_kernels.cpp); they are not
// bit-identical because the vector exp/log and the summation order differ.
//---------------------------------------------------------------------------//

namespace volsre::kernels {

/// Per-observation log Lipschitz term
///   log max{beta, scale * (gamma x + delta |x|) - beta},
/// scale = exp(-alpha / (2 (1 - beta))) / 2 (finite, supplied by the caller).
struct LipschitzTermParams
{
    double beta;
    double scale;
    double gamma;
    double delta;
};

struct LogSum
{
    double sum = 0.0;          ///< over finite terms
    double sum_sq = 0.0;       ///< over finite terms
    std::size_t neg_inf = 0;   ///< terms equal to -infinity (zero argument)
};

/// Coefficients of the EGARCH innovation W = gamma z + delta |z| and of
/// V = beta - W / 2.
struct SeriesParams
{
    double alpha;
    double beta;
    double gamma;
    double delta;
};

struct KernelTable
{
    std::string_view name;

    /// Writes one log term per observation.
    void (*log_lipschitz_terms)(std::span<const double> x, const LipschitzTermParams& p,
                                std::span<double> out);

    /// Sum and sum of squares of the log terms without materializing them.
    LogSum (*log_lipschitz_sum)(std::span<const double> x, const LipschitzTermParams& p);

    /*!
     * Model-implied Lyapunov integrand for `lanes` independent draws.
     *
     * z holds (trunc + 1) rows of `lanes` innovations, z[k * lanes + j]
     * being Z_{-k} of draw j. For each draw
     *   S   = sum_{k=1..trunc} beta^{k-1} W(Z_{-k}),
     *   out = log max{beta, exp(S / 2) W(Z_0) / 2 - beta}.
     */
    void (*implied_lyapunov_terms)(const double* z, std::size_t lanes, std::size_t trunc,
                                   const SeriesParams& p, double* out);

    /*!
     * Truncated gradient series of the EGARCH log-volatility at theta0.
     *
     * z holds 2L rows of `lanes` innovations in time order. The first L rows
     * warm up log sigma^2 from alpha / (1 - beta); over the last L rows
     *   G <- U + V G,  U = (1, log sigma^2, Z, |Z|),  V = beta - W / 2,
     * from G = 0. grad receives 4 rows of `lanes` values (component-major).
     */
    void (*gradient_series)(const double* z, std::size_t lanes, std::size_t L, const SeriesParams& p,
                            double* grad);
};

const KernelTable& scalar_table();

/// nullptr when the binary or the host lacks AVX2+FMA.
const KernelTable* avx2_table();

/// Table used by the library. Picks AVX2 when available unless the
/// environment variable VOLSRE_KERNELS is set to "scalar".
const KernelTable& active();

}  // namespace volsre::kernels
