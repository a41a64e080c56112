// SPDX-License-Identifier: Apache-2.0
#pragma once

// Scalar per-element bodies shared by the reference table and by the
// remainder loops of the vector variants.

#include <algorithm>
#include <cmath>

#include "volsre/kernels.hpp"

namespace volsre::kernels::detail {

// Above this, exp(L) - beta and exp(L) agree to ~1e-13 relative.
inline constexpr double kLogLinearCut = 30.0;

inline double log_lipschitz_term(double x, const LipschitzTermParams& p)
{
    const double w = p.gamma * x + p.delta * std::abs(x);
    return std::log(std::max(p.beta, p.scale * w - p.beta));
}

inline double innovation(double z, const SeriesParams& p)
{
    return p.gamma * z + p.delta * std::abs(z);
}

inline double implied_lyapunov_term(const double* z, std::size_t stride, std::size_t trunc,
                                    const SeriesParams& p)
{
    double s = 0.0;
    for (std::size_t k = trunc; k >= 1; --k)
        s = innovation(z[k * stride], p) + p.beta * s;
    const double w0 = innovation(z[0], p);
    if (!(w0 > 0.0))
        return std::log(p.beta);
    const double l1 = 0.5 * s + std::log(0.5 * w0);
    if (l1 > kLogLinearCut)
        return l1;
    return std::log(std::max(p.beta, std::exp(l1) - p.beta));
}

inline void gradient_series_lane(const double* z, std::size_t stride, std::size_t L, const SeriesParams& p,
                                 double* grad, std::size_t grad_stride)
{
    double y = p.alpha / (1.0 - p.beta);
    for (std::size_t s = 0; s < L; ++s)
        y = p.alpha + p.beta * y + innovation(z[s * stride], p);
    double g0 = 0.0, g1 = 0.0, g2 = 0.0, g3 = 0.0;
    for (std::size_t s = L; s < 2 * L; ++s)
    {
        const double zs = z[s * stride];
        const double w = innovation(zs, p);
        const double v = p.beta - 0.5 * w;
        g0 = 1.0 + v * g0;
        g1 = y + v * g1;
        g2 = zs + v * g2;
        g3 = std::abs(zs) + v * g3;
        y = p.alpha + p.beta * y + w;
    }
    grad[0] = g0;
    grad[grad_stride] = g1;
    grad[2 * grad_stride] = g2;
    grad[3 * grad_stride] = g3;
}

}  // namespace volsre::kernels::detail

namespace volsre::kernels::detail {

/// The AVX2 table when this binary contains it, regardless of host support.
const KernelTable* avx2_table_if_built();

/// Vector exp/log over n values (test hooks; no-ops without the AVX2 build).
void avx2_exp(const double* in, double* out, std::size_t n);
void avx2_log(const double* in, double* out, std::size_t n);

}  // namespace volsre::kernels::detail
