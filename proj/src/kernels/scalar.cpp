// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>

#include "kernels_impl.hpp"
#include "volsre/kernels.hpp"

namespace volsre::kernels {
namespace {

void log_lipschitz_terms(std::span<const double> x, const LipschitzTermParams& p, std::span<double> out)
{
    for (std::size_t i = 0; i < x.size(); ++i)
        out[i] = detail::log_lipschitz_term(x[i], p);
}

LogSum log_lipschitz_sum(std::span<const double> x, const LipschitzTermParams& p)
{
    LogSum acc;
    for (double xi : x)
    {
        const double t = detail::log_lipschitz_term(xi, p);
        if (t == -HUGE_VAL)
        {
            ++acc.neg_inf;
            continue;
        }
        acc.sum += t;
        acc.sum_sq += t * t;
    }
    return acc;
}

void implied_lyapunov_terms(const double* z, std::size_t lanes, std::size_t trunc, const SeriesParams& p,
                            double* out)
{
    for (std::size_t j = 0; j < lanes; ++j)
        out[j] = detail::implied_lyapunov_term(z + j, lanes, trunc, p);
}

void gradient_series(const double* z, std::size_t lanes, std::size_t L, const SeriesParams& p, double* grad)
{
    for (std::size_t j = 0; j < lanes; ++j)
        detail::gradient_series_lane(z + j, lanes, L, p, grad + j, lanes);
}

}  // namespace

const KernelTable& scalar_table()
{
    static const KernelTable table{"scalar", &log_lipschitz_terms, &log_lipschitz_sum,
                                   &implied_lyapunov_terms, &gradient_series};
    return table;
}

}  // namespace volsre::kernels
