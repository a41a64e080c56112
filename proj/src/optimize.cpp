// SPDX-License-Identifier: Apache-2.0
#include "volsre/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "volsre/error.hpp"

namespace volsre {

NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                             std::vector<double> x0, const NelderMeadOptions& opts)
{
    const std::size_t d = x0.size();
    NelderMeadResult res;
    if (d == 0)
        throw DomainError("nelder_mead: empty start point");

    auto eval = [&](const std::vector<double>& p) {
        ++res.evaluations;
        const double v = f(p);
        return std::isnan(v) ? HUGE_VAL : v;
    };

    std::vector<std::vector<double>> s(d + 1, x0);
    std::vector<double> fv(d + 1);
    for (std::size_t i = 0; i < d; ++i)
    {
        const double step = x0[i] + opts.initial_step <= 1.0 ? opts.initial_step : -opts.initial_step;
        s[i + 1][i] += step;
    }
    for (std::size_t i = 0; i <= d; ++i)
        fv[i] = eval(s[i]);

    std::vector<std::size_t> order(d + 1);
    std::vector<double> centroid(d), xr(d), xe(d), xc(d);
    auto point = [&](const std::vector<double>& from, double t, std::vector<double>& out) {
        for (std::size_t j = 0; j < d; ++j)
            out[j] = centroid[j] + t * (from[j] - centroid[j]);
    };

    for (;;)
    {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second = order[d - 1];

        double diam = 0.0;
        for (std::size_t i = 0; i <= d; ++i)
            for (std::size_t j = 0; j < d; ++j)
                diam = std::max(diam, std::abs(s[i][j] - s[best][j]));
        if (diam < opts.tol && std::isfinite(fv[best]))
        {
            res.converged = true;
            break;
        }
        if (res.iterations >= opts.max_iter)
            break;
        ++res.iterations;

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i <= d; ++i)
            if (i != worst)
                for (std::size_t j = 0; j < d; ++j)
                    centroid[j] += s[i][j];
        for (double& c : centroid)
            c /= static_cast<double>(d);

        point(s[worst], -1.0, xr);
        const double fr = eval(xr);
        if (fr < fv[best])
        {
            point(s[worst], -2.0, xe);
            const double fe = eval(xe);
            if (fe < fr)
            {
                s[worst] = xe;
                fv[worst] = fe;
            }
            else
            {
                s[worst] = xr;
                fv[worst] = fr;
            }
            continue;
        }
        if (fr < fv[second])
        {
            s[worst] = xr;
            fv[worst] = fr;
            continue;
        }
        // Outside contraction when the reflection beats the worst vertex,
        // inside contraction otherwise.
        const bool outside = fr < fv[worst];
        point(outside ? xr : s[worst], 0.5, xc);
        const double fc = eval(xc);
        if (fc < (outside ? fr : fv[worst]))
        {
            s[worst] = xc;
            fv[worst] = fc;
            continue;
        }
        for (std::size_t i = 0; i <= d; ++i)
        {
            if (i == best)
                continue;
            for (std::size_t j = 0; j < d; ++j)
                s[i][j] = s[best][j] + 0.5 * (s[i][j] - s[best][j]);
            fv[i] = eval(s[i]);
        }
    }

    const std::size_t best =
        static_cast<std::size_t>(std::min_element(fv.begin(), fv.end()) - fv.begin());
    res.x = s[best];
    res.f = fv[best];
    return res;
}

}  // namespace volsre
