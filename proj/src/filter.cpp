// SPDX-License-Identifier: Apache-2.0
#include "volsre/filter.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "volsre/error.hpp"

namespace volsre {
namespace {

double start_value(ModelKind model, const ParamVector& theta, std::optional<double> g_init)
{
    const double floor = state_floor(theta);
    if (!g_init)
        return floor;
    if (!std::isfinite(*g_init))
        throw DomainError("filter: initial value must be finite");
    if (model == ModelKind::Egarch11)
        return std::max(*g_init, floor);
    return *g_init;
}

/*!
 * Runs the recursion and calls sink(t, g_t, inv_l) for t = 1..n, where
 * inv_l = 1 / l(g_t). Returns false on divergence.
 */
template <class Sink>
bool drive(ModelKind model, const ParamVector& th, std::span<const double> x, double g0, Sink&& sink)
{
    const std::size_t n = x.size();
    if (model == ModelKind::Egarch11)
    {
        double g = g0;
        if (std::abs(g) > kDivergenceThreshold)
            return false;
        double e = std::exp(-0.5 * g);
        double x_prev = 0.0;
        for (std::size_t t = 0; t < n; ++t)
        {
            g = th.alpha + th.beta * g + (th.gamma * x_prev + th.delta * std::abs(x_prev)) * e;
            if (!(std::abs(g) <= kDivergenceThreshold))
                return false;
            e = std::exp(-0.5 * g);
            sink(t, g, e * e);
            x_prev = x[t];
        }
        return true;
    }
    double g = g0;
    double x_prev = 0.0;
    for (std::size_t t = 0; t < n; ++t)
    {
        g = th.alpha + th.beta * g + th.gamma * x_prev * x_prev;
        if (!(g > 0.0 && std::isfinite(g)))
            return false;
        sink(t, g, 1.0 / g);
        x_prev = x[t];
    }
    return true;
}

double log_link(ModelKind model, double g)
{
    return model == ModelKind::Egarch11 ? g : std::log(g);
}

std::string fmt17(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

double default_g_init(ModelKind, const ParamVector& theta)
{
    return state_floor(theta);
}

FilterTrajectory run_filter(ModelKind model, const ParamVector& theta, std::span<const double> x,
                            std::optional<double> g_init, std::size_t burn)
{
    require_admissible(model, theta);
    if (x.empty())
        throw DomainError("run_filter: empty series");
    FilterTrajectory tr;
    tr.theta = theta;
    tr.model = model;
    tr.burn = burn;
    tr.g_init = start_value(model, theta, g_init);
    tr.g.resize(x.size());
    std::size_t filled = 0;
    const bool ok = drive(model, theta, x, tr.g_init, [&](std::size_t t, double g, double) {
        tr.g[t] = g;
        filled = t + 1;
    });
    if (!ok)
    {
        tr.divergent = true;
        const double last = filled > 0 ? tr.g[filled - 1] : tr.g_init;
        std::fill(tr.g.begin() + static_cast<std::ptrdiff_t>(filled), tr.g.end(), last);
    }
    return tr;
}

QlikValue qlik(ModelKind model, const ParamVector& theta, std::span<const double> x,
               std::optional<double> g_init, std::size_t burn)
{
    if (x.size() <= burn)
        throw DomainError("qlik: need more observations than the burn-in");
    QlikValue q;
    q.n_effective = x.size() - burn;
    if (!is_admissible(model, theta))
    {
        q.value = HUGE_VAL;
        return q;
    }
    double sum = 0.0;
    const bool ok = drive(model, theta, x, start_value(model, theta, g_init),
                          [&](std::size_t t, double g, double inv_l) {
                              if (t >= burn)
                                  sum += x[t] * x[t] * inv_l + log_link(model, g);
                          });
    q.value = ok ? 0.5 * sum / static_cast<double>(q.n_effective) : HUGE_VAL;
    if (!std::isfinite(q.value))
        q.value = HUGE_VAL;
    return q;
}

QlikValue qlik(const FilterTrajectory& traj, std::span<const double> x)
{
    if (x.size() != traj.g.size())
        throw DomainError("qlik: trajectory and data lengths differ");
    if (x.size() <= traj.burn)
        throw DomainError("qlik: need more observations than the burn-in");
    QlikValue q;
    q.n_effective = x.size() - traj.burn;
    if (traj.divergent)
    {
        q.value = HUGE_VAL;
        return q;
    }
    double sum = 0.0;
    for (std::size_t t = traj.burn; t < x.size(); ++t)
    {
        const double g = traj.g[t];
        sum += x[t] * x[t] / link(traj.model, g) + log_link(traj.model, g);
    }
    q.value = 0.5 * sum / static_cast<double>(q.n_effective);
    return q;
}

Forecast forecast(ModelKind model, const ParamVector& theta, std::span<const double> x,
                  std::optional<double> g_init)
{
    const FilterTrajectory tr = run_filter(model, theta, x, g_init, 0);
    Forecast f;
    f.divergent = tr.divergent;
    f.sigma2_hat.resize(tr.g.size());
    for (std::size_t t = 0; t < tr.g.size(); ++t)
        f.sigma2_hat[t] = link(model, tr.g[t]);
    if (tr.divergent)
    {
        f.next = HUGE_VAL;
        return f;
    }
    const double g_next = sre_step(model, theta, tr.g.back(), x.back());
    f.next = link(model, g_next);
    return f;
}

void write_trajectory_csv(const FilterTrajectory& traj, std::ostream& out)
{
    out << "t,g,sigma2_hat\n";
    for (std::size_t t = 0; t < traj.g.size(); ++t)
        out << (t + 1) << ',' << fmt17(traj.g[t]) << ',' << fmt17(link(traj.model, traj.g[t])) << '\n';
}

}  // namespace volsre
