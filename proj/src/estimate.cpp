// SPDX-License-Identifier: Apache-2.0
#include "volsre/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>

#include "parallel.hpp"
#include "volsre/error.hpp"
#include "volsre/invertibility.hpp"
#include "volsre/optimize.hpp"
#include "volsre/rng.hpp"

namespace volsre {
namespace {

constexpr int kRepairSteps = 30;

double clamp_to(const Interval& iv, double v)
{
    return std::clamp(v, iv.lo, iv.hi);
}

// Admissible point near the middle of plausible values, used to pull
// infeasible start points inward.
ParamVector safe_center(ModelKind model, const ParamBox& box, std::span<const double> x)
{
    double mean_sq = 0.0;
    for (double v : x)
        mean_sq += v * v;
    mean_sq = std::max(mean_sq / static_cast<double>(x.size()), 1e-300);

    ParamVector c;
    c.beta = clamp_to(box.axes[1], 0.5);
    if (model == ModelKind::Garch11)
    {
        c.gamma = clamp_to(box.axes[2], 0.1);
        c.alpha = clamp_to(box.axes[0], mean_sq * std::max(1.0 - c.beta - c.gamma, 0.05));
        c.delta = 0.0;
        return c;
    }
    c.gamma = clamp_to(box.axes[2], 0.0);
    c.delta = clamp_to(box.axes[3], std::abs(c.gamma));
    c.alpha = clamp_to(box.axes[0], (1.0 - c.beta) * std::log(mean_sq));
    return c;
}

struct Problem
{
    ModelKind model;
    std::span<const double> x;
    const ParamBox& box;
    const FitOptions& opts;
    std::vector<std::size_t> free_axes;
    ParamVector fixed;

    ParamVector to_theta(std::span<const double> u) const
    {
        ParamVector t = fixed;
        for (std::size_t k = 0; k < free_axes.size(); ++k)
        {
            const Interval& iv = box.axes[free_axes[k]];
            t[free_axes[k]] = iv.lo + u[k] * iv.width();
        }
        return t;
    }

    std::vector<double> to_unit(const ParamVector& t) const
    {
        std::vector<double> u(free_axes.size());
        for (std::size_t k = 0; k < free_axes.size(); ++k)
        {
            const Interval& iv = box.axes[free_axes[k]];
            u[k] = (t[free_axes[k]] - iv.lo) / iv.width();
        }
        return u;
    }

    double qlik_at(const ParamVector& t) const
    {
        return qlik(model, t, x, opts.g_init, opts.burn).value;
    }

    double constraint_at(const ParamVector& t) const
    {
        return empirical_lyapunov_value(model, t, x);
    }

    double objective(const ParamVector& t) const
    {
        if (!box.contains(model, t) || !is_admissible(model, t))
            return HUGE_VAL;
        const double q = qlik_at(t);
        if (!std::isfinite(q))
            return HUGE_VAL;
        const double excess = std::max(0.0, constraint_at(t) + opts.margin);
        return q + opts.penalty * excess * excess;
    }

    double objective_unit(std::span<const double> u) const
    {
        for (double v : u)
            if (!(v >= 0.0 && v <= 1.0))
                return HUGE_VAL;
        return objective(to_theta(u));
    }
};

struct StartOutcome
{
    ParamVector theta;
    double qlik = HUGE_VAL;
    double constraint = HUGE_VAL;
    bool feasible = false;
    bool converged = false;
    std::size_t iterations = 0;
};

// Latin hypercube in the free coordinates; row s is start s.
std::vector<std::vector<double>> latin_hypercube(std::size_t starts, std::size_t dims, std::uint64_t seed)
{
    RandomStream rng(seed, StreamPurpose::StartPoints);
    std::vector<std::vector<double>> pts(starts, std::vector<double>(dims));
    std::vector<std::size_t> perm(starts);
    for (std::size_t k = 0; k < dims; ++k)
    {
        std::iota(perm.begin(), perm.end(), 0);
        for (std::size_t i = starts; i > 1; --i)
            std::swap(perm[i - 1], perm[rng.next_u64() % i]);
        for (std::size_t s = 0; s < starts; ++s)
            pts[s][k] = (static_cast<double>(perm[s]) + rng.uniform()) / static_cast<double>(starts);
    }
    return pts;
}

ParamVector repair_start(const Problem& pb, std::span<const double> u0, const ParamVector& center)
{
    // Shrink toward the safe center until the objective is finite.
    const ParamVector raw = pb.to_theta(u0);
    ParamVector t = raw;
    double lambda = 1.0;
    for (int step = 0; step < kRepairSteps && !std::isfinite(pb.objective(t)); ++step)
    {
        lambda *= 0.5;
        for (std::size_t i = 0; i < 4; ++i)
            t[i] = center[i] + lambda * (raw[i] - center[i]);
    }
    if (!std::isfinite(pb.objective(t)))
        t = center;
    return t;
}

Problem make_problem(ModelKind model, std::span<const double> x, const ParamBox& box, const FitOptions& opts)
{
    Problem pb{model, x, box, opts, {}, box.lower()};
    for (std::size_t i = 0; i < param_count(model); ++i)
        if (box.axes[i].width() > 0.0)
            pb.free_axes.push_back(i);
    if (model == ModelKind::Garch11)
        pb.fixed.delta = 0.0;
    return pb;
}

void validate(ModelKind model, std::span<const double> x, const ParamBox& box, const FitOptions& opts)
{
    if (x.size() < 100)
        throw DomainError("fit: need at least 100 observations");
    if (x.size() <= opts.burn)
        throw DomainError("fit: burn-in exceeds the sample");
    if (opts.starts == 0)
        throw DomainError("fit: starts must be positive");
    require_valid_box(model, box);
}

StartOutcome run_start(const Problem& pb, const ParamVector& t)
{
    StartOutcome out;
    if (!std::isfinite(pb.objective(t)))
        return out;

    NelderMeadOptions nm;
    nm.tol = pb.opts.tol;
    nm.max_iter = pb.opts.max_iter;
    auto f = [&pb](std::span<const double> u) { return pb.objective_unit(u); };

    NelderMeadResult r = nelder_mead(f, pb.to_unit(t), nm);
    out.iterations = r.iterations;
    NelderMeadResult r2 = nelder_mead(f, r.x, nm);
    out.iterations += r2.iterations;
    if (r2.f <= r.f)
        r = r2;
    else
        r.converged = r.converged && r2.converged;
    if (!std::isfinite(r.f))
        return out;

    out.theta = pb.to_theta(r.x);
    out.qlik = pb.qlik_at(out.theta);
    out.constraint = pb.constraint_at(out.theta);
    out.feasible = std::isfinite(out.qlik) && out.constraint < 0.0;
    out.converged = r.converged && r2.converged;
    return out;
}

std::string fmt17(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::vector<ParamVector> fit_start_points(ModelKind model, std::span<const double> x, const ParamBox& box,
                                          const FitOptions& opts)
{
    validate(model, x, box, opts);
    const Problem pb = make_problem(model, x, box, opts);
    if (pb.free_axes.empty())
        return std::vector<ParamVector>(opts.starts, pb.fixed);
    const ParamVector center = safe_center(model, box, x);
    std::vector<ParamVector> out;
    for (const auto& u : latin_hypercube(opts.starts, pb.free_axes.size(), opts.seed))
        out.push_back(repair_start(pb, u, center));
    return out;
}

double fit_objective(ModelKind model, std::span<const double> x, const ParamBox& box, const FitOptions& opts,
                     const ParamVector& theta)
{
    return make_problem(model, x, box, opts).objective(theta);
}

FitResult fit(ModelKind model, std::span<const double> x, const ParamBox& box, const FitOptions& opts)
{
    validate(model, x, box, opts);
    const Problem pb = make_problem(model, x, box, opts);
    std::vector<StartOutcome> outcomes(opts.starts);

    if (pb.free_axes.empty())
    {
        StartOutcome o;
        o.theta = pb.fixed;
        o.qlik = pb.qlik_at(o.theta);
        o.constraint = pb.constraint_at(o.theta);
        o.feasible = std::isfinite(o.qlik) && o.constraint < 0.0;
        o.converged = true;
        std::fill(outcomes.begin(), outcomes.end(), o);
    }
    else
    {
        const std::vector<ParamVector> starts = fit_start_points(model, x, box, opts);
        detail::parallel_for(opts.starts, opts.workers,
                             [&](std::size_t s) { outcomes[s] = run_start(pb, starts[s]); });
    }

    FitResult res;
    res.n = x.size();
    res.starts = opts.starts;
    res.seed = opts.seed;
    std::optional<std::size_t> best;
    for (std::size_t s = 0; s < outcomes.size(); ++s)
    {
        const StartOutcome& o = outcomes[s];
        res.iterations += o.iterations;
        if (!o.feasible)
            continue;
        ++res.feasible_starts;
        if (!best)
        {
            best = s;
            continue;
        }
        const StartOutcome& b = outcomes[*best];
        if (o.qlik < b.qlik || (o.qlik == b.qlik && o.constraint < b.constraint))
            best = s;
    }
    if (!best)
        throw InfeasibleError("fit: no feasible point found (every start ends with a nonnegative "
                              "empirical Lyapunov coefficient or a divergent filter)");

    const StartOutcome& b = outcomes[*best];
    res.theta_hat = b.theta;
    res.qlik = b.qlik;
    res.constraint_value = b.constraint;
    res.converged = b.converged && b.feasible;
    res.best_start_index = *best;
    return res;
}

std::vector<ProfilePoint> profile(ModelKind model, std::span<const double> x, const ParamVector& center,
                                  std::size_t axis, std::span<const double> grid, std::size_t burn)
{
    if (axis >= param_count(model))
        throw DomainError("profile: axis out of range for the model");
    std::vector<ProfilePoint> out;
    out.reserve(grid.size());
    for (double v : grid)
    {
        ProfilePoint p;
        p.theta = center;
        p.theta[axis] = v;
        if (is_admissible(model, p.theta))
        {
            p.qlik = qlik(model, p.theta, x, std::nullopt, burn).value;
            p.constraint = empirical_lyapunov_value(model, p.theta, x);
        }
        else
        {
            p.qlik = HUGE_VAL;
            p.constraint = HUGE_VAL;
        }
        out.push_back(p);
    }
    return out;
}

void write_profile_csv(const std::vector<ProfilePoint>& points, std::ostream& out)
{
    out << "alpha,beta,gamma,delta,qlik,constraint\n";
    for (const ProfilePoint& p : points)
        out << fmt17(p.theta.alpha) << ',' << fmt17(p.theta.beta) << ',' << fmt17(p.theta.gamma) << ','
            << fmt17(p.theta.delta) << ',' << fmt17(p.qlik) << ',' << fmt17(p.constraint) << '\n';
}

}  // namespace volsre
