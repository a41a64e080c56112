// SPDX-License-Identifier: Apache-2.0
#include "volsre/invertibility.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "parallel.hpp"
#include "volsre/error.hpp"
#include "volsre/kernels.hpp"
#include "volsre/quadrature.hpp"
#include "volsre/rng.hpp"

namespace volsre {
namespace {

constexpr std::size_t kLanes = 1024;

// log of exp(-alpha / (2 (1 - beta))) / 2.
double log_scale(const ParamVector& t)
{
    return -t.alpha / (2.0 * (1.0 - t.beta)) - std::log(2.0);
}

bool scale_overflows(const ParamVector& t)
{
    return log_scale(t) > 700.0;
}

// Slow path for parameters whose scale factor overflows a double.
double log_term_logdomain(const ParamVector& t, double x)
{
    const double w = t.gamma * x + t.delta * std::abs(x);
    if (!(w > 0.0))
        return std::log(t.beta);
    const double l = log_scale(t) + std::log(w);
    if (l > 30.0)
        return l;
    return std::log(std::max(t.beta, std::exp(l) - t.beta));
}

void log_terms(const ParamVector& t, std::span<const double> x, std::span<double> out)
{
    if (scale_overflows(t))
    {
        for (std::size_t i = 0; i < x.size(); ++i)
            out[i] = log_term_logdomain(t, x[i]);
        return;
    }
    const kernels::LipschitzTermParams p{t.beta, std::exp(log_scale(t)), t.gamma, t.delta};
    kernels::active().log_lipschitz_terms(x, p, out);
}

LyapunovReport constant_report(double value, std::size_t n, LyapunovKind kind)
{
    LyapunovReport r;
    r.value = value;
    r.count = n;
    r.kind = kind;
    if (value == -HUGE_VAL)
        r.neg_inf_terms = n;
    return r;
}

std::string fmt17(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

LyapunovReport empirical_lyapunov(ModelKind model, const ParamVector& theta, std::span<const double> x)
{
    require_admissible(model, theta);
    const std::size_t n = x.size();
    if (n < 2)
        throw DomainError("empirical_lyapunov: need at least 2 observations");
    if (model == ModelKind::Garch11 || (theta.gamma == 0.0 && theta.delta == 0.0))
        return constant_report(std::log(theta.beta), n, LyapunovKind::EmpiricalOnData);

    std::vector<double> terms(n);
    log_terms(theta, x, terms);

    LyapunovReport r;
    r.count = n;
    r.kind = LyapunovKind::EmpiricalOnData;
    r.neg_inf_terms = static_cast<std::size_t>(std::count(terms.begin(), terms.end(), -HUGE_VAL));
    if (r.neg_inf_terms > 0)
    {
        r.value = -HUGE_VAL;
        return r;
    }

    // Shift by the first term so that constant series come out exact.
    const double shift = terms[0];
    double sum = 0.0;
    for (double t : terms)
        sum += t - shift;
    const double mean_dev = sum / static_cast<double>(n);
    r.value = shift + mean_dev;

    const std::size_t b = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
    const std::size_t k = n / b;
    if (k >= 2)
    {
        double ss = 0.0;
        for (std::size_t j = 0; j < k; ++j)
        {
            double bsum = 0.0;
            for (std::size_t i = j * b; i < (j + 1) * b; ++i)
                bsum += terms[i] - shift;
            const double d = bsum / static_cast<double>(b) - mean_dev;
            ss += d * d;
        }
        r.std_error = std::sqrt(ss / static_cast<double>(k - 1) / static_cast<double>(k));
    }
    return r;
}

double empirical_lyapunov_value(ModelKind model, const ParamVector& theta, std::span<const double> x)
{
    if (x.empty())
        throw DomainError("empirical_lyapunov: empty series");
    if (model == ModelKind::Garch11 || (theta.gamma == 0.0 && theta.delta == 0.0))
        return std::log(theta.beta);
    if (scale_overflows(theta))
    {
        double sum = 0.0;
        for (double xi : x)
            sum += log_term_logdomain(theta, xi);
        return sum / static_cast<double>(x.size());
    }
    const kernels::LipschitzTermParams p{theta.beta, std::exp(log_scale(theta)), theta.gamma, theta.delta};
    const kernels::LogSum s = kernels::active().log_lipschitz_sum(x, p);
    if (s.neg_inf > 0)
        return -HUGE_VAL;
    return s.sum / static_cast<double>(x.size());
}

LyapunovReport model_implied_lyapunov(const ParamVector& theta0, const InnovationDist& dist, std::size_t m,
                                      std::size_t trunc, std::uint64_t seed, unsigned workers)
{
    require_admissible(ModelKind::Egarch11, theta0);
    if (m == 0)
        throw DomainError("model_implied_lyapunov: m must be positive");
    if (theta0.gamma == 0.0 && theta0.delta == 0.0)
        return constant_report(std::log(theta0.beta), m, LyapunovKind::ModelImpliedMc);

    // alpha cancels: log sigma^2_0 - alpha / (1 - beta) is the MA sum alone.
    const kernels::SeriesParams p{0.0, theta0.beta, theta0.gamma, theta0.delta};
    const std::size_t chunks = (m + kLanes - 1) / kLanes;

    struct Partial
    {
        double mean = 0.0;
        double m2 = 0.0;
        std::size_t count = 0;
        std::size_t neg_inf = 0;
    };
    std::vector<Partial> parts(chunks);
    const kernels::KernelTable& k = kernels::active();

    detail::parallel_for(chunks, workers, [&](std::size_t c) {
        const std::size_t lanes = std::min(kLanes, m - c * kLanes);
        std::vector<double> z((trunc + 1) * lanes);
        std::vector<double> out(lanes);
        RandomStream rng(seed, StreamPurpose::ModelImpliedMc, static_cast<std::uint32_t>(c));
        for (double& v : z)
            v = dist.sample(rng);
        k.implied_lyapunov_terms(z.data(), lanes, trunc, p, out.data());
        Partial& part = parts[c];
        for (double v : out)
        {
            if (v == -HUGE_VAL)
            {
                ++part.neg_inf;
                continue;
            }
            ++part.count;
            const double d = v - part.mean;
            part.mean += d / static_cast<double>(part.count);
            part.m2 += d * (v - part.mean);
        }
    });

    // Chan et al. pairwise combination, in chunk order.
    Partial total;
    for (const Partial& q : parts)
    {
        total.neg_inf += q.neg_inf;
        if (q.count == 0)
            continue;
        const double na = static_cast<double>(total.count);
        const double nb = static_cast<double>(q.count);
        const double d = q.mean - total.mean;
        total.count += q.count;
        total.mean += d * nb / (na + nb);
        total.m2 += q.m2 + d * d * na * nb / (na + nb);
    }

    LyapunovReport r;
    r.kind = LyapunovKind::ModelImpliedMc;
    r.count = m;
    r.neg_inf_terms = total.neg_inf;
    const double e_abs_w = theta0.delta * expectation(dist, [](double z) { return std::abs(z); }).value;
    r.tail_bound = std::pow(theta0.beta, static_cast<double>(trunc)) * e_abs_w / (1.0 - theta0.beta);
    if (total.neg_inf > 0)
    {
        r.value = -HUGE_VAL;
        return r;
    }
    r.value = total.mean;
    r.std_error = m > 1 ? std::sqrt(total.m2 / static_cast<double>(m - 1) / static_cast<double>(m)) : 0.0;
    return r;
}

std::vector<ScanPoint> region_scan(const ParamBox& box, const std::array<std::size_t, 4>& grid,
                                   const InnovationDist& dist, std::size_t m, std::size_t trunc,
                                   std::uint64_t seed, unsigned workers)
{
    for (std::size_t i = 0; i < 4; ++i)
    {
        if (grid[i] == 0)
            throw DomainError("region_scan: grid counts must be positive");
        if (box.axes[i].lo > box.axes[i].hi)
            throw DomainError("region_scan: box axis " + std::string(kParamNames[i]) + " has lo > hi");
    }
    auto node = [&](std::size_t axis, std::size_t j) {
        const Interval& iv = box.axes[axis];
        if (grid[axis] == 1)
            return iv.lo;
        return iv.lo + iv.width() * static_cast<double>(j) / static_cast<double>(grid[axis] - 1);
    };

    std::vector<ScanPoint> points;
    for (std::size_t a = 0; a < grid[0]; ++a)
        for (std::size_t b = 0; b < grid[1]; ++b)
            for (std::size_t g = 0; g < grid[2]; ++g)
                for (std::size_t d = 0; d < grid[3]; ++d)
                {
                    ParamVector t{node(0, a), node(1, b), node(2, g), node(3, d)};
                    if (!is_admissible(ModelKind::Egarch11, t))
                        continue;
                    points.push_back({t, model_implied_lyapunov(t, dist, m, trunc, seed, workers)});
                }
    return points;
}

void write_scan_csv(const std::vector<ScanPoint>& points, std::ostream& out)
{
    out << "alpha,beta,gamma,delta,value,se\n";
    for (const ScanPoint& p : points)
        out << fmt17(p.theta.alpha) << ',' << fmt17(p.theta.beta) << ',' << fmt17(p.theta.gamma) << ','
            << fmt17(p.theta.delta) << ',' << fmt17(p.report.value) << ',' << fmt17(p.report.std_error)
            << '\n';
}

}  // namespace volsre
