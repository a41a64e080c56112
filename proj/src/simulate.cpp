// SPDX-License-Identifier: Apache-2.0
#include "volsre/simulate.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "volsre/error.hpp"
#include "volsre/quadrature.hpp"
#include "volsre/rng.hpp"

namespace volsre {
namespace {

std::string fmt17(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

Path Path::from_observations(std::vector<double> x)
{
    Path p;
    p.x = std::move(x);
    return p;
}

double stationarity_lyapunov_exact(const ParamVector& theta0, const InnovationDist& dist)
{
    if (theta0.gamma == 0.0)
        return std::log(theta0.beta);
    const double b = theta0.beta;
    const double g = theta0.gamma;
    return expectation(dist, [b, g](double z) { return std::log(b + g * z * z); }).value;
}

Path simulate(ModelKind model, const ParamVector& theta0, const InnovationDist& dist, std::size_t n,
              std::size_t burn_in, std::uint64_t seed)
{
    require_admissible(model, theta0);
    if (n == 0)
        throw DomainError("simulate: n must be positive");
    if (model == ModelKind::Garch11)
    {
        const double lyap = stationarity_lyapunov_exact(theta0, dist);
        if (!(lyap < 0.0))
            throw InfeasibleError("simulate: GARCH parameter is not stationary (E log(beta + gamma Z^2) = " +
                                  fmt17(lyap) + ")");
    }

    Path path;
    path.seed = seed;
    path.model = model;
    path.theta0 = theta0;
    path.x.resize(n);
    path.z.resize(n);
    std::vector<double> sigma2(n);

    RandomStream rng(seed, StreamPurpose::Innovations);
    const auto& t = theta0;
    double state;
    if (model == ModelKind::Egarch11)
        state = t.alpha / (1.0 - t.beta);
    else
        state = t.beta + t.gamma < 1.0 ? t.alpha / (1.0 - t.beta - t.gamma) : t.alpha / (1.0 - t.beta);

    const std::size_t total = burn_in + n;
    for (std::size_t s = 0; s < total; ++s)
    {
        const double z = dist.sample(rng);
        const double s2 = model == ModelKind::Egarch11 ? std::exp(state) : state;
        const double x = std::sqrt(s2) * z;
        if (s >= burn_in)
        {
            const std::size_t i = s - burn_in;
            path.x[i] = x;
            path.z[i] = z;
            sigma2[i] = s2;
        }
        if (model == ModelKind::Egarch11)
            state = t.alpha + t.beta * state + t.gamma * z + t.delta * std::abs(z);
        else
            state = t.alpha + t.beta * state + t.gamma * x * x;
    }
    path.sigma2 = std::move(sigma2);
    return path;
}

McEstimate stationarity_lyapunov(const ParamVector& theta0, const InnovationDist& dist, std::size_t m,
                                 std::uint64_t seed)
{
    McEstimate est;
    est.count = m;
    if (m == 0)
        return est;
    if (theta0.gamma == 0.0)
    {
        est.mean = std::log(theta0.beta);
        return est;
    }
    RandomStream rng(seed, StreamPurpose::StationarityMc);
    double mean = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < m; ++i)
    {
        const double z = dist.sample(rng);
        const double v = std::log(theta0.beta + theta0.gamma * z * z);
        const double d = v - mean;
        mean += d / static_cast<double>(i + 1);
        m2 += d * (v - mean);
    }
    est.mean = mean;
    est.std_error = m > 1 ? std::sqrt(m2 / static_cast<double>(m - 1) / static_cast<double>(m)) : 0.0;
    return est;
}

void write_path_csv(const Path& path, std::ostream& out)
{
    out << "t,x,sigma2\n";
    for (std::size_t i = 0; i < path.x.size(); ++i)
    {
        out << (i + 1) << ',' << fmt17(path.x[i]) << ',';
        if (path.sigma2)
            out << fmt17((*path.sigma2)[i]);
        out << '\n';
    }
}

}  // namespace volsre
