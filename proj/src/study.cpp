// SPDX-License-Identifier: Apache-2.0
#include "volsre/study.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "parallel.hpp"
#include "volsre/error.hpp"

namespace volsre {
namespace {

std::string fmt17(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double median(std::vector<double> v)
{
    if (v.empty())
        return std::numeric_limits<double>::quiet_NaN();
    const std::size_t h = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(h), v.end());
    const double hi = v[h];
    if (v.size() % 2 == 1)
        return hi;
    const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(h));
    return 0.5 * (lo + hi);
}

}  // namespace

StudyResult run_study(const StudyOptions& opts)
{
    const std::size_t d = param_count(opts.model);
    if (opts.reps == 0)
        throw DomainError("run_study: reps must be positive");
    if (opts.V.rows() != static_cast<Eigen::Index>(d) || opts.V.cols() != static_cast<Eigen::Index>(d))
        throw DomainError("run_study: V has the wrong dimension for the model");
    require_admissible(opts.model, opts.theta0);

    StudyResult res;
    res.rows.resize(opts.reps);
    detail::parallel_for(opts.reps, opts.workers, [&](std::size_t r) {
        const std::uint64_t seed = opts.seed ^ static_cast<std::uint64_t>(r);
        StudyRow& row = res.rows[r];
        row.rep = r;
        const Path path = simulate(opts.model, opts.theta0, opts.dist, opts.n, opts.burn_in, seed);
        FitOptions fo = opts.fit;
        fo.seed = seed;
        fo.workers = 1;
        try
        {
            const FitResult f = fit(opts.model, path.x, opts.box, fo);
            row.theta_hat = f.theta_hat;
            row.qlik = f.qlik;
            row.converged = f.converged;
        }
        catch (const InfeasibleError& e)
        {
            const double nan = std::numeric_limits<double>::quiet_NaN();
            row.theta_hat = {nan, nan, nan, nan};
            row.qlik = nan;
            row.failed = true;
            row.error = e.what();
        }
    });
    res.summary = summarize(res.rows, opts.theta0, opts.model, opts.V, opts.n);
    return res;
}

StudySummary summarize(const std::vector<StudyRow>& rows, const ParamVector& theta0, ModelKind model,
                       const Eigen::MatrixXd& V, std::size_t n)
{
    const std::size_t d = param_count(model);
    StudySummary s;
    s.reps = rows.size();
    s.n = n;
    for (const StudyRow& r : rows)
    {
        if (r.failed)
            ++s.failures;
        else if (!r.converged)
            ++s.not_converged;
    }
    s.used = s.reps - s.failures;
    s.coords.resize(d);
    if (s.used == 0)
        return s;

    const double rn = std::sqrt(static_cast<double>(n));
    for (std::size_t i = 0; i < d; ++i)
    {
        const double sd = std::sqrt(V(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)));
        std::vector<double> err, stdz, abs_err;
        for (const StudyRow& r : rows)
        {
            if (r.failed)
                continue;
            const double e = r.theta_hat[i] - theta0[i];
            err.push_back(e);
            abs_err.push_back(std::abs(e));
            stdz.push_back(rn * e / sd);
        }
        const double k = static_cast<double>(err.size());
        CoordinateSummary& c = s.coords[i];
        double sum = 0.0, sq = 0.0, hits = 0.0;
        for (std::size_t j = 0; j < err.size(); ++j)
        {
            sum += err[j];
            sq += err[j] * err[j];
            if (std::abs(stdz[j]) <= 1.959963984540054)
                hits += 1.0;
        }
        c.bias = sum / k;
        c.rmse = std::sqrt(sq / k);
        c.coverage = hits / k;
        c.median_abs_error = median(abs_err);

        double mean = 0.0;
        for (double z : stdz)
            mean += z;
        mean /= k;
        double m2 = 0.0, m3 = 0.0, m4 = 0.0;
        for (double z : stdz)
        {
            const double dz = z - mean;
            m2 += dz * dz;
            m3 += dz * dz * dz;
            m4 += dz * dz * dz * dz;
        }
        m2 /= k;
        m3 /= k;
        m4 /= k;
        c.skew = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
        c.excess_kurtosis = m2 > 0.0 ? m4 / (m2 * m2) - 3.0 : 0.0;
    }
    return s;
}

void write_study_csv(const std::vector<StudyRow>& rows, std::ostream& out)
{
    out << "rep,alpha,beta,gamma,delta,qlik,converged\n";
    for (const StudyRow& r : rows)
        out << r.rep << ',' << fmt17(r.theta_hat.alpha) << ',' << fmt17(r.theta_hat.beta) << ','
            << fmt17(r.theta_hat.gamma) << ',' << fmt17(r.theta_hat.delta) << ',' << fmt17(r.qlik) << ','
            << (r.converged ? 1 : 0) << '\n';
}

}  // namespace volsre
