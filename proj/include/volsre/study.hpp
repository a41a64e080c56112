// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "volsre/estimate.hpp"
#include "volsre/models.hpp"
#include "volsre/simulate.hpp"

namespace volsre {

struct StudyOptions
{
    ModelKind model = ModelKind::Egarch11;
    ParamVector theta0{};
    InnovationDist dist{};
    std::size_t n = 0;
    std::size_t reps = 0;
    std::uint64_t seed = 0;
    std::size_t burn_in = kDefaultBurnIn;
    ParamBox box{};
    FitOptions fit{};      ///< fit.seed and fit.workers are overridden per replication
    Eigen::MatrixXd V;     ///< asymptotic covariance used for coverage and standardization
    unsigned workers = 0;  ///< replications in parallel, 0 = all cores
};

struct StudyRow
{
    std::size_t rep = 0;
    ParamVector theta_hat{};
    double qlik = 0.0;
    bool converged = false;
    bool failed = false;  ///< infeasible fit; theta_hat is NaN
    std::string error;
};

struct CoordinateSummary
{
    double bias = 0.0;
    double rmse = 0.0;
    double coverage = 0.0;          ///< fraction inside theta0 +- 1.96 sqrt(V_ii / n)
    double skew = 0.0;              ///< of sqrt(n) (theta_hat - theta0) / sqrt(V_ii)
    double excess_kurtosis = 0.0;
    double median_abs_error = 0.0;
};

struct StudySummary
{
    std::size_t reps = 0;
    std::size_t n = 0;
    std::size_t used = 0;
    std::size_t failures = 0;
    std::size_t not_converged = 0;
    std::vector<CoordinateSummary> coords;
};

struct StudyResult
{
    std::vector<StudyRow> rows;
    StudySummary summary;
};

/*!
 * R independent simulate -> fit replications. Replication r simulates with
 * seed ^ r and draws its start points from the same seed. Infeasible fits
 * are kept as failed rows and counted; summaries use the remaining rows.
 */
StudyResult run_study(const StudyOptions& opts);

StudySummary summarize(const std::vector<StudyRow>& rows, const ParamVector& theta0, ModelKind model,
                       const Eigen::MatrixXd& V, std::size_t n);

/// CSV `rep,alpha,beta,gamma,delta,qlik,converged`.
void write_study_csv(const std::vector<StudyRow>& rows, std::ostream& out);

}  // namespace volsre
