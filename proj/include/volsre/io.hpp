// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "volsre/asymptotics.hpp"
#include "volsre/estimate.hpp"
#include "volsre/invertibility.hpp"
#include "volsre/study.hpp"

namespace volsre {

/*!
 * Reads the `x` column of a CSV with a header row. Blank lines are skipped.
 * Throws InputError naming the line of the first malformed row.
 */
std::vector<double> read_observations_csv(std::istream& in);

/// Formats a double with 17 significant digits.
std::string format_double(double v);

nlohmann::json param_json(const ParamVector& theta, ModelKind model);
nlohmann::json to_json(const FitResult& fit, ModelKind model);
nlohmann::json to_json(const LyapunovReport& report);
nlohmann::json to_json(const InnovationMoments& mom);
nlohmann::json to_json(const AsymptoticReport& report);
nlohmann::json to_json(const StudySummary& summary, ModelKind model);

/// Row-major nested arrays.
nlohmann::json matrix_json(const Eigen::MatrixXd& m);

}  // namespace volsre
