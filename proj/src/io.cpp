// SPDX-License-Identifier: Apache-2.0
#include "volsre/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <sstream>

#include "volsre/error.hpp"

namespace volsre {
namespace {

std::vector<std::string> split_csv(const std::string& line)
{
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ','))
    {
        const auto b = cell.find_first_not_of(" \t\r");
        const auto e = cell.find_last_not_of(" \t\r");
        cells.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',')
        cells.emplace_back();
    return cells;
}

// nlohmann writes non-finite numbers as null; keep them readable.
nlohmann::json number(double v)
{
    if (std::isfinite(v))
        return v;
    if (std::isnan(v))
        return "nan";
    return v > 0 ? "inf" : "-inf";
}

}  // namespace

std::vector<double> read_observations_csv(std::istream& in)
{
    std::string line;
    std::size_t lineno = 0;
    std::size_t col = 0;
    bool have_header = false;
    std::vector<double> x;
    while (std::getline(in, line))
    {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos)
            continue;
        const auto cells = split_csv(line);
        if (!have_header)
        {
            auto it = std::find(cells.begin(), cells.end(), "x");
            if (it == cells.end())
                throw InputError("line " + std::to_string(lineno) + ": header has no column 'x'");
            col = static_cast<std::size_t>(it - cells.begin());
            have_header = true;
            continue;
        }
        if (col >= cells.size())
            throw InputError("line " + std::to_string(lineno) + ": missing column 'x'");
        const std::string& s = cells[col];
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
            throw InputError("line " + std::to_string(lineno) + ": non-numeric value '" + s + "' in column 'x'");
        x.push_back(v);
    }
    if (!have_header)
        throw InputError("empty CSV input");
    return x;
}

std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

nlohmann::json param_json(const ParamVector& theta, ModelKind model)
{
    nlohmann::json j = nlohmann::json::object();
    for (std::size_t i = 0; i < 4; ++i)
        j[std::string(kParamNames[i])] = number(i < param_count(model) ? theta[i] : 0.0);
    return j;
}

nlohmann::json to_json(const FitResult& fit, ModelKind model)
{
    return {{"theta_hat", param_json(fit.theta_hat, model)},
            {"qlik", number(fit.qlik)},
            {"constraint", number(fit.constraint_value)},
            {"converged", fit.converged},
            {"n", fit.n},
            {"seed", fit.seed},
            {"starts", fit.starts},
            {"feasible_starts", fit.feasible_starts},
            {"iterations", fit.iterations},
            {"best_start_index", fit.best_start_index}};
}

nlohmann::json to_json(const LyapunovReport& r)
{
    return {{"value", number(r.value)},
            {"std_error", number(r.std_error)},
            {"count", r.count},
            {"kind", r.kind == LyapunovKind::EmpiricalOnData ? "empirical" : "model_implied_mc"},
            {"neg_inf_terms", r.neg_inf_terms},
            {"tail_bound", number(r.tail_bound)}};
}

nlohmann::json to_json(const InnovationMoments& m)
{
    return {{"e_absz", number(m.e_absz)}, {"e_z4", number(m.e_z4)},   {"e_zabsz", number(m.e_zabsz)},
            {"e_v", number(m.e_v)},       {"e_v2", number(m.e_v2)},   {"e_absz_v", number(m.e_absz_v)}};
}

nlohmann::json matrix_json(const Eigen::MatrixXd& m)
{
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
    {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            row.push_back(number(m(i, j)));
        rows.push_back(row);
    }
    return rows;
}

nlohmann::json to_json(const AsymptoticReport& r)
{
    nlohmann::json se = nlohmann::json::array();
    for (Eigen::Index i = 0; i < r.se.size(); ++i)
        se.push_back(number(r.se(i)));
    return {{"B", matrix_json(r.B)},
            {"P", matrix_json(r.P)},
            {"Q", matrix_json(r.Q)},
            {"V", matrix_json(r.V)},
            {"se", se},
            {"e_z4", number(r.e_z4)},
            {"n", r.n},
            {"sandwich_residual", number(r.sandwich_residual)},
            {"identity_residual", number(r.identity_residual)}};
}

nlohmann::json to_json(const StudySummary& s, ModelKind model)
{
    nlohmann::json coords = nlohmann::json::object();
    for (std::size_t i = 0; i < s.coords.size() && i < param_count(model); ++i)
    {
        const CoordinateSummary& c = s.coords[i];
        coords[std::string(kParamNames[i])] = {{"bias", number(c.bias)},
                                               {"rmse", number(c.rmse)},
                                               {"coverage", number(c.coverage)},
                                               {"skew", number(c.skew)},
                                               {"excess_kurtosis", number(c.excess_kurtosis)},
                                               {"median_abs_error", number(c.median_abs_error)}};
    }
    return {{"reps", s.reps},
            {"n", s.n},
            {"used", s.used},
            {"failures", s.failures},
            {"not_converged", s.not_converged},
            {"coordinates", coords}};
}

}  // namespace volsre
