// SPDX-License-Identifier: Apache-2.0
#include "volsre/models.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "volsre/error.hpp"
#include "volsre/rng.hpp"

namespace volsre {
namespace {

std::string lower(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

// Slack for the state-space precondition; the floor itself is reached by
// alpha + beta * floor only up to rounding.
bool below_floor(double state, double floor)
{
    return state < floor - 1e-12 * std::max(1.0, std::abs(floor));
}

}  // namespace

std::string_view to_string(ModelKind model)
{
    return model == ModelKind::Garch11 ? "garch11" : "egarch11";
}

ModelKind parse_model(std::string_view name)
{
    std::string s = lower(name);
    if (s == "garch" || s == "garch11")
        return ModelKind::Garch11;
    if (s == "egarch" || s == "egarch11")
        return ModelKind::Egarch11;
    throw InputError("unknown model '" + std::string(name) + "' (expected garch or egarch)");
}

double ParamVector::operator[](std::size_t i) const
{
    switch (i)
    {
        case 0: return alpha;
        case 1: return beta;
        case 2: return gamma;
        default: return delta;
    }
}

double& ParamVector::operator[](std::size_t i)
{
    switch (i)
    {
        case 0: return alpha;
        case 1: return beta;
        case 2: return gamma;
        default: return delta;
    }
}

bool is_admissible(ModelKind model, const ParamVector& t)
{
    for (std::size_t i = 0; i < 4; ++i)
        if (!std::isfinite(t[i]))
            return false;
    if (!(t.beta >= 0.0 && t.beta < 1.0))
        return false;
    if (model == ModelKind::Garch11)
        return t.alpha > 0.0 && t.gamma >= 0.0;
    return t.delta >= std::abs(t.gamma);
}

void require_admissible(ModelKind model, const ParamVector& t)
{
    if (is_admissible(model, t))
        return;
    std::ostringstream os;
    os.precision(17);
    os << to_string(model) << ": inadmissible parameter (" << t.alpha << ", " << t.beta << ", "
       << t.gamma;
    if (model == ModelKind::Egarch11)
        os << ", " << t.delta << "); requires 0 <= beta < 1 and delta >= |gamma|";
    else
        os << "); requires alpha > 0, gamma >= 0 and 0 <= beta < 1";
    throw DomainError(os.str());
}

double state_floor(const ParamVector& theta)
{
    return theta.alpha / (1.0 - theta.beta);
}

bool ParamBox::contains(ModelKind model, const ParamVector& t) const
{
    for (std::size_t i = 0; i < param_count(model); ++i)
        if (!axes[i].contains(t[i]))
            return false;
    return is_admissible(model, t);
}

ParamVector ParamBox::lower() const
{
    return {axes[0].lo, axes[1].lo, axes[2].lo, axes[3].lo};
}

ParamVector ParamBox::upper() const
{
    return {axes[0].hi, axes[1].hi, axes[2].hi, axes[3].hi};
}

ParamBox default_box(ModelKind model)
{
    if (model == ModelKind::Garch11)
        return {{Interval{1e-8, 100.0}, Interval{0.0, 0.999}, Interval{0.0, 5.0}, Interval{0.0, 0.0}}};
    return {{Interval{-5.0, 5.0}, Interval{0.0, 0.999}, Interval{-5.0, 5.0}, Interval{0.0, 5.0}}};
}

void require_valid_box(ModelKind model, const ParamBox& box)
{
    const std::size_t d = param_count(model);
    for (std::size_t i = 0; i < d; ++i)
    {
        const Interval& a = box.axes[i];
        if (!(std::isfinite(a.lo) && std::isfinite(a.hi) && a.lo <= a.hi))
            throw DomainError("box axis " + std::string(kParamNames[i]) + " is not a finite interval lo <= hi");
    }
    if (box.axes[1].lo < 0.0 || box.axes[1].hi >= 1.0)
        throw DomainError("box: beta must lie in [0, 1)");
    if (model == ModelKind::Garch11)
    {
        if (box.axes[0].lo <= 0.0)
            throw DomainError("box: GARCH alpha must be > 0");
        if (box.axes[2].lo < 0.0)
            throw DomainError("box: GARCH gamma must be >= 0");
    }
    else
    {
        // Some delta in the interval must dominate |gamma| for every gamma.
        double worst_gamma = std::max(std::abs(box.axes[2].lo), std::abs(box.axes[2].hi));
        if (box.axes[3].hi < worst_gamma)
            throw DomainError("box: delta upper bound must be >= max |gamma|");
    }
}

InnovationDist InnovationDist::student_t(double nu)
{
    if (!(nu > 2.0) || !std::isfinite(nu))
        throw DomainError("Student-t innovations need nu > 2 for unit variance");
    return {Kind::StdStudentT, nu};
}

double InnovationDist::density(double z) const
{
    if (kind == Kind::StdNormal)
        return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
    const double s = std::sqrt((nu - 2.0) / nu);
    const double u = z / s;
    const double log_c = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
                         0.5 * std::log(nu * std::numbers::pi);
    return std::exp(log_c - 0.5 * (nu + 1.0) * std::log1p(u * u / nu)) / s;
}

double InnovationDist::sample(RandomStream& rng) const
{
    const double z = rng.normal();
    if (kind == Kind::StdNormal)
        return z;
    const double chi2 = 2.0 * rng.gamma(0.5 * nu);
    return z * std::sqrt((nu - 2.0) / chi2);
}

double InnovationDist::fourth_moment() const
{
    if (kind == Kind::StdNormal)
        return 3.0;
    if (nu <= 4.0)
        return std::numeric_limits<double>::infinity();
    return 3.0 * (nu - 2.0) / (nu - 4.0);
}

std::string InnovationDist::name() const
{
    if (kind == Kind::StdNormal)
        return "normal";
    std::ostringstream os;
    os.precision(17);
    os << "t:" << nu;
    return os.str();
}

InnovationDist parse_dist(std::string_view text)
{
    std::string s = lower(text);
    if (s == "normal" || s == "gaussian" || s == "n")
        return InnovationDist::std_normal();
    if (s.rfind("t:", 0) == 0)
    {
        try
        {
            std::size_t used = 0;
            double nu = std::stod(s.substr(2), &used);
            if (used + 2 != s.size())
                throw InputError("trailing characters");
            return InnovationDist::student_t(nu);
        }
        catch (const DomainError&)
        {
            throw;
        }
        catch (const std::exception&)
        {
        }
    }
    throw InputError("unknown innovation distribution '" + std::string(text) +
                     "' (expected normal or t:<nu>)");
}

double sre_step(ModelKind model, const ParamVector& t, double state, double x_prev)
{
    if (model == ModelKind::Garch11)
        return t.alpha + t.beta * state + t.gamma * x_prev * x_prev;
    if (below_floor(state, state_floor(t)))
        throw DomainError("sre_step: EGARCH state below the restricted state space alpha/(1-beta)");
    const double w = t.gamma * x_prev + t.delta * std::abs(x_prev);
    if (w == 0.0)
        return t.alpha + t.beta * state;
    return t.alpha + t.beta * state + w * std::exp(-0.5 * state);
}

double lipschitz_coeff(ModelKind model, const ParamVector& t, double x_prev)
{
    if (model == ModelKind::Garch11)
        return t.beta;
    const double w = t.gamma * x_prev + t.delta * std::abs(x_prev);
    if (w <= 0.0)
        return t.beta;
    const double expo = -0.5 * state_floor(t);
    if (expo < 700.0)
        return std::max(t.beta, 0.5 * std::exp(expo) * w - t.beta);
    const double log_scaled = std::log(0.5 * w) + expo;
    if (log_scaled > 709.0)
        return std::numeric_limits<double>::infinity();
    return std::max(t.beta, std::exp(log_scaled) - t.beta);
}

double link(ModelKind model, double g)
{
    return model == ModelKind::Garch11 ? g : std::exp(g);
}

double inv_link(ModelKind model, double v)
{
    if (!(v > 0.0))
        throw DomainError("inv_link: variance must be positive");
    return model == ModelKind::Garch11 ? v : std::log(v);
}

}  // namespace volsre
