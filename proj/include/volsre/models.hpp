// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>

namespace volsre {

class RandomStream;

enum class ModelKind
{
    Garch11,
    Egarch11,
};

std::string_view to_string(ModelKind model);
/// Accepts "garch", "garch11", "egarch", "egarch11" (case-insensitive).
ModelKind parse_model(std::string_view name);

/// Number of free coordinates: 3 for GARCH(1,1), 4 for EGARCH(1,1).
constexpr std::size_t param_count(ModelKind model)
{
    return model == ModelKind::Garch11 ? 3 : 4;
}

//---------------------------------------------------------------------------//
/*!
 * Model parameter.
 *
 * GARCH(1,1):  sigma2_t = alpha + beta sigma2_{t-1} + gamma X_{t-1}^2
 *              (delta is unused and kept at 0).
 * EGARCH(1,1): log sigma2_t = alpha + beta log sigma2_{t-1}
 *                             + gamma Z_{t-1} + delta |Z_{t-1}|.
 *
 * gamma always multiplies the signed term and delta the absolute term, so
 * the EGARCH innovation gamma x + delta |x| is nonnegative iff
 * delta >= |gamma|.
 */
struct ParamVector
{
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    double delta = 0.0;

    double operator[](std::size_t i) const;
    double& operator[](std::size_t i);

    friend bool operator==(const ParamVector&, const ParamVector&) = default;
};

inline constexpr std::array<std::string_view, 4> kParamNames = {"alpha", "beta", "gamma", "delta"};

/// True when theta satisfies the admissibility invariants of the model.
bool is_admissible(ModelKind model, const ParamVector& theta);
/// Throws DomainError naming the violated invariant.
void require_admissible(ModelKind model, const ParamVector& theta);

/// Lower end alpha / (1 - beta) of the restricted EGARCH state space; also
/// the default filter initial value for both models.
double state_floor(const ParamVector& theta);

struct Interval
{
    double lo = 0.0;
    double hi = 0.0;

    double width() const { return hi - lo; }
    bool contains(double v) const { return lo <= v && v <= hi; }
};

//---------------------------------------------------------------------------//
/*!
 * Compact search set Theta as per-coordinate closed intervals.
 *
 * For EGARCH the joint restriction delta >= |gamma| is enforced on top of
 * the delta interval.
 */
struct ParamBox
{
    std::array<Interval, 4> axes{};

    bool contains(ModelKind model, const ParamVector& theta) const;
    ParamVector lower() const;
    ParamVector upper() const;
};

/// Shipped defaults.
/// GARCH:  alpha in [1e-8, 100], beta in [0, 0.999], gamma in [0, 5].
/// EGARCH: alpha in [-5, 5], beta in [0, 0.999], gamma in [-5, 5],
///         delta in [0, 5] with delta >= |gamma|.
ParamBox default_box(ModelKind model);
/// Throws DomainError if lo > hi on some axis or the box leaves the
/// admissible region.
void require_valid_box(ModelKind model, const ParamBox& box);

//---------------------------------------------------------------------------//
/*!
 * Standardized innovation law (E Z = 0, E Z^2 = 1).
 */
struct InnovationDist
{
    enum class Kind
    {
        StdNormal,
        StdStudentT,
    };

    Kind kind = Kind::StdNormal;
    double nu = 0.0;  ///< degrees of freedom, StdStudentT only

    static InnovationDist std_normal() { return {}; }
    /// Requires nu > 2.
    static InnovationDist student_t(double nu);

    double density(double z) const;
    double sample(RandomStream& rng) const;
    /// E Z^4; +infinity for Student-t with nu <= 4.
    double fourth_moment() const;
    /// "normal" or "t:<nu>".
    std::string name() const;

    friend bool operator==(const InnovationDist&, const InnovationDist&) = default;
};

/// Parses "normal" or "t:<nu>".
InnovationDist parse_dist(std::string_view text);

//---------------------------------------------------------------------------//
// Observation-driven SRE maps
//---------------------------------------------------------------------------//

/*!
 * One step of the observation-driven recursion.
 *
 * GARCH:  alpha + beta s + gamma x^2.
 * EGARCH: alpha + beta s + (gamma x + delta |x|) exp(-s / 2), defined on the
 *         restricted state space s >= alpha / (1 - beta), which it maps into
 *         itself. Throws DomainError below the floor.
 */
double sre_step(ModelKind model, const ParamVector& theta, double state, double x_prev);

/*!
 * Lipschitz constant of sre_step in its state argument over the restricted
 * state space: beta for GARCH, and
 * max{beta, (gamma x + delta |x|) exp(-alpha / (2 (1 - beta))) / 2 - beta}
 * for EGARCH. May be +infinity when the exponential overflows.
 */
double lipschitz_coeff(ModelKind model, const ParamVector& theta, double x_prev);

/// Maps the filtered state to a variance: exp for EGARCH, identity for GARCH.
double link(ModelKind model, double g);
/// Inverse of link. Throws DomainError for v <= 0 under GARCH.
double inv_link(ModelKind model, double v);

}  // namespace volsre
