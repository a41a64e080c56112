#pragma once

// Independent reference computations for the tests: Boost double-exponential
// quadrature and the exact stationary moment recursion for B.

#include <Eigen/Dense>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <numbers>

#include "volsre/models.hpp"

namespace oracle {

/// E f(Z) for an even density, integrating (-inf, 0] and [0, inf) with exp-sinh.
template <class F>
double expect(const volsre::InnovationDist& d, F f)
{
    boost::math::quadrature::exp_sinh<double> q;
    auto pos = [&](double z) { return f(z) * d.density(z); };
    auto neg = [&](double z) { return f(-z) * d.density(z); };
    return q.integrate(pos, 0.0, std::numeric_limits<double>::infinity()) +
           q.integrate(neg, 0.0, std::numeric_limits<double>::infinity());
}

/// Student-t density of the variance-one scaled law, written from scratch.
inline double std_t_density(double z, double nu)
{
    const double s = std::sqrt((nu - 2.0) / nu);
    const double x = z / s;
    const double c = std::exp(std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu)) / std::sqrt(nu * std::numbers::pi);
    return c * std::pow(1.0 + x * x / nu, -0.5 * (nu + 1.0)) / s;
}

/*!
 * Exact B = E[grad g grad g^T] for EGARCH(1,1) from the fixed point of the
 * second-moment recursion of xi = (1, y, G1..G4), xi_t = M(Z) xi_{t-1} with
 * M = M0 + Z M1 + |Z| M2. Valid when the spectral radius condition holds
 * (E V^2 < 1).
 */
inline Eigen::Matrix4d exact_b(const volsre::ParamVector& t, double e_absz, double e_zabsz)
{
    using M6 = Eigen::Matrix<double, 6, 6>;
    M6 m0 = M6::Zero(), m1 = M6::Zero(), m2 = M6::Zero();
    m0(0, 0) = 1;
    m0(1, 0) = t.alpha;
    m0(1, 1) = t.beta;
    m1(1, 0) = t.gamma;
    m2(1, 0) = t.delta;
    m0(2, 0) = 1;
    m0(3, 1) = 1;
    m1(4, 0) = 1;
    m2(5, 0) = 1;
    for (int i = 2; i < 6; ++i)
    {
        m0(i, i) += t.beta;
        m1(i, i) -= t.gamma / 2;
        m2(i, i) -= t.delta / 2;
    }
    const M6* ms[3] = {&m0, &m1, &m2};
    const double c[3][3] = {{1, 0, e_absz}, {0, 1, e_zabsz}, {e_absz, e_zabsz, 1}};
    M6 s = M6::Zero();
    s(0, 0) = 1;
    for (int it = 0; it < 200000; ++it)
    {
        M6 next = M6::Zero();
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                if (c[i][j] != 0.0)
                    next += c[i][j] * (*ms[i]) * s * ms[j]->transpose();
        const double diff = (next - s).cwiseAbs().maxCoeff();
        s = next;
        if (diff < 1e-15 * std::max(1.0, s.cwiseAbs().maxCoeff()))
            break;
    }
    return s.block<4, 4>(2, 2);
}

}  // namespace oracle
