// SPDX-License-Identifier: Apache-2.0
#include "volsre/asymptotics.hpp"

#include <cmath>
#include <vector>

#include "parallel.hpp"
#include "volsre/error.hpp"
#include "volsre/kernels.hpp"
#include "volsre/quadrature.hpp"
#include "volsre/rng.hpp"

namespace volsre {
namespace {

constexpr double kQuadTol = 1e-10;
constexpr double kSingular = 1e-10;
constexpr std::size_t kChunk = 256;
constexpr double kMinRcond = 1e-12;

double guard(double denom)
{
    if (!(std::abs(denom) >= kSingular))
        throw DomainError("near-singular moments");
    return denom;
}

// Neumaier-compensated accumulation of chunk sums.
struct CompensatedMatrix
{
    Eigen::MatrixXd sum, comp;

    explicit CompensatedMatrix(Eigen::Index d) : sum(Eigen::MatrixXd::Zero(d, d)), comp(Eigen::MatrixXd::Zero(d, d)) {}

    void add(const Eigen::MatrixXd& v)
    {
        for (Eigen::Index i = 0; i < sum.rows(); ++i)
            for (Eigen::Index j = 0; j < sum.cols(); ++j)
            {
                const double s = sum(i, j);
                const double x = v(i, j);
                const double t = s + x;
                comp(i, j) += std::abs(s) >= std::abs(x) ? (s - t) + x : (x - t) + s;
                sum(i, j) = t;
            }
    }

    Eigen::MatrixXd value() const { return sum + comp; }
};

/*!
 * Mean of per-replication outer products from chunk sums, with
 * delete-one-chunk jackknife standard errors.
 */
void reduce_chunks(const std::vector<Eigen::MatrixXd>& sums, const std::vector<std::size_t>& counts,
                   BMatrixEstimate& est)
{
    const Eigen::Index d = sums.front().rows();
    CompensatedMatrix total(d);
    std::size_t m = 0;
    for (std::size_t c = 0; c < sums.size(); ++c)
    {
        total.add(sums[c]);
        m += counts[c];
    }
    const Eigen::MatrixXd s = total.value();
    est.b = s / static_cast<double>(m);

    const std::size_t k = sums.size();
    est.se = Eigen::MatrixXd::Constant(d, d, HUGE_VAL);
    if (k < 2)
        return;
    std::vector<Eigen::MatrixXd> loo(k);
    Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(d, d);
    for (std::size_t c = 0; c < k; ++c)
    {
        loo[c] = (s - sums[c]) / static_cast<double>(m - counts[c]);
        mean += loo[c];
    }
    mean /= static_cast<double>(k);
    Eigen::MatrixXd var = Eigen::MatrixXd::Zero(d, d);
    for (std::size_t c = 0; c < k; ++c)
        var += (loo[c] - mean).cwiseAbs2();
    est.se = (var * (static_cast<double>(k - 1) / static_cast<double>(k))).cwiseSqrt();
}

}  // namespace

bool InnovationMoments::e_z4_finite() const
{
    return std::isfinite(e_z4);
}

InnovationMoments innovation_moments(const ParamVector& t, const InnovationDist& dist)
{
    require_admissible(ModelKind::Egarch11, t);
    InnovationMoments m;
    m.e_absz = expectation(dist, [](double z) { return std::abs(z); }, kQuadTol).value;
    m.e_zabsz = expectation(dist, [](double z) { return z * std::abs(z); }, kQuadTol).value;
    m.e_z4 = dist.fourth_moment();
    // Expand V in Z and |Z| using E Z = 0, E Z^2 = 1 exactly.
    const double b = t.beta, g = t.gamma, d = t.delta;
    m.e_v = b - 0.5 * d * m.e_absz;
    m.e_v2 = b * b - b * d * m.e_absz + 0.25 * (g * g + 2.0 * g * d * m.e_zabsz + d * d);
    m.e_absz_v = b * m.e_absz - 0.5 * (g * m.e_zabsz + d);
    return m;
}

MmPrimeCheck check_mm_prime(const InnovationMoments& mom)
{
    return {mom.e_v2 < 1.0 && mom.e_z4_finite(), 1.0 - mom.e_v2};
}

BDiagClosed b_diag_closed_form(const ParamVector& t, const InnovationMoments& mom)
{
    require_admissible(ModelKind::Egarch11, t);
    if (!check_mm_prime(mom).ok)
        throw InfeasibleError("b_diag_closed_form: condition (MM') fails (E V0^2 >= 1 or E Z^4 infinite)");
    const double a = t.alpha;
    const double b = t.beta;
    const double ev = mom.e_v;
    const double ev2 = mom.e_v2;

    const double one_ev2 = guard(1.0 - ev2);
    const double one_ev = guard(1.0 - ev);
    const double one_b = guard(1.0 - b);
    const double one_b2 = guard(1.0 - b * b);
    const double one_bev = guard(1.0 - b * ev);
    const double one_b2ev = guard(1.0 - b * b * ev);

    BDiagClosed out;
    const double b11 = 2.0 / one_ev2 * ev / one_ev + 1.0 / one_ev2;
    out.diag[0] = b11;
    out.diag[2] = 1.0 / one_ev2;
    out.diag[3] = 2.0 * mom.e_absz * mom.e_absz_v / (one_ev * one_ev2) + 1.0 / one_ev2;

    // W = 2 (beta - V).
    const double ew = 2.0 * (b - ev);
    const double ew2 = 4.0 * (b * b - 2.0 * b * ev + ev2);
    const double ewv = 2.0 * (b * ev - ev2);
    const double my = (a + ew) / one_b;
    const double ey2 = (a * a + ew2 + 2.0 * a * b * my + 2.0 * a * ew + 2.0 * b * my * ew) / one_b2;
    const double ed = my / one_ev;
    const double eyd = (a * my + a * ev * ed + b * ey2 + ew * my + ewv * ed) / one_bev;
    out.diag[1] = (ey2 + 2.0 * ev * eyd) / one_ev2;

    const double c = (a + 2.0 * b) / one_b;
    const double e_cross = ev / (one_b * one_ev);
    const double e_sq =
        4.0 * ev2 / one_ev2 * (b / (one_b * one_b2) * ev / one_ev - 1.0 / (one_b * one_b2) * ev * b / one_b2ev) +
        4.0 * b * ev * ev * ev / (one_b * one_b2 * one_b2ev) / one_ev2 +
        2.0 / one_b2 * ev2 / one_ev2 * (ev / one_ev - ev / one_b2ev) +
        2.0 / one_ev2 * ev * ev * ev / (one_b2 * one_b2ev) + 2.0 / one_ev2 * ev * ev * b / (one_b * one_b2) +
        ev2 / one_ev2 / one_b2;
    out.b22_printed = c * c * b11 + 4.0 * e_sq - 4.0 * c * e_cross;
    return out;
}

BMatrixEstimate b_matrix_mc(const ParamVector& theta0, const InnovationDist& dist, std::size_t m, std::size_t L,
                            std::uint64_t seed, unsigned workers)
{
    require_admissible(ModelKind::Egarch11, theta0);
    if (m == 0 || L == 0)
        throw DomainError("b_matrix_mc: m and L must be positive");
    const kernels::SeriesParams p{theta0.alpha, theta0.beta, theta0.gamma, theta0.delta};
    const kernels::KernelTable& k = kernels::active();
    const std::size_t chunks = (m + kChunk - 1) / kChunk;
    std::vector<Eigen::MatrixXd> sums(chunks);
    std::vector<std::size_t> counts(chunks);

    detail::parallel_for(chunks, workers, [&](std::size_t c) {
        const std::size_t lanes = std::min(kChunk, m - c * kChunk);
        std::vector<double> z(2 * L * lanes);
        std::vector<double> grad(4 * lanes);
        RandomStream rng(seed, StreamPurpose::GradientSeriesMc, static_cast<std::uint32_t>(c));
        for (double& v : z)
            v = dist.sample(rng);
        k.gradient_series(z.data(), lanes, L, p, grad.data());
        Eigen::Map<const Eigen::Matrix<double, 4, Eigen::Dynamic, Eigen::RowMajor>> G(grad.data(), 4,
                                                                                     static_cast<Eigen::Index>(lanes));
        sums[c] = G * G.transpose();
        counts[c] = lanes;
    });

    BMatrixEstimate est;
    est.m = m;
    est.L = L;
    reduce_chunks(sums, counts, est);
    const InnovationMoments mom = innovation_moments(theta0, dist);
    est.tail_bound = std::pow(mom.e_v2, static_cast<double>(L));
    return est;
}

BMatrixEstimate garch_b_matrix_mc(const ParamVector& t, const InnovationDist& dist, std::size_t m, std::size_t L,
                                  std::uint64_t seed, unsigned workers)
{
    require_admissible(ModelKind::Garch11, t);
    if (m == 0 || L == 0)
        throw DomainError("garch_b_matrix_mc: m and L must be positive");
    const std::size_t chunks = (m + kChunk - 1) / kChunk;
    std::vector<Eigen::MatrixXd> sums(chunks);
    std::vector<std::size_t> counts(chunks);
    const double s0 = t.beta + t.gamma < 1.0 ? t.alpha / (1.0 - t.beta - t.gamma) : t.alpha / (1.0 - t.beta);

    detail::parallel_for(chunks, workers, [&](std::size_t c) {
        const std::size_t lanes = std::min(kChunk, m - c * kChunk);
        RandomStream rng(seed, StreamPurpose::GradientSeriesMc, static_cast<std::uint32_t>(c));
        Eigen::Matrix3d acc = Eigen::Matrix3d::Zero();
        for (std::size_t j = 0; j < lanes; ++j)
        {
            double s2 = s0;
            for (std::size_t s = 0; s < L; ++s)
            {
                const double z = dist.sample(rng);
                s2 = t.alpha + t.beta * s2 + t.gamma * s2 * z * z;
            }
            Eigen::Vector3d g = Eigen::Vector3d::Zero();
            for (std::size_t s = 0; s < L; ++s)
            {
                const double z = dist.sample(rng);
                const double x2 = s2 * z * z;
                g = Eigen::Vector3d(1.0, s2, x2) + t.beta * g;
                s2 = t.alpha + t.beta * s2 + t.gamma * x2;
            }
            const Eigen::Vector3d gl = g / s2;
            acc += gl * gl.transpose();
        }
        sums[c] = acc;
        counts[c] = lanes;
    });

    BMatrixEstimate est;
    est.m = m;
    est.L = L;
    reduce_chunks(sums, counts, est);
    est.tail_bound = std::pow(t.beta, static_cast<double>(L));
    return est;
}

AsymptoticReport asymptotic_variance(const Eigen::MatrixXd& B, double e_z4, std::size_t n)
{
    if (B.rows() != B.cols() || B.rows() == 0)
        throw DomainError("asymptotic_variance: B must be square");
    if (!(e_z4 > 1.0) || !std::isfinite(e_z4))
        throw DomainError("asymptotic_variance: E Z^4 must be finite and > 1");
    if (n == 0)
        throw DomainError("asymptotic_variance: n must be positive");
    const Eigen::MatrixXd Bs = 0.5 * (B + B.transpose());
    Eigen::LLT<Eigen::MatrixXd> llt(Bs);
    if (llt.info() != Eigen::Success || !(llt.rcond() > kMinRcond))
        throw DomainError("asymptotic_variance: B is not positive definite (linear independence violated or "
                          "Monte Carlo noise)");
    const Eigen::Index d = Bs.rows();
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(d, d);
    const double kappa = e_z4 - 1.0;

    AsymptoticReport r;
    r.B = Bs;
    r.e_z4 = e_z4;
    r.n = n;
    r.P = Bs / 2.0;
    r.Q = kappa * Bs / 4.0;
    const Eigen::MatrixXd binv = llt.solve(I);
    r.V = kappa * 0.5 * (binv + binv.transpose());

    Eigen::LLT<Eigen::MatrixXd> pllt(r.P);
    const Eigen::MatrixXd pinv = pllt.solve(I);
    const Eigen::MatrixXd sandwich = pinv * r.Q * pinv;
    const double scale = std::max(1.0, r.V.cwiseAbs().maxCoeff());
    r.sandwich_residual = (sandwich - r.V).cwiseAbs().maxCoeff() / scale;
    r.identity_residual = (r.V * Bs - kappa * I).cwiseAbs().maxCoeff() / std::max(1.0, kappa);
    r.se = (r.V.diagonal() / static_cast<double>(n)).cwiseSqrt();
    return r;
}

}  // namespace volsre
