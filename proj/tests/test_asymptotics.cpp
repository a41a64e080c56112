#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "volsre/asymptotics.hpp"
#include "volsre/error.hpp"
#include "volsre/rng.hpp"

using namespace volsre;

namespace {

const ParamVector kRef{0.0, 0.5, -0.1, 0.3};
const double kEabs = std::sqrt(2.0 / std::numbers::pi);

Eigen::Matrix4d exact_b(const ParamVector& t)
{
    return oracle::exact_b(t, kEabs, 0.0);
}

}  // namespace

TEST_CASE("innovation moments")
{
    const InnovationDist n = InnovationDist::std_normal();
    const InnovationMoments d = innovation_moments({0.3, 0.7, 0, 0}, n);
    CHECK(d.e_v == doctest::Approx(0.7).epsilon(1e-14));
    CHECK(d.e_v2 == doctest::Approx(0.49).epsilon(1e-14));
    CHECK(d.e_absz_v == doctest::Approx(0.7 * kEabs).epsilon(1e-12));
    CHECK(d.e_z4 == 3.0);
    CHECK(d.e_absz == doctest::Approx(kEabs).epsilon(1e-12));

    // Direct quadrature of the V moments (independent route).
    const InnovationMoments m = innovation_moments(kRef, n);
    auto v = [](double z) { return 0.5 - 0.5 * (-0.1 * z + 0.3 * std::abs(z)); };
    CHECK(m.e_v == doctest::Approx(oracle::expect(n, v)).epsilon(1e-12));
    CHECK(m.e_v2 == doctest::Approx(oracle::expect(n, [&](double z) { return v(z) * v(z); })).epsilon(1e-12));
    CHECK(m.e_absz_v == doctest::Approx(oracle::expect(n, [&](double z) { return std::abs(z) * v(z); })).epsilon(1e-12));
    CHECK(m.e_v2 >= m.e_v * m.e_v);

    // Cross-check against 1e7 draws.
    RandomStream r(61, StreamPurpose::Generic);
    const int N = 10000000;
    double s1 = 0, s2 = 0, s3 = 0, q1 = 0, q2 = 0, q3 = 0;
    for (int i = 0; i < N; ++i)
    {
        const double z = r.normal();
        const double vv = v(z), a = vv * vv, c = std::abs(z) * vv;
        s1 += vv;
        s2 += a;
        s3 += c;
        q1 += vv * vv;
        q2 += a * a;
        q3 += c * c;
    }
    auto within = [&](double sum, double sq, double target) {
        const double mean = sum / N;
        const double se = std::sqrt((sq / N - mean * mean) / N);
        return std::abs(mean - target) < 4.0 * se;
    };
    CHECK(within(s1, q1, m.e_v));
    CHECK(within(s2, q2, m.e_v2));
    CHECK(within(s3, q3, m.e_absz_v));

    const InnovationMoments t4 = innovation_moments(kRef, InnovationDist::student_t(4.0));
    CHECK_FALSE(t4.e_z4_finite());
    CHECK_FALSE(check_mm_prime(t4).ok);
}

TEST_CASE("condition (MM')")
{
    const InnovationDist n = InnovationDist::std_normal();
    const MmPrimeCheck a = check_mm_prime(innovation_moments({0, 0.9, 0, 0}, n));
    CHECK(a.ok);
    CHECK(a.margin == doctest::Approx(0.19).epsilon(1e-13));
    const MmPrimeCheck b = check_mm_prime(innovation_moments({0, 0, 0, 2}, n));
    CHECK_FALSE(b.ok);
    CHECK(b.margin == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(check_mm_prime(innovation_moments(kRef, n)).ok);
}

TEST_CASE("closed-form diagonal: degenerate cases")
{
    const InnovationDist n = InnovationDist::std_normal();
    const ParamVector t{0, 0.5, 0, 0};
    const BDiagClosed c = b_diag_closed_form(t, innovation_moments(t, n));
    CHECK(c.diag[0] == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(c.diag[2] == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
    CHECK(c.diag[1] == doctest::Approx(0.0));
    const ParamVector t2{0.4, 0.5, 0, 0};
    CHECK(b_diag_closed_form(t2, innovation_moments(t2, n)).diag[1] ==
          doctest::Approx(0.4 * 0.4 / std::pow(0.5, 4)).epsilon(1e-13));
}

TEST_CASE("closed-form diagonal against the exact moment recursion")
{
    const InnovationDist n = InnovationDist::std_normal();
    for (const ParamVector t : {kRef, ParamVector{1.0, 0.5, 0, 0}, ParamVector{0.2, 0, -0.1, 0.3},
                                ParamVector{0.1, 0.9, 0.1, 0.2}, ParamVector{-0.3, 0.7, 0.2, 0.5}})
    {
        const Eigen::Matrix4d ex = exact_b(t);
        const BDiagClosed c = b_diag_closed_form(t, innovation_moments(t, n));
        for (int i = 0; i < 4; ++i)
            CHECK(c.diag[i] == doctest::Approx(ex(i, i)).epsilon(1e-9));
    }
    const BDiagClosed r = b_diag_closed_form(kRef, innovation_moments(kRef, n));
    CHECK(r.diag[1] == doctest::Approx(0.68508723).epsilon(1e-7));
    CHECK(r.b22_printed == doctest::Approx(6.9769).epsilon(1e-4));
}

TEST_CASE("closed-form guards")
{
    InnovationMoments m;
    m.e_absz = kEabs;
    m.e_z4 = 3.0;
    m.e_v = 0.5;
    m.e_v2 = 1.0 - 1e-13;
    CHECK_THROWS_WITH_AS(b_diag_closed_form({0, 0.5, 0, 1}, m), "near-singular moments", DomainError);
    m.e_v2 = 1.2;
    CHECK_THROWS_AS(b_diag_closed_form({0, 0.5, 0, 1}, m), InfeasibleError);
}

TEST_CASE("series Monte Carlo: deterministic components")
{
    const InnovationDist n = InnovationDist::std_normal();
    for (double b : {0.2, 0.5, 0.9})
    {
        const ParamVector t{0.3, b, 0, 0};
        const BMatrixEstimate e = b_matrix_mc(t, n, 2000, 400, 1);
        CHECK(std::abs(e.b(0, 0) - 1.0 / ((1 - b) * (1 - b))) < 1e-10);
        CHECK(std::abs(e.b(1, 1) - 0.09 / std::pow(1 - b, 4)) < 1e-10 * std::max(1.0, 0.09 / std::pow(1 - b, 4)));
        CHECK(e.b == e.b.transpose());
    }
}

TEST_CASE("series Monte Carlo against the exact matrix")
{
    const InnovationDist n = InnovationDist::std_normal();
    const BMatrixEstimate e = b_matrix_mc(kRef, n, 40000, 200, 7);
    const Eigen::Matrix4d ex = exact_b(kRef);
    CHECK(e.b == e.b.transpose());
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            CHECK(std::abs(e.b(i, j) - ex(i, j)) < 4.0 * e.se(i, j));
    CHECK(e.tail_bound < 1e-20);

    const BMatrixEstimate w1 = b_matrix_mc(kRef, n, 1000, 50, 3, 1);
    const BMatrixEstimate w3 = b_matrix_mc(kRef, n, 1000, 50, 3, 3);
    CHECK(w1.b == w3.b);
}

TEST_CASE("property: closed form and Monte Carlo agree at random parameters")
{
    const InnovationDist n = InnovationDist::std_normal();
    RandomStream r(62, StreamPurpose::Generic);
    int done = 0;
    while (done < 10)
    {
        ParamVector t{-1.0 + 2.0 * r.uniform(), 0.9 * r.uniform(), 0, 0.8 * r.uniform()};
        t.gamma = t.delta * (2.0 * r.uniform() - 1.0);
        const InnovationMoments m = innovation_moments(t, n);
        if (check_mm_prime(m).margin <= 0.05)
            continue;
        const BDiagClosed c = b_diag_closed_form(t, m);
        const BMatrixEstimate e = b_matrix_mc(t, n, 20000, 200, 100 + static_cast<std::uint64_t>(done));
        for (int i = 0; i < 4; ++i)
            CHECK(std::abs(c.diag[i] - e.b(i, i)) <= std::max(0.02 * std::abs(c.diag[i]), 4.0 * e.se(i, i)));
        ++done;
    }
}

TEST_CASE("series Monte Carlo grows without (MM')")
{
    const InnovationDist n = InnovationDist::std_normal();
    const ParamVector t{0.0, 0.5, 0.0, 6.0};
    CHECK_FALSE(check_mm_prime(innovation_moments(t, n)).ok);
    double prev = 0.0;
    for (std::size_t L : {50u, 100u, 200u})
    {
        const double b11 = b_matrix_mc(t, n, 2000, L, 8).b(0, 0);
        CHECK(b11 > 10.0 * prev);
        prev = b11;
    }
}

TEST_CASE("GARCH series Monte Carlo")
{
    // gamma = 0: sigma^2 = alpha / (1 - beta), so the first two gradient entries are 1 / alpha and 1 / (1 - beta).
    const BMatrixEstimate e = garch_b_matrix_mc({0.5, 0.6, 0.0, 0}, InnovationDist::std_normal(), 500, 100, 1);
    CHECK(e.b(0, 0) == doctest::Approx(4.0).epsilon(1e-10));
    CHECK(e.b(1, 1) == doctest::Approx(1.0 / (0.4 * 0.4)).epsilon(1e-10));
    CHECK(e.b == e.b.transpose());
    const BMatrixEstimate g = garch_b_matrix_mc({0.1, 0.8, 0.15, 0}, InnovationDist::std_normal(), 5000, 200, 2);
    const AsymptoticReport rep = asymptotic_variance(g.b, 3.0, 10000);
    CHECK(rep.V.rows() == 3);
    CHECK(rep.identity_residual < 1e-8);
}

TEST_CASE("asymptotic variance")
{
    const AsymptoticReport id = asymptotic_variance(Eigen::MatrixXd::Identity(4, 4), 3.0, 100);
    CHECK((id.V - 2.0 * Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(id.se(0) == doctest::Approx(std::sqrt(0.02)));

    const Eigen::MatrixXd B = exact_b(kRef);
    const AsymptoticReport r = asymptotic_variance(B, 3.0, 20000);
    CHECK(r.sandwich_residual < 1e-10);
    CHECK(r.identity_residual < 1e-8);
    CHECK((r.P - B / 2).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((r.Q - B / 2).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((r.V - r.V.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(Eigen::LLT<Eigen::MatrixXd>(r.V).info() == Eigen::Success);

    // gamma = delta = 0: the (alpha, beta) block of B is rank one, so V does not exist.
    const Eigen::Matrix4d deg = exact_b({0.4, 0.5, 0, 0});
    CHECK(std::abs(deg(0, 0) * deg(1, 1) - deg(0, 1) * deg(1, 0)) < 1e-10);
    CHECK_THROWS_AS(asymptotic_variance(deg, 3.0, 100), DomainError);

    Eigen::MatrixXd bad = Eigen::MatrixXd::Identity(4, 4);
    bad(3, 3) = -1.0;
    CHECK_THROWS_AS(asymptotic_variance(bad, 3.0, 100), DomainError);
    CHECK_THROWS_AS(asymptotic_variance(B, 1.0, 100), DomainError);
}
