#include <doctest.h>

#include <cmath>

#include "volsre/optimize.hpp"

using namespace volsre;

TEST_CASE("Nelder-Mead on a quadratic and on Rosenbrock")
{
    auto quad = [](std::span<const double> u) {
        return (u[0] - 0.3) * (u[0] - 0.3) + 2.0 * (u[1] - 0.7) * (u[1] - 0.7) + (u[2] - 0.5) * (u[2] - 0.5);
    };
    const NelderMeadResult q = nelder_mead(quad, {0.9, 0.1, 0.2});
    CHECK(q.converged);
    CHECK(q.x[0] == doctest::Approx(0.3).epsilon(1e-5));
    CHECK(q.x[1] == doctest::Approx(0.7).epsilon(1e-5));
    CHECK(q.x[2] == doctest::Approx(0.5).epsilon(1e-5));

    // Rosenbrock rescaled into the unit square, minimum at (0.6, 0.6).
    auto rosen = [](std::span<const double> u) {
        const double x = 5.0 * u[0] - 2.0, y = 5.0 * u[1] - 2.0;
        return 100.0 * (y - x * x) * (y - x * x) + (1.0 - x) * (1.0 - x);
    };
    NelderMeadOptions o;
    o.tol = 1e-9;
    o.max_iter = 5000;
    const NelderMeadResult r = nelder_mead(rosen, {0.1, 0.9}, o);
    CHECK(r.converged);
    CHECK(r.x[0] == doctest::Approx(0.6).epsilon(1e-5));
    CHECK(r.x[1] == doctest::Approx(0.6).epsilon(1e-5));
}

TEST_CASE("Nelder-Mead respects an extreme barrier and never increases the best value")
{
    int calls = 0;
    auto f = [&](std::span<const double> u) {
        ++calls;
        if (u[0] < 0.0 || u[0] > 1.0 || u[1] < 0.0 || u[1] > 1.0)
            return HUGE_VAL;
        return std::pow(u[0] + 0.5, 2) + std::pow(u[1] - 0.4, 2);
    };
    const NelderMeadResult r = nelder_mead(f, {0.95, 0.95});
    CHECK(r.x[0] >= 0.0);
    CHECK(r.x[0] < 1e-5);
    CHECK(r.x[1] == doctest::Approx(0.4).epsilon(1e-4));
    CHECK(r.f <= f(std::vector<double>{0.95, 0.95}));
    CHECK(r.evaluations == static_cast<std::size_t>(calls - 1));
}

TEST_CASE("Nelder-Mead stops at the iteration cap")
{
    auto f = [](std::span<const double> u) { return std::sin(40.0 * u[0]) + u[0] * u[0]; };
    NelderMeadOptions o;
    o.max_iter = 3;
    o.tol = 1e-300;
    const NelderMeadResult r = nelder_mead(f, {0.5}, o);
    CHECK_FALSE(r.converged);
    CHECK(r.iterations == 3);
}
