// SPDX-License-Identifier: Apache-2.0
#include "volsre/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include "volsre/models.hpp"

namespace volsre {
namespace {

constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.0};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment
{
    double a, b, value, error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

Segment gk15(const std::function<double(double)>& f, double a, double b)
{
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double kronrod = fc * kWgk[7];
    double gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j)
    {
        const double dx = h * kXgk[j];
        const double pair = f(c - dx) + f(c + dx);
        kronrod += kWgk[j] * pair;
        if (j % 2 == 1)
            gauss += kWg[j / 2] * pair;
    }
    return {a, b, kronrod * h, std::abs((kronrod - gauss) * h)};
}

}  // namespace

QuadResult integrate(const std::function<double(double)>& f, double a, double b, double tol,
                     std::size_t max_intervals)
{
    if (a == b)
        return {};
    std::priority_queue<Segment> heap;
    Segment first = gk15(f, a, b);
    heap.push(first);
    double value = first.value;
    double error = first.error;
    std::size_t n = 1;
    while (error > tol * std::max(1.0, std::abs(value)) && n < max_intervals)
    {
        Segment worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b)
        {
            // Interval cannot be split further in double precision.
            heap.push(worst);
            break;
        }
        Segment left = gk15(f, worst.a, mid);
        Segment right = gk15(f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++n;
    }
    // Re-sum to shed the drift of the incremental updates.
    value = 0.0;
    error = 0.0;
    while (!heap.empty())
    {
        value += heap.top().value;
        error += heap.top().error;
        heap.pop();
    }
    return {value, error, n};
}

QuadResult integrate_to_infinity(const std::function<double(double)>& f, double a, double tol,
                                 std::size_t max_intervals)
{
    auto g = [&](double u) {
        if (u >= 1.0)
            return 0.0;
        const double one_minus = 1.0 - u;
        const double z = a + u / one_minus;
        const double v = f(z) / (one_minus * one_minus);
        return std::isfinite(v) ? v : 0.0;
    };
    return integrate(g, 0.0, 1.0, tol, max_intervals);
}

QuadResult expectation(const InnovationDist& dist, const std::function<double(double)>& f, double tol)
{
    auto pos = integrate_to_infinity([&](double z) { return f(z) * dist.density(z); }, 0.0, tol);
    auto neg = integrate_to_infinity([&](double z) { return f(-z) * dist.density(-z); }, 0.0, tol);
    return {pos.value + neg.value, pos.error + neg.error, pos.intervals + neg.intervals};
}

}  // namespace volsre
