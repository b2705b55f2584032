#include "floqhhg/bessel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "floqhhg/errors.hpp"

namespace floqhhg {

namespace {

constexpr double kRescaleAbove = 1e100;

// J_0..J_nmax at x > 0. The recurrence starts far enough above max(nmax, x)
// that the seeded minimal solution has converged to double precision.
std::vector<double> miller_nonnegative(int nmax, double x)
{
    const double top = std::max(static_cast<double>(nmax), x);
    const int start = static_cast<int>(std::ceil(top)) + 30
                      + static_cast<int>(std::sqrt(60.0 * std::max(top, 1.0)));

    std::vector<double> f(static_cast<std::size_t>(start) + 2, 0.0);
    f[start + 1] = 0.0;
    f[start] = 1.0;
    for (int k = start; k >= 1; --k) {
        f[k - 1] = (2.0 * k / x) * f[k] - f[k + 1];
        if (std::abs(f[k - 1]) > kRescaleAbove) {
            for (int j = k - 1; j <= start + 1; ++j)
                f[j] /= kRescaleAbove;
        }
    }

    // closure: J_0^2 + 2 sum_{k>=1} J_k^2 = 1; sign from J_0 + 2 sum J_2k = 1
    double sq = f[0] * f[0];
    double even = f[0];
    for (int k = 1; k <= start; ++k) {
        sq += 2.0 * f[k] * f[k];
        if (k % 2 == 0)
            even += 2.0 * f[k];
    }
    const double scale = std::copysign(1.0 / std::sqrt(sq), even);

    std::vector<double> out(static_cast<std::size_t>(nmax) + 1);
    for (int k = 0; k <= nmax; ++k)
        out[k] = f[k] * scale;
    return out;
}

void check_argument(int n, double x)
{
    if (!(x >= 0.0))
        throw DomainError("bessel_j: argument must be >= 0, got " + std::to_string(x));
    if (std::abs(static_cast<double>(n)) > 10.0 * (x + 10.0))
        throw DomainError("bessel_j: order " + std::to_string(n) + " outside supported range |n| <= 10 (x + 10)");
}

} // namespace

double bessel_j(int n, double x)
{
    check_argument(n, x);
    const int order = std::abs(n);
    double value = 0.0;
    if (x == 0.0)
        value = order == 0 ? 1.0 : 0.0;
    else
        value = miller_nonnegative(order, x)[order];
    return (n < 0 && (order % 2 == 1)) ? -value : value;
}

double BesselRow::at(int m) const
{
    if (m < -half_width || m > half_width)
        throw DomainError("BesselRow: order " + std::to_string(m) + " outside row half-width " + std::to_string(half_width));
    return (*this)(m);
}

BesselRow bessel_row(double a, int half_width)
{
    if (half_width < 1)
        throw DomainError("bessel_row: half-width must be >= 1");
    check_argument(half_width, a);

    BesselRow row;
    row.half_width = half_width;
    row.argument = a;
    row.values.assign(2 * static_cast<std::size_t>(half_width) + 1, 0.0);

    if (a == 0.0) {
        row.values[half_width] = 1.0;
        return row;
    }

    const auto positive = miller_nonnegative(half_width, a);
    for (int m = 0; m <= half_width; ++m) {
        row.values[half_width + m] = positive[m];
        row.values[half_width - m] = (m % 2 == 0) ? positive[m] : -positive[m];
    }
    return row;
}

int default_half_width(double a)
{
    return static_cast<int>(std::ceil(a)) + 20;
}

} // namespace floqhhg
