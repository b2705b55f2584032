#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace floqhhg {

/// Integer-order Bessel functions J_m(a) for m = -M..M at a fixed argument.
///
/// Negative orders are filled from J_{-m} = (-1)^m J_m, never recomputed.
struct BesselRow {
    int half_width = 0;   // M
    double argument = 0;  // a = A / omega
    std::vector<double> values; // index m + M

    double operator()(int m) const { return values[static_cast<std::size_t>(m + half_width)]; }
    double at(int m) const;
    std::span<const double> span() const { return values; }
    int min_order() const { return -half_width; }
    int max_order() const { return half_width; }
};

/// J_n(x) by downward (Miller) recurrence normalized with the closure identity.
/// Throws DomainError for x < 0 or |n| > 10 (x + 10).
double bessel_j(int n, double x);

BesselRow bessel_row(double a, int half_width);

/// ceil(a) + 20; J_m(a) is below 1e-12 for larger |m|.
int default_half_width(double a);

} // namespace floqhhg
