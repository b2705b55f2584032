#include <doctest.h>

#include <cmath>
#include <random>

#include "floqhhg/bessel.hpp"
#include "floqhhg/errors.hpp"

using namespace floqhhg;

namespace {

// truncated power series in long double
double series_j(int n, double x, int terms = 40)
{
    const int order = std::abs(n);
    long double sum = 0.0L;
    long double term = std::pow(static_cast<long double>(x) / 2.0L, order) / std::tgamma(static_cast<long double>(order) + 1.0L);
    for (int k = 0; k < terms; ++k) {
        sum += term;
        term *= -(static_cast<long double>(x) * x / 4.0L) / ((k + 1.0L) * (k + 1.0L + order));
    }
    const double v = static_cast<double>(sum);
    return (n < 0 && order % 2) ? -v : v;
}

} // namespace

TEST_CASE("J_0(0) is 1 and higher orders vanish at the origin")
{
    CHECK(bessel_j(0, 0.0) == 1.0);
    CHECK(bessel_j(4, 0.0) == 0.0);
    CHECK(bessel_j(-3, 0.0) == 0.0);
}

TEST_CASE("parity J_{-n} = (-1)^n J_n")
{
    CHECK(bessel_j(-3, 10.0) == -bessel_j(3, 10.0));
    CHECK(bessel_j(-4, 10.0) == bessel_j(4, 10.0));
}

TEST_CASE("J_0(10) matches a 40-term power series")
{
    CHECK(std::abs(bessel_j(0, 10.0) - series_j(0, 10.0)) < 1e-10);
    CHECK(std::abs(bessel_j(0, 10.0) - (-0.2459357644513483352)) < 1e-12);
    CHECK(std::abs(bessel_j(3, 10.0) - 0.058379379305186812343) < 1e-12);
}

TEST_CASE("values agree with the series and the standard library over a range")
{
    for (double x : {0.3, 1.0, 2.5, 5.0, 7.7, 10.0, 12.0}) {
        for (int n = -25; n <= 25; ++n) {
            CAPTURE(x);
            CAPTURE(n);
            CHECK(std::abs(bessel_j(n, x) - series_j(n, x, 60)) < 1e-12);
            const double ref = std::cyl_bessel_j(static_cast<double>(std::abs(n)), x) * ((n < 0 && (n % 2)) ? -1.0 : 1.0);
            CHECK(std::abs(bessel_j(n, x) - ref) < 1e-12);
        }
    }
}

TEST_CASE("domain errors")
{
    CHECK_THROWS_AS(bessel_j(0, -1.0), DomainError);
    CHECK_THROWS_AS(bessel_j(201, 10.0), DomainError);
    CHECK_NOTHROW(bessel_j(200, 10.0));
    CHECK_THROWS_AS(bessel_row(10.0, 0), DomainError);
    CHECK_THROWS_AS(bessel_row(-2.0, 5), DomainError);
}

TEST_CASE("bessel_row at a = 0 is the identity row")
{
    const auto r = bessel_row(0.0, 5);
    CHECK(r.half_width == 5);
    CHECK(r.values.size() == 11);
    for (int m = -5; m <= 5; ++m)
        CHECK(r(m) == (m == 0 ? 1.0 : 0.0));
}

TEST_CASE("bessel_row(10, 30): closure, envelope and cutoff")
{
    const auto r = bessel_row(10.0, 30);
    double sum = 0.0;
    for (double v : r.values)
        sum += v * v;
    CHECK(sum >= 1.0 - 1e-12);
    CHECK(sum <= 1.0 + 1e-15);

    int arg = 0;
    for (int m = -30; m <= 30; ++m)
        if (std::abs(r(m)) > std::abs(r(arg)))
            arg = m;
    CHECK(std::abs(arg) <= 10);
    // J_14(10) = 0.01196 sits just above 1e-2; the envelope drops below it from |m| = 15
    CHECK(std::abs(r(14) - series_j(14, 10.0)) < 1e-12);
    CHECK(r(14) == doctest::Approx(0.011957).epsilon(1e-4));
    for (int m = 15; m <= 30; ++m) {
        CHECK(std::abs(series_j(m, 10.0)) < 1e-2);
        CHECK(std::abs(r(m)) < 1e-2);
        CHECK(std::abs(r(-m)) < 1e-2);
    }
    CHECK(r.at(30) == r(30));
    CHECK_THROWS_AS(r.at(31), DomainError);
}

TEST_CASE("default half-width is ceil(a) + 20")
{
    CHECK(default_half_width(10.0) == 30);
    CHECK(default_half_width(0.0) == 20);
    CHECK(default_half_width(4.2) == 25);
}

TEST_CASE("property: closure, parity and recurrence for random a in [0, 20]")
{
    std::mt19937_64 rng(1234);
    std::uniform_real_distribution<double> U(0.0, 20.0);
    for (int trial = 0; trial < 50; ++trial) {
        const double a = U(rng);
        const int M = default_half_width(a);
        const auto r = bessel_row(a, M);
        double sum = 0.0;
        double prev = 0.0;
        for (int m = -M; m <= M; ++m) {
            sum += r(m) * r(m);
            CHECK(r(-m) == ((m % 2) ? -r(m) : r(m)));
        }
        CHECK(sum >= 1.0 - 1e-12);
        CHECK(sum <= 1.0 + 1e-14);
        for (int m = -M + 1; m <= M - 1; ++m)
            CHECK(std::abs(r(m - 1) + r(m + 1) - (2.0 * m / a) * r(m)) < 1e-10);

        // partial sums of squares grow monotonically toward 1
        for (int K = 0; K <= M; ++K) {
            double part = 0.0;
            for (int m = -K; m <= K; ++m)
                part += r(m) * r(m);
            CHECK(part >= prev);
            prev = part;
        }
    }
}
