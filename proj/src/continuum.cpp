#include "floqhhg/continuum.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "floqhhg/errors.hpp"

namespace floqhhg {

namespace {

constexpr double pi = std::numbers::pi;
constexpr cplx I{0.0, 1.0};

void check_endpoint(cplx z, double L)
{
    if (z.imag() == 0.0 && z.real() == L)
        throw SingularityError(fmt::format("sigma_plus: z = {} sits on the cutoff branch point", L));
}

cplx sigma_first_full(cplx z, double L)
{
    if (z.imag() == 0.0) {
        const double x = z.real();
        if (x == 0.0)
            return {-L, 0.0};
        if (x > 0.0 && x < L)
            return {-L + x * std::log(x / (L - x)), -pi * x};
        return {-L + x * std::log(x / (x - L)), 0.0};
    }
    return -L + z * std::log(z / (z - L));
}

cplx dsigma_first_full(cplx z, double L)
{
    if (z.imag() == 0.0) {
        const double x = z.real();
        if (x == 0.0)
            throw SingularityError("sigma_plus_derivative: logarithmic singularity at z = 0");
        if (x > 0.0 && x < L)
            return {std::log(x / (L - x)) - L / (x - L), -pi};
        return {std::log(x / (x - L)) - L / (x - L), 0.0};
    }
    return std::log(z / (z - L)) - L / (z - L);
}

bool inside_band(double x, double L) { return x > 0.0 && x < L; }

} // namespace

void validate_continuum(const ContinuumSpec& spec, const SystemParams& p, int half_width)
{
    if (!(spec.cutoff > 0.0))
        throw DomainError(fmt::format("Λ > 0 required (got {})", spec.cutoff));
    const double top = p.delta0 + half_width * p.omega;
    if (!(spec.cutoff > top))
        throw DomainError(fmt::format("Λ > Δ0 + M·ω required (Λ = {}, Δ0 + M·ω = {})", spec.cutoff, top));
}

double coupling_sq(double w, const ContinuumSpec& spec)
{
    return (w >= 0.0 && w <= spec.cutoff) ? w : 0.0;
}

bool on_second_sheet(cplx z, const ContinuumSpec& spec, Sheet sheet)
{
    if (!(z.imag() < 0.0))
        return false;
    switch (sheet) {
    case Sheet::first: return false;
    case Sheet::second: return true;
    case Sheet::continued: return inside_band(z.real(), spec.cutoff);
    }
    return false;
}

cplx sigma_plus(cplx z, const ContinuumSpec& spec, Sheet sheet)
{
    const double L = spec.cutoff;
    check_endpoint(z, L);
    const bool second = on_second_sheet(z, spec, sheet);

    if (spec.lamb_shift == LambShift::imaginary_only) {
        if (z.imag() == 0.0)
            return inside_band(z.real(), L) ? cplx{0.0, -pi * z.real()} : cplx{0.0, 0.0};
        if (z.imag() > 0.0 || second)
            return -I * pi * z;
        return I * pi * z;
    }

    cplx s = sigma_first_full(z, L);
    if (second)
        s -= 2.0 * pi * I * z;
    return s;
}

cplx sigma_plus_derivative(cplx z, const ContinuumSpec& spec, Sheet sheet)
{
    const double L = spec.cutoff;
    check_endpoint(z, L);
    const bool second = on_second_sheet(z, spec, sheet);

    if (spec.lamb_shift == LambShift::imaginary_only) {
        if (z.imag() == 0.0)
            return inside_band(z.real(), L) ? cplx{0.0, -pi} : cplx{0.0, 0.0};
        if (z.imag() > 0.0 || second)
            return -I * pi;
        return I * pi;
    }

    cplx d = dsigma_first_full(z, L);
    if (second)
        d -= 2.0 * pi * I;
    return d;
}

cplx dyn_self_energy(int n, cplx eps, const SystemParams& p, const ContinuumSpec& spec,
                     Sheet sheet, const BesselRow& row)
{
    cplx sum = 0.0;
    const cplx base = eps - static_cast<double>(n) * p.omega;
    for (int l = row.min_order(); l <= row.max_order(); ++l) {
        const double w = row(l) * row(l);
        if (w < kNegligibleWeight)
            continue;
        sum += w * sigma_plus(base + static_cast<double>(l) * p.omega, spec, sheet);
    }
    return p.delta0 + n * p.omega + p.lambda * p.lambda * sum;
}

cplx dyn_self_energy_derivative(int n, cplx eps, const SystemParams& p, const ContinuumSpec& spec,
                                Sheet sheet, const BesselRow& row)
{
    cplx sum = 0.0;
    const cplx base = eps - static_cast<double>(n) * p.omega;
    for (int l = row.min_order(); l <= row.max_order(); ++l) {
        const double w = row(l) * row(l);
        if (w < kNegligibleWeight)
            continue;
        sum += w * sigma_plus_derivative(base + static_cast<double>(l) * p.omega, spec, sheet);
    }
    return p.lambda * p.lambda * sum;
}

} // namespace floqhhg
