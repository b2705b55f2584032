#include "floqhhg/poles.hpp"

#include <cmath>

#include <fmt/format.h>

#include "floqhhg/errors.hpp"

namespace floqhhg {

namespace {

constexpr int kMaxIterations = 100;
constexpr double kTolerance = 1e-12;

cplx perturbative_z(int n, const SystemParams& p, const ContinuumSpec& spec, const BesselRow& row)
{
    // the "+" prescription on the real axis is the boundary value from above
    return dyn_self_energy(n, cplx(p.delta0 + n * p.omega, 0.0), p, spec, Sheet::continued, row);
}

cplx self_consistent_z(int n, const SystemParams& p, const ContinuumSpec& spec, const BesselRow& row)
{
    cplx z = perturbative_z(n, p, spec, row);
    if (p.lambda == 0.0)
        return z;

    auto residual = [&](cplx x) { return x - dyn_self_energy(n, x, p, spec, Sheet::continued, row); };
    cplx f = residual(z);
    for (int it = 0; it < kMaxIterations; ++it) {
        const cplx slope = 1.0 - dyn_self_energy_derivative(n, z, p, spec, Sheet::continued, row);
        cplx step = f / slope;
        cplx next = z - step;
        cplx fn = residual(next);
        for (int k = 0; k < 30 && std::abs(fn) > std::abs(f) && std::abs(step) > kTolerance; ++k) {
            step *= 0.5;
            next = z - step;
            fn = residual(next);
        }
        z = next;
        f = fn;
        if (std::abs(step) < kTolerance)
            return z;
    }
    throw ConvergenceError(fmt::format("resonance_pole: Newton iteration did not converge in {} steps (last z = {}{:+}i, |residual| = {:.3g})",
                                       kMaxIterations, z.real(), z.imag(), std::abs(f)),
                           z, std::abs(f));
}

} // namespace

void check_row(const SystemParams& p, const BesselRow& row)
{
    if (row.argument != p.a)
        throw DomainError(fmt::format("Bessel row built for a = {} but parameters have a = {}", row.argument, p.a));
    if (row.half_width < default_half_width(p.a))
        throw DomainError(fmt::format("Bessel row half-width {} below required ceil(a) + 20 = {}", row.half_width, default_half_width(p.a)));
}

FloquetPole resonance_pole(int n, const SystemParams& p, const ContinuumSpec& spec,
                           const BesselRow& row, PoleMethod method)
{
    check_row(p, row);
    FloquetPole pole;
    pole.n = n;
    pole.method = method;
    pole.z = method == PoleMethod::perturbative ? perturbative_z(n, p, spec, row)
                                                : self_consistent_z(n, p, spec, row);
    pole.gamma = -2.0 * pole.z.imag();
    return pole;
}

FloquetPole PoleLadder::at(int n) const
{
    if (n < n_min || n > n_max)
        throw DomainError(fmt::format("pole ladder covers n = {}..{}, requested {}", n_min, n_max, n));
    FloquetPole pole = base;
    pole.n = n;
    pole.z = z(n);
    return pole;
}

std::vector<FloquetPole> PoleLadder::poles() const
{
    std::vector<FloquetPole> out;
    out.reserve(static_cast<std::size_t>(n_max - n_min + 1));
    for (int n = n_min; n <= n_max; ++n)
        out.push_back(at(n));
    return out;
}

PoleLadder pole_ladder(const SystemParams& p, const ContinuumSpec& spec, const BesselRow& row,
                       int n_min, int n_max, PoleMethod method)
{
    if (n_min > 0 || n_max < 0)
        throw DomainError("pole_ladder: range must contain n = 0");
    PoleLadder ladder;
    ladder.base = resonance_pole(0, p, spec, row, method);
    ladder.omega = p.omega;
    ladder.n_min = n_min;
    ladder.n_max = n_max;
    const cplx z0 = ladder.base.z;
    if (p.lambda > 0.0)
        ladder.residue = 1.0 / (1.0 - dyn_self_energy_derivative(0, z0, p, spec, Sheet::continued, row));
    return ladder;
}

PoleLadder pole_ladder(const SystemParams& p, const ContinuumSpec& spec, const BesselRow& row,
                       PoleMethod method)
{
    return pole_ladder(p, spec, row, -row.half_width, row.half_width, method);
}

} // namespace floqhhg
