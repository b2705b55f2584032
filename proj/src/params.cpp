#include "floqhhg/params.hpp"

#include <cmath>

#include <fmt/format.h>

#include "floqhhg/errors.hpp"

namespace floqhhg {

double SystemParams::excited_energy(double t) const
{
    return delta0 + amplitude() * std::cos(omega * t + theta);
}

void validate(const SystemParams& p)
{
    if (!std::isfinite(p.delta0) || !std::isfinite(p.omega) || !std::isfinite(p.a)
        || !std::isfinite(p.lambda) || !std::isfinite(p.theta))
        throw DomainError("system parameters must be finite");
    if (!(p.omega > 0.0))
        throw DomainError(fmt::format("ω > 0 required (got {})", p.omega));
    if (!(p.delta0 > 0.0))
        throw DomainError(fmt::format("Δ0 > 0 required (got {})", p.delta0));
    if (!(p.a >= 0.0))
        throw DomainError(fmt::format("a >= 0 required (got {})", p.a));
    if (!(p.lambda >= 0.0))
        throw DomainError(fmt::format("λ >= 0 required (got {})", p.lambda));
}

std::optional<std::string> weak_coupling_advisory(const SystemParams& p)
{
    const double x = p.lambda * p.lambda * p.delta0 / p.omega;
    if (x > 0.1)
        return fmt::format("weak-coupling advisory: λ²Δ0/ω = {:.3g} is not small; pole and amplitude formulas are leading order in λ", x);
    return std::nullopt;
}

} // namespace floqhhg
