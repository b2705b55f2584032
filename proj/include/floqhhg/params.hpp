#pragma once

#include <optional>
#include <string>

namespace floqhhg {

struct SystemParams {
    double delta0 = 20.0;
    double omega = 1.0;
    double a = 10.0;
    double lambda = 0.06;
    double theta = 0.0;

    double amplitude() const { return a * omega; }
    /// E_e(t) = delta0 + A cos(omega t + theta)
    double excited_energy(double t) const;
};

/// Throws DomainError naming the first violated inequality.
void validate(const SystemParams& p);

/// Message when lambda^2 delta0 / omega exceeds 0.1, otherwise nothing.
std::optional<std::string> weak_coupling_advisory(const SystemParams& p);

} // namespace floqhhg
