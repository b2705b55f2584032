#pragma once

#include <vector>

#include "floqhhg/continuum.hpp"

namespace floqhhg {

enum class PoleMethod { perturbative, self_consistent };

struct FloquetPole {
    int n = 0;
    cplx z;
    double gamma = 0.0; // -2 Im z
    PoleMethod method = PoleMethod::perturbative;
};

/// Throws DomainError if `row` is narrower than default_half_width(p.a) or
/// was built for a different argument.
void check_row(const SystemParams& p, const BesselRow& row);

FloquetPole resonance_pole(int n, const SystemParams& p, const ContinuumSpec& spec,
                           const BesselRow& row, PoleMethod method);

/// Poles for n in [n_min, n_max], all translated from a single n = 0 pole.
struct PoleLadder {
    FloquetPole base;
    double omega = 1.0;
    int n_min = 0;
    int n_max = 0;
    /// 1 / (1 - A_0'(z_0)): residue of the resolvent at the n = 0 pole.
    cplx residue = 1.0;

    cplx z(int n) const { return base.z + static_cast<double>(n) * omega; }
    FloquetPole at(int n) const;
    std::vector<FloquetPole> poles() const;
};

PoleLadder pole_ladder(const SystemParams& p, const ContinuumSpec& spec, const BesselRow& row,
                       int n_min, int n_max, PoleMethod method);

/// Convenience overload covering n = -M..M of the row.
PoleLadder pole_ladder(const SystemParams& p, const ContinuumSpec& spec, const BesselRow& row,
                       PoleMethod method);

} // namespace floqhhg
