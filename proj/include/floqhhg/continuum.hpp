#pragma once

#include <complex>

#include "floqhhg/bessel.hpp"
#include "floqhhg/params.hpp"

namespace floqhhg {

using cplx = std::complex<double>;

enum class CouplingForm { sqrt_omega };
enum class LambShift { full, imaginary_only };

/// Which branch of the self-energy to evaluate below the real axis.
///   first     : the physical sheet (Schwarz-symmetric, cut on [0, L])
///   second    : first - 2 pi i z for Im z < 0
///   continued : second where Re z lies inside (0, L), first elsewhere
enum class Sheet { first, second, continued };

struct ContinuumSpec {
    double cutoff = 200.0;
    CouplingForm coupling_form = CouplingForm::sqrt_omega;
    LambShift lamb_shift = LambShift::full;
};

/// Throws DomainError unless cutoff > 0 and cutoff > delta0 + M omega.
void validate_continuum(const ContinuumSpec& spec, const SystemParams& p, int half_width);

/// C(w)^2 rho(w): w on [0, L], 0 outside.
double coupling_sq(double w, const ContinuumSpec& spec);

/// sigma(z) = -L + z log(z / (z - L)). On the real axis inside the band the
/// boundary value from above is returned. sigma(0) is its finite limit -L;
/// z == L throws SingularityError.
cplx sigma_plus(cplx z, const ContinuumSpec& spec, Sheet sheet = Sheet::first);
cplx sigma_plus_derivative(cplx z, const ContinuumSpec& spec, Sheet sheet = Sheet::first);

/// True when `z` is evaluated on the second sheet under the given selector.
bool on_second_sheet(cplx z, const ContinuumSpec& spec, Sheet sheet);

/// A_n(eps) = delta0 + n omega + lambda^2 sum_l J_l^2 sigma(eps - n omega + l omega).
cplx dyn_self_energy(int n, cplx eps, const SystemParams& p, const ContinuumSpec& spec,
                     Sheet sheet, const BesselRow& row);
cplx dyn_self_energy_derivative(int n, cplx eps, const SystemParams& p, const ContinuumSpec& spec,
                                Sheet sheet, const BesselRow& row);

/// Terms with J_l^2 below this are skipped in every Floquet sum.
inline constexpr double kNegligibleWeight = 1e-32;

} // namespace floqhhg
