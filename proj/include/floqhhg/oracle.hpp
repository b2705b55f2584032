#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "floqhhg/params.hpp"
#include "floqhhg/spectrum.hpp"

namespace floqhhg {

using cplx = std::complex<double>;

/// Single-excitation model on a uniform photon grid over [0, L].
struct OracleModel {
    SystemParams params;
    double cutoff = 0.0;
    std::size_t n_modes = 0;
    double d_omega = 0.0;
    std::vector<double> omega; // (j + 1/2) d_omega
    std::vector<double> g;     // lambda sqrt(omega_j d_omega)
};

/// Throws ResolutionError when d_omega > omega / 20 or, for lambda > 0,
/// d_omega > Gamma_est / 10 with Gamma_est = 2 pi lambda^2 delta0.
OracleModel discretize(const SystemParams& p, double cutoff, std::size_t n_modes);

/// Default mode count: 8000 modes for a 200-wide band, scaled with the cutoff.
std::size_t default_oracle_modes(double cutoff);

struct OracleState {
    double t = 0.0;
    cplx c_d = 1.0;
    std::vector<cplx> c;
};

OracleState initial_state(const OracleModel& model);

/// Fixed-step 4th-order propagation from state.t to t_end (either direction).
/// Returns the state at t_end; the last step is shortened to land exactly.
OracleState propagate(const OracleModel& model, OracleState state, double t_end, double dt);

struct IntegrateOptions {
    double t_end = 1.0;
    double dt = 2e-4;
    std::size_t save_every = 50;
    std::vector<double> snapshot_times; // photon arrays stored only here
    bool certify = true;                // rerun at dt/2 and compare
    double certify_tolerance = 1e-8;
};

struct OracleTrajectory {
    SystemParams params;
    double cutoff = 0.0;
    double d_omega = 0.0;
    std::vector<double> omega;

    std::vector<double> times;
    std::vector<cplx> c_d;
    std::vector<double> norm;

    std::vector<double> snapshot_times;
    std::vector<std::vector<cplx>> snapshots;

    double max_norm_error = 0.0;
    double step_doubling_delta = -1.0; // |c_d(dt) - c_d(dt/2)| at t_end; -1 if not certified
};

/// Throws CertificationError when the step-doubling delta or the norm drift
/// exceed the tolerance, ResolutionError when t_end passes the recurrence
/// bound pi / d_omega.
OracleTrajectory integrate(const OracleModel& model, const IntegrateOptions& options);

/// S(omega_j) = |c_j|^2 / d_omega at a stored snapshot, written to both S and
/// S_oracle; the analytic component columns are left empty.
SpectrumFrame oracle_spectrum(const OracleTrajectory& traj, std::size_t snapshot_index);

struct DecayFit {
    double gamma = 0.0;
    bool rejected = false;  // slope below threshold; gamma reported as 0
    double window_lo = 0.0;
    double window_hi = 0.0;
    std::size_t points = 0;
    int harmonics = 0;
};

/// Log-linear fit of |c_d|^2 over [0.5/G, 3/G], G iterated to self-consistency.
/// With harmonics > 0, cos/sin(k omega t) regressors absorb the drive modulation.
DecayFit fit_decay(const std::vector<double>& times, const std::vector<cplx>& c_d,
                   double omega = 1.0, int harmonics = 0);
/// Uses three harmonics when the trajectory was driven (a > 0).
DecayFit fit_decay(const OracleTrajectory& traj);

} // namespace floqhhg
