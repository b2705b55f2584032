#pragma once

#include <cstddef>
#include <vector>

#include "floqhhg/continuum.hpp"
#include "floqhhg/params.hpp"

namespace floqhhg {

/// S(omega_k, t) on a grid with its decomposition and run metadata.
/// S_cross = S - S_R - S_C, so the three columns always add up to S.
struct SpectrumFrame {
    double t = 0.0;
    bool stationary = false; // t -> infinity
    std::vector<double> omega_k;
    std::vector<double> S;
    std::vector<double> S_R;
    std::vector<double> S_C;
    std::vector<double> S_cross;
    std::vector<double> S_oracle; // empty unless filled by an oracle run

    SystemParams params;
    ContinuumSpec continuum;
    int truncation = 0;

    std::size_t size() const { return omega_k.size(); }
    double omega_t() const { return params.omega * t; }
};

/// omega_k = lo + (i + 1/2) (hi - lo) / count, i = 0..count-1.
std::vector<double> jittered_grid(double lo, double hi, std::size_t count);

/// Indices of strict interior local maxima.
std::vector<std::size_t> local_maxima(const std::vector<double>& values);

/// Index of the grid point closest to x.
std::size_t nearest_index(const std::vector<double>& grid, double x);

} // namespace floqhhg
