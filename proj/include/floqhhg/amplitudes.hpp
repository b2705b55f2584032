#pragma once

#include <functional>
#include <optional>
#include <unordered_map>
#include <vector>

#include "floqhhg/bessel.hpp"
#include "floqhhg/continuum.hpp"
#include "floqhhg/poles.hpp"
#include "floqhhg/spectrum.hpp"

namespace floqhhg {

/// Everything the amplitude sums share: one truncation M for the row, the
/// pole ladder and the self-energies.
struct SpectralSetup {
    SystemParams params;
    ContinuumSpec continuum;
    BesselRow row;
    PoleLadder ladder;

    int truncation() const { return row.half_width; }
};

/// half_width <= 0 selects default_half_width(p.a).
SpectralSetup make_setup(const SystemParams& p, const ContinuumSpec& spec, int half_width = 0,
                         PoleMethod method = PoleMethod::perturbative);

struct BranchQuadSpec {
    double tolerance = 1e-10;  // relative to the summed L1 norm; floored at sqrt(eps)
    unsigned max_depth = 15;
    double scale = 1.0;        // y = scale * u / (1 - u)
};

struct AmplitudeOptions {
    bool branch_term = false;
    bool residue_normalization = false;
    BranchQuadSpec quadrature;
};

struct BranchTerm {
    cplx value = 0.0;
    double error = 0.0;
    bool converged = true;
};

struct AmplitudeDecomposition {
    double omega_k = 0.0;
    double t = 0.0;
    cplx s_R = 0.0;
    cplx s_C = 0.0;
    cplx s_BR = 0.0;
    double s_BR_error = 0.0;
    bool s_BR_converged = true;
    cplx total = 0.0;
};

cplx s_resonance(double omega_k, double t, const SpectralSetup& setup, bool residue_normalization = false);
cplx s_continuum(double omega_k, double t, const SpectralSetup& setup);
/// Throws DomainError for lamb_shift = imaginary_only, which has no causal continuation.
BranchTerm s_branch(double omega_k, double t, const SpectralSetup& setup, const BranchQuadSpec& quad = {});

/// s_BR for many (omega_k, t). The self-energy part of the cut integrand does
/// not depend on omega_k or t and is memoized per quadrature node.
/// Not safe for concurrent calls on one instance.
class BranchEvaluator {
public:
    BranchEvaluator(const SpectralSetup& setup, const BranchQuadSpec& quad = {});
    BranchTerm operator()(double omega_k, double t) const;
    const BranchQuadSpec& quadrature() const { return quad_; }

private:
    struct Node {
        cplx eps;
        cplx value;
    };
    struct Point {
        double b;
        std::function<Node(double)> kernel;
        mutable std::unordered_map<double, Node> cache;
    };
    SpectralSetup setup_;
    BranchQuadSpec quad_;
    std::vector<Point> points_;
};

AmplitudeDecomposition amplitude(double omega_k, double t, const SpectralSetup& setup,
                                 const AmplitudeOptions& options = {});

SpectrumFrame stationary_spectrum(const std::vector<double>& grid, const SpectralSetup& setup);
SpectrumFrame temporal_spectrum(const std::vector<double>& grid, double t, const SpectralSetup& setup,
                                const AmplitudeOptions& options = {});

/// <d|Psi(t)> from the pole term: e^{i a sin theta} sum_m J_m e^{-i m theta} e^{-i z_m t}.
cplx survival_amplitude(double t, const SpectralSetup& setup, bool residue_normalization = false);

/// Caches the t-independent continuum sums of a grid so that many frames of
/// the same grid cost only the resonance sums.
class SpectrumEvaluator {
public:
    SpectrumEvaluator(std::vector<double> grid, const SpectralSetup& setup);

    SpectrumFrame stationary() const;
    SpectrumFrame at(double t, const AmplitudeOptions& options = {}) const;
    const std::vector<double>& grid() const { return grid_; }

private:
    SpectrumFrame blank(double t, bool stationary) const;

    std::vector<double> grid_;
    SpectralSetup setup_;
    std::vector<cplx> continuum0_; // s_C at t = 0
    mutable std::optional<BranchEvaluator> branch_;
};

} // namespace floqhhg
