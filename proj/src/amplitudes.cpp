#include "floqhhg/amplitudes.hpp"

#include <cmath>

#include <fmt/format.h>

#include "floqhhg/errors.hpp"

namespace floqhhg {

namespace {

constexpr cplx I{0.0, 1.0};
constexpr double kEta = 1e-12;

cplx phase_weight(const SpectralSetup& s, int m)
{
    return s.row(m) * std::polar(1.0, -static_cast<double>(m) * s.params.theta);
}

void check_ladder(const SpectralSetup& s)
{
    if (s.ladder.n_min > -s.row.half_width || s.ladder.n_max < s.row.half_width)
        throw DomainError("pole ladder does not cover the Floquet truncation");
}

} // namespace

SpectralSetup make_setup(const SystemParams& p, const ContinuumSpec& spec, int half_width, PoleMethod method)
{
    validate(p);
    const int M = half_width > 0 ? half_width : default_half_width(p.a);
    validate_continuum(spec, p, M);
    SpectralSetup s;
    s.params = p;
    s.continuum = spec;
    s.row = bessel_row(p.a, M);
    s.ladder = pole_ladder(p, spec, s.row, method);
    return s;
}

cplx s_resonance(double omega_k, double t, const SpectralSetup& s, bool residue_normalization)
{
    check_ladder(s);
    const int M = s.row.half_width;
    for (int m = -M; m <= M; ++m) {
        const cplx z = s.ladder.z(m);
        if (z.imag() == 0.0 && std::abs(omega_k - z.real()) < 1e-13)
            throw SingularityError(fmt::format("s_resonance: ω_k = {} coincides with an undamped pole", omega_k));
    }
    const double C = std::sqrt(coupling_sq(omega_k, s.continuum));
    if (s.params.lambda == 0.0 || C == 0.0)
        return 0.0;

    cplx sum = 0.0;
    for (int m = -M; m <= M; ++m) {
        const double J = s.row(m);
        if (J * J < kNegligibleWeight)
            continue;
        const cplx z = s.ladder.z(m);
        sum += std::exp(-I * z * t) * phase_weight(s, m) / (omega_k - z);
    }
    cplx r = -s.params.lambda * C * sum;
    if (residue_normalization)
        r *= s.ladder.residue;
    return r;
}

namespace {

// s_C at t = 0. sigma(omega_k - m w + l w) depends only on l - m, so the
// 2M+1 self-energies A_m share one lattice of 4M+1 sigma values.
cplx continuum_sum(double omega_k, const SpectralSetup& s)
{
    const double C = std::sqrt(coupling_sq(omega_k, s.continuum));
    if (s.params.lambda == 0.0 || C == 0.0)
        return 0.0;

    const int M = s.row.half_width;
    const double w = s.params.omega;
    std::vector<cplx> lattice(4 * static_cast<std::size_t>(M) + 1);
    for (int d = -2 * M; d <= 2 * M; ++d)
        lattice[d + 2 * M] = sigma_plus(cplx(omega_k + d * w, 0.0), s.continuum, Sheet::first);

    const double lam2 = s.params.lambda * s.params.lambda;
    cplx sum = 0.0;
    for (int m = -M; m <= M; ++m) {
        const double Jm = s.row(m);
        if (Jm * Jm < kNegligibleWeight)
            continue;
        cplx se = 0.0;
        for (int l = -M; l <= M; ++l) {
            const double wl = s.row(l) * s.row(l);
            if (wl < kNegligibleWeight)
                continue;
            se += wl * lattice[l - m + 2 * M];
        }
        const cplx A = s.params.delta0 + m * w + lam2 * se;
        sum += phase_weight(s, m) / (cplx(omega_k, kEta) - A);
    }
    return s.params.lambda * C * sum;
}

} // namespace

cplx s_continuum(double omega_k, double t, const SpectralSetup& s)
{
    return std::exp(-I * omega_k * t) * continuum_sum(omega_k, s);
}

AmplitudeDecomposition amplitude(double omega_k, double t, const SpectralSetup& s, const AmplitudeOptions& o)
{
    AmplitudeDecomposition d;
    d.omega_k = omega_k;
    d.t = t;
    d.s_R = s_resonance(omega_k, t, s, o.residue_normalization);
    d.s_C = s_continuum(omega_k, t, s);
    if (o.branch_term) {
        const BranchTerm b = s_branch(omega_k, t, s, o.quadrature);
        d.s_BR = b.value;
        d.s_BR_error = b.error;
        d.s_BR_converged = b.converged;
    }
    d.total = d.s_R + d.s_C + d.s_BR;
    return d;
}

cplx survival_amplitude(double t, const SpectralSetup& s, bool residue_normalization)
{
    check_ladder(s);
    const int M = s.row.half_width;
    cplx sum = 0.0;
    for (int m = -M; m <= M; ++m)
        sum += phase_weight(s, m) * std::exp(-I * s.ladder.z(m) * t);
    cplx r = std::polar(1.0, s.params.a * std::sin(s.params.theta)) * sum;
    if (residue_normalization)
        r *= s.ladder.residue;
    return r;
}

SpectrumEvaluator::SpectrumEvaluator(std::vector<double> grid, const SpectralSetup& setup)
    : grid_(std::move(grid)), setup_(setup)
{
    continuum0_.reserve(grid_.size());
    for (double wk : grid_)
        continuum0_.push_back(continuum_sum(wk, setup_));
}

SpectrumFrame SpectrumEvaluator::blank(double t, bool stationary) const
{
    SpectrumFrame f;
    f.t = t;
    f.stationary = stationary;
    f.omega_k = grid_;
    const std::size_t n = grid_.size();
    f.S.assign(n, 0.0);
    f.S_R.assign(n, 0.0);
    f.S_C.assign(n, 0.0);
    f.S_cross.assign(n, 0.0);
    f.params = setup_.params;
    f.continuum = setup_.continuum;
    f.truncation = setup_.truncation();
    return f;
}

SpectrumFrame SpectrumEvaluator::stationary() const
{
    SpectrumFrame f = blank(0.0, true);
    for (std::size_t i = 0; i < grid_.size(); ++i) {
        const double c = std::norm(continuum0_[i]);
        f.S[i] = c;
        f.S_C[i] = c;
    }
    return f;
}

SpectrumFrame SpectrumEvaluator::at(double t, const AmplitudeOptions& o) const
{
    SpectrumFrame f = blank(t, false);
    for (std::size_t i = 0; i < grid_.size(); ++i) {
        const double wk = grid_[i];
        const cplx r = s_resonance(wk, t, setup_, o.residue_normalization);
        const cplx c = std::exp(-I * wk * t) * continuum0_[i];
        cplx total = r + c;
        if (o.branch_term) {
            const auto& q = o.quadrature;
            if (!branch_ || branch_->quadrature().tolerance != q.tolerance
                || branch_->quadrature().max_depth != q.max_depth || branch_->quadrature().scale != q.scale)
                branch_.emplace(setup_, q);
            total += (*branch_)(wk, t).value;
        }
        f.S[i] = std::norm(total);
        f.S_R[i] = std::norm(r);
        f.S_C[i] = std::norm(c);
        f.S_cross[i] = f.S[i] - f.S_R[i] - f.S_C[i];
    }
    return f;
}

SpectrumFrame stationary_spectrum(const std::vector<double>& grid, const SpectralSetup& setup)
{
    return SpectrumEvaluator(grid, setup).stationary();
}

SpectrumFrame temporal_spectrum(const std::vector<double>& grid, double t, const SpectralSetup& setup,
                                const AmplitudeOptions& options)
{
    return SpectrumEvaluator(grid, setup).at(t, options);
}

} // namespace floqhhg
