#include "floqhhg/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "floqhhg/errors.hpp"

namespace floqhhg {

namespace {

constexpr cplx I{0.0, 1.0};
constexpr std::size_t kResyncEvery = 512;

double drive_phase(const SystemParams& p, double t)
{
    return p.delta0 * t + p.a * (std::sin(p.omega * t + p.theta) - std::sin(p.theta));
}

// Classical RK4 in the interaction picture b_d = c_d e^{i Phi}, b_j = c_j e^{i w_j t}:
//   b_d' = -i e^{i Phi} sum_j g_j e^{-i w_j t} b_j
//   b_j' = -i g_j e^{i w_j t} e^{-i Phi} b_d
// Every photon stage increment is a multiple of g_j e^{i w_j t_s}, so the
// stage sums collapse to three dot products per step.
class Stepper {
public:
    Stepper(const OracleModel& m, const OracleState& s)
        : m_(m), t_(s.t), bd_(s.c_d * std::polar(1.0, drive_phase(m.params, s.t))), b_(s.c.size()),
          P_(s.c.size()), H_(s.c.size())
    {
        for (std::size_t j = 0; j < b_.size(); ++j)
            b_[j] = s.c[j] * std::polar(1.0, m.omega[j] * s.t);
    }

    // n equal steps from the current time to t_to; observer(this) every `every` steps
    template <class Observer>
    void segment(double t_to, double dt, std::size_t every, Observer&& observe)
    {
        const double span = t_to - t_;
        if (span == 0.0)
            return;
        const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(std::abs(span) / std::abs(dt) - 1e-9)));
        const double h = span / static_cast<double>(n);
        const double t_start = t_;
        const std::size_t N = b_.size();

        double G0 = 0.0;
        cplx G1 = 0.0;
        for (std::size_t j = 0; j < N; ++j) {
            H_[j] = std::polar(1.0, -m_.omega[j] * h / 2.0);
            G0 += m_.g[j] * m_.g[j];
            G1 += m_.g[j] * m_.g[j] * H_[j];
        }

        for (std::size_t k = 0; k < n; ++k) {
            if (k % kResyncEvery == 0)
                for (std::size_t j = 0; j < N; ++j)
                    P_[j] = std::polar(1.0, -m_.omega[j] * t_);

            cplx S0 = 0.0, Sh = 0.0, S1 = 0.0;
            for (std::size_t j = 0; j < N; ++j) {
                const cplx x = m_.g[j] * P_[j] * b_[j];
                const cplx xh = x * H_[j];
                S0 += x;
                Sh += xh;
                S1 += xh * H_[j];
            }

            const SystemParams& p = m_.params;
            const cplx e0 = std::polar(1.0, drive_phase(p, t_));
            const cplx eh = std::polar(1.0, drive_phase(p, t_ + h / 2.0));
            const cplx e1 = std::polar(1.0, drive_phase(p, t_ + h));

            const cplx k1 = -I * e0 * S0;
            const cplx a1 = -I * std::conj(e0) * bd_;
            const cplx k2 = -I * eh * (Sh + h / 2.0 * a1 * G1);
            const cplx a2 = -I * std::conj(eh) * (bd_ + h / 2.0 * k1);
            const cplx k3 = -I * eh * (Sh + h / 2.0 * a2 * G0);
            const cplx a3 = -I * std::conj(eh) * (bd_ + h / 2.0 * k2);
            const cplx k4 = -I * e1 * (S1 + h * a3 * G1);
            const cplx a4 = -I * std::conj(e1) * (bd_ + h * k3);

            bd_ += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            const cplx mid = 2.0 * (a2 + a3);
            for (std::size_t j = 0; j < N; ++j) {
                const cplx c0 = std::conj(P_[j]);
                const cplx ch = c0 * std::conj(H_[j]);
                const cplx c1 = ch * std::conj(H_[j]);
                b_[j] += h / 6.0 * m_.g[j] * (a1 * c0 + mid * ch + a4 * c1);
                P_[j] *= H_[j] * H_[j];
            }
            t_ = (k + 1 == n) ? t_to : t_start + static_cast<double>(k + 1) * h;
            if (every > 0 && ((k + 1) % every == 0 || k + 1 == n))
                observe(*this);
        }
    }

    double t() const { return t_; }
    cplx c_d() const { return bd_ * std::polar(1.0, -drive_phase(m_.params, t_)); }
    double norm() const
    {
        double s = std::norm(bd_);
        for (const auto& x : b_)
            s += std::norm(x);
        return s;
    }
    std::vector<cplx> photons() const
    {
        std::vector<cplx> c(b_.size());
        for (std::size_t j = 0; j < c.size(); ++j)
            c[j] = b_[j] * std::polar(1.0, -m_.omega[j] * t_);
        return c;
    }
    OracleState state() const { return {t_, c_d(), photons()}; }

private:
    const OracleModel& m_;
    double t_;
    cplx bd_;
    std::vector<cplx> b_;
    std::vector<cplx> P_; // e^{-i w_j t}
    std::vector<cplx> H_; // e^{-i w_j h / 2}
};

} // namespace

std::size_t default_oracle_modes(double cutoff)
{
    return static_cast<std::size_t>(std::ceil(cutoff / 0.025));
}

OracleModel discretize(const SystemParams& p, double cutoff, std::size_t n_modes)
{
    validate(p);
    if (!(cutoff > 0.0))
        throw DomainError(fmt::format("Λ > 0 required (got {})", cutoff));
    if (n_modes == 0)
        throw ResolutionError("N_k >= 1 required");

    OracleModel m;
    m.params = p;
    m.cutoff = cutoff;
    m.n_modes = n_modes;
    m.d_omega = cutoff / static_cast<double>(n_modes);

    if (m.d_omega > p.omega / 20.0)
        throw ResolutionError(fmt::format("Δω < ω/20 violated: Δω = {} > {} (raise N_k)", m.d_omega, p.omega / 20.0));
    const double gamma_est = 2.0 * std::numbers::pi * p.lambda * p.lambda * p.delta0;
    if (p.lambda > 0.0 && m.d_omega > gamma_est / 10.0)
        throw ResolutionError(fmt::format("Δω < Γ/10 violated: Δω = {} > {} (raise N_k)", m.d_omega, gamma_est / 10.0));

    m.omega.resize(n_modes);
    m.g.resize(n_modes);
    for (std::size_t j = 0; j < n_modes; ++j) {
        m.omega[j] = (static_cast<double>(j) + 0.5) * m.d_omega;
        m.g[j] = p.lambda * std::sqrt(m.omega[j] * m.d_omega);
    }
    return m;
}

OracleState initial_state(const OracleModel& model)
{
    return {0.0, 1.0, std::vector<cplx>(model.n_modes, 0.0)};
}

OracleState propagate(const OracleModel& model, OracleState state, double t_end, double dt)
{
    if (!(dt != 0.0) || !std::isfinite(dt))
        throw DomainError("propagate: dt must be nonzero");
    if (state.c.size() != model.n_modes)
        throw DomainError("propagate: state does not match the model grid");
    Stepper s(model, state);
    s.segment(t_end, dt, 0, [](const Stepper&) {});
    return s.state();
}

OracleTrajectory integrate(const OracleModel& model, const IntegrateOptions& o)
{
    if (!(o.t_end > 0.0) || !(o.dt > 0.0))
        throw DomainError("integrate: t_end > 0 and dt > 0 required");
    const double recurrence = std::numbers::pi / model.d_omega;
    if (!(o.t_end < recurrence))
        throw ResolutionError(fmt::format("t_end < 0.5·2π/Δω violated: t_end = {} >= {}", o.t_end, recurrence));

    std::vector<double> marks;
    for (double ts : o.snapshot_times) {
        if (!(ts >= 0.0) || ts > o.t_end)
            throw DomainError(fmt::format("snapshot time {} outside [0, t_end]", ts));
        marks.push_back(ts);
    }
    std::sort(marks.begin(), marks.end());
    marks.erase(std::unique(marks.begin(), marks.end()), marks.end());

    OracleTrajectory tr;
    tr.params = model.params;
    tr.cutoff = model.cutoff;
    tr.d_omega = model.d_omega;
    tr.omega = model.omega;

    Stepper s(model, initial_state(model));
    auto record = [&](const Stepper& st) {
        tr.times.push_back(st.t());
        tr.c_d.push_back(st.c_d());
        const double nrm = st.norm();
        tr.norm.push_back(nrm);
        tr.max_norm_error = std::max(tr.max_norm_error, std::abs(nrm - 1.0));
    };
    record(s);
    for (double ts : marks) {
        s.segment(ts, o.dt, o.save_every, record);
        tr.snapshot_times.push_back(ts);
        tr.snapshots.push_back(s.photons());
    }
    s.segment(o.t_end, o.dt, o.save_every, record);

    if (o.certify) {
        const OracleState fine = propagate(model, initial_state(model), o.t_end, o.dt / 2.0);
        tr.step_doubling_delta = std::abs(fine.c_d - s.c_d());
        if (!(tr.step_doubling_delta < o.certify_tolerance))
            throw CertificationError(fmt::format("step-doubling check failed: |Δc_d| = {:.3g} at t = {} (tolerance {:.1g}, dt = {})",
                                                 tr.step_doubling_delta, o.t_end, o.certify_tolerance, o.dt));
        if (!(tr.max_norm_error < o.certify_tolerance))
            throw CertificationError(fmt::format("norm drift {:.3g} exceeds {:.1g}", tr.max_norm_error, o.certify_tolerance));
    }
    return tr;
}

SpectrumFrame oracle_spectrum(const OracleTrajectory& tr, std::size_t idx)
{
    if (idx >= tr.snapshots.size())
        throw DomainError(fmt::format("oracle_spectrum: snapshot {} not stored ({} available)", idx, tr.snapshots.size()));
    SpectrumFrame f;
    f.t = tr.snapshot_times[idx];
    f.omega_k = tr.omega;
    f.S.resize(tr.omega.size());
    for (std::size_t j = 0; j < f.S.size(); ++j)
        f.S[j] = std::norm(tr.snapshots[idx][j]) / tr.d_omega;
    f.S_oracle = f.S;
    f.params = tr.params;
    f.continuum.cutoff = tr.cutoff;
    return f;
}

namespace {

double fit_slope(const std::vector<double>& t, const std::vector<double>& y, double lo, double hi,
                 double omega, int harmonics, std::size_t& used)
{
    std::vector<std::size_t> sel;
    for (std::size_t i = 0; i < t.size(); ++i)
        if (t[i] >= lo && t[i] <= hi)
            sel.push_back(i);
    const auto cols = static_cast<Eigen::Index>(2 + 2 * harmonics);
    if (static_cast<Eigen::Index>(sel.size()) < cols + 2)
        throw FitError(fmt::format("fit_decay: only {} samples in window [{}, {}]", sel.size(), lo, hi));
    const double mid = 0.5 * (lo + hi);
    Eigen::MatrixXd X(static_cast<Eigen::Index>(sel.size()), cols);
    Eigen::VectorXd b(static_cast<Eigen::Index>(sel.size()));
    for (Eigen::Index r = 0; r < X.rows(); ++r) {
        const double ti = t[sel[static_cast<std::size_t>(r)]];
        X(r, 0) = 1.0;
        X(r, 1) = ti - mid;
        for (int k = 1; k <= harmonics; ++k) {
            X(r, 2 * k) = std::cos(k * omega * ti);
            X(r, 2 * k + 1) = std::sin(k * omega * ti);
        }
        b(r) = y[sel[static_cast<std::size_t>(r)]];
    }
    used = sel.size();
    const Eigen::VectorXd beta = X.colPivHouseholderQr().solve(b);
    return beta(1);
}

} // namespace

DecayFit fit_decay(const std::vector<double>& times, const std::vector<cplx>& c_d, double omega, int harmonics)
{
    if (times.size() != c_d.size() || times.size() < 3)
        throw FitError("fit_decay: need matching time and amplitude series with >= 3 samples");
    if (harmonics < 0)
        throw FitError("fit_decay: harmonics must be >= 0");

    std::vector<double> t, y;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double p = std::norm(c_d[i]);
        if (p > 0.0 && std::isfinite(p)) {
            t.push_back(times[i]);
            y.push_back(std::log(p));
        }
    }
    if (t.size() < 3)
        throw FitError("fit_decay: fewer than 3 usable samples");
    const double t_max = t.back();

    DecayFit fit;
    fit.harmonics = harmonics;
    std::size_t used = 0;
    const double global = -fit_slope(t, y, t.front(), t_max, omega, 0, used);
    if (global * (t_max - t.front()) < 1e-6) {
        fit.rejected = true;
        fit.points = used;
        return fit;
    }

    double g = global;
    for (std::size_t i = 0; i < t.size(); ++i)
        if (y[i] < -1.0) {
            g = 1.0 / t[i];
            break;
        }

    for (int it = 0; it < 50; ++it) {
        const double lo = 0.5 / g;
        const double hi = 3.0 / g;
        if (hi > t_max * (1.0 + 1e-9))
            throw FitError(fmt::format("fit_decay: window too short (need t up to 3/Γ = {:.4g}, trajectory ends at {:.4g})", hi, t_max));
        const double next = -fit_slope(t, y, lo, hi, omega, harmonics, used);
        fit.window_lo = lo;
        fit.window_hi = hi;
        fit.points = used;
        if (!(next > 0.0))
            throw FitError("fit_decay: non-decaying slope inside the fit window");
        const bool done = std::abs(next - g) <= 1e-12 * next;
        g = next;
        if (done)
            break;
    }
    fit.gamma = g;
    return fit;
}

DecayFit fit_decay(const OracleTrajectory& tr)
{
    return fit_decay(tr.times, tr.c_d, tr.params.omega, tr.params.a > 0.0 ? 3 : 0);
}

} // namespace floqhhg
