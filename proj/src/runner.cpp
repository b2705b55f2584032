#include "floqhhg/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "floqhhg/amplitudes.hpp"
#include "floqhhg/errors.hpp"
#include "floqhhg/oracle.hpp"

namespace floqhhg {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

void write_file(const fs::path& path, const std::string& text, RunResult& result)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
    out << text;
    out.close();
    if (!out)
        throw IoError(fmt::format("failed writing '{}'", path.string()));
    result.files.push_back(path.string());
}

std::string num(double x)
{
    return fmt::format("{:.17g}", x);
}

// Linear interpolation of (xs, ys) at x; xs ascending. Zero outside the range.
double interpolate(const std::vector<double>& xs, const std::vector<double>& ys, double x)
{
    if (xs.empty() || x < xs.front() || x > xs.back())
        return 0.0;
    const auto it = std::lower_bound(xs.begin(), xs.end(), x);
    const auto i = static_cast<std::size_t>(it - xs.begin());
    if (i == 0)
        return ys.front();
    const double u = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
    return (1.0 - u) * ys[i - 1] + u * ys[i];
}

AmplitudeOptions options_of(const RunSpec& s)
{
    AmplitudeOptions o;
    o.branch_term = s.branch_term;
    o.residue_normalization = s.residue_normalization;
    return o;
}

json frame_summary(const SpectrumFrame& f, const std::string& file)
{
    std::size_t arg = 0;
    for (std::size_t i = 1; i < f.S.size(); ++i)
        if (f.S[i] > f.S[arg])
            arg = i;
    json j;
    j["file"] = file;
    j["stationary"] = f.stationary;
    j["t"] = f.stationary ? json(nullptr) : json(f.t);
    j["omega_t"] = f.stationary ? json(nullptr) : json(f.omega_t());
    j["S_max"] = f.S.empty() ? 0.0 : f.S[arg];
    j["argmax_omega_k"] = f.S.empty() ? 0.0 : f.omega_k[arg];
    if (!f.stationary)
        j["E_e"] = f.params.excited_energy(f.t);
    return j;
}

double max_plateau_relative(const std::vector<double>& grid, const std::vector<double>& ref,
                            const std::vector<double>& test, const SystemParams& p)
{
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!on_plateau(grid[i], p) || ref[i] <= 0.0)
            continue;
        worst = std::max(worst, std::abs(test[i] - ref[i]) / ref[i]);
    }
    return worst;
}

} // namespace

bool on_plateau(double omega_k, const SystemParams& p)
{
    return std::abs(omega_k - p.delta0) <= p.a * p.omega;
}

std::string frame_csv(const SpectrumFrame& f, const RunSpec& spec, const std::vector<std::string>& notes)
{
    std::string out;
    out += "# floqhhg spectrum frame\n";
    out += fmt::format("# run_spec: {}\n", run_spec_json(spec));
    if (f.stationary) {
        out += "# t: inf\n# omega_t: inf\n";
    } else {
        out += fmt::format("# t: {}\n# omega_t: {}\n", num(f.t), num(f.omega_t()));
        out += fmt::format("# E_e: {}\n", num(f.params.excited_energy(f.t)));
    }
    out += fmt::format("# truncation: {}\n", f.truncation);
    for (const auto& n : notes)
        out += fmt::format("# warning: {}\n", n);

    const bool oracle = !f.S_oracle.empty();
    out += oracle ? "omega_k,S,S_R,S_C,S_cross,S_oracle\n" : "omega_k,S,S_R,S_C,S_cross\n";
    for (std::size_t i = 0; i < f.size(); ++i) {
        out += fmt::format("{},{},{},{},{}", num(f.omega_k[i]), num(f.S[i]), num(f.S_R[i]), num(f.S_C[i]), num(f.S_cross[i]));
        if (oracle)
            out += "," + num(f.S_oracle[i]);
        out += '\n';
    }
    return out;
}

RunResult run_scenario(const RunSpec& spec)
{
    validate(spec);
    const auto t_total = Clock::now();
    RunResult result;
    json timing;

    std::error_code ec;
    fs::create_directories(spec.output_dir, ec);
    if (ec)
        throw IoError(fmt::format("cannot create output directory '{}': {}", spec.output_dir, ec.message()));
    const fs::path dir(spec.output_dir);

    auto t0 = Clock::now();
    const SpectralSetup setup = make_setup(spec.params, spec.continuum, spec.truncation, spec.pole_method);
    const AmplitudeOptions options = options_of(spec);
    const std::vector<double> grid = jittered_grid(spec.grid.min, spec.grid.max, spec.grid.count);
    const SpectrumEvaluator eval(grid, setup);
    timing["setup"] = seconds_since(t0);

    if (auto adv = weak_coupling_advisory(spec.params))
        result.warnings.push_back(*adv);
    if (spec.oracle.enabled && spec.continuum.lamb_shift == LambShift::imaginary_only)
        result.warnings.push_back("oracle columns come from the full Hamiltonian, which carries the cutoff Lamb shift; the analytic columns use lamb_shift = imaginary_only");

    std::vector<SpectrumFrame> frames;
    std::vector<std::string> names;
    std::vector<std::vector<std::string>> notes;

    t0 = Clock::now();
    if (spec.stationary) {
        frames.push_back(eval.stationary());
        names.emplace_back("frame_inf.csv");
        notes.emplace_back();
    }
    for (std::size_t i = 0; i < spec.times.size(); ++i) {
        frames.push_back(eval.at(spec.times[i], options));
        names.push_back(fmt::format("frame_{:03d}.csv", i));
        notes.emplace_back();
        if (spec.times[i] == 0.0 && !spec.branch_term) {
            const std::string w = "t = 0 with the branch term disabled: the residual S(omega_k, 0) ~ |s_BR|^2 is a method artifact";
            notes.back().push_back(w);
            result.warnings.push_back(w);
        }
    }
    timing["frames"] = seconds_since(t0);

    json oracle_info = nullptr;
    const double t_last = spec.times.empty() ? 0.0 : *std::max_element(spec.times.begin(), spec.times.end());
    if (spec.oracle.enabled) {
        if (t_last <= 0.0) {
            result.warnings.push_back("oracle requested but no frame time > 0; oracle skipped");
        } else {
            t0 = Clock::now();
            const OracleModel model = discretize(spec.params, spec.continuum.cutoff, spec.oracle.modes);
            IntegrateOptions io;
            io.t_end = t_last;
            io.dt = spec.oracle.dt;
            io.snapshot_times = spec.times;
            io.certify = spec.oracle.certify;
            const OracleTrajectory tr = integrate(model, io);
            for (auto& f : frames) {
                if (f.stationary)
                    continue;
                const auto it = std::find(tr.snapshot_times.begin(), tr.snapshot_times.end(), f.t);
                const auto idx = static_cast<std::size_t>(it - tr.snapshot_times.begin());
                const SpectrumFrame of = oracle_spectrum(tr, idx);
                f.S_oracle.resize(f.size());
                for (std::size_t i = 0; i < f.size(); ++i)
                    f.S_oracle[i] = interpolate(of.omega_k, of.S, f.omega_k[i]);
            }
            oracle_info = {{"modes", model.n_modes}, {"d_omega", model.d_omega}, {"dt", io.dt},
                           {"t_end", io.t_end}, {"max_norm_error", tr.max_norm_error},
                           {"step_doubling_delta", tr.step_doubling_delta}, {"certified", io.certify}};
            timing["oracle"] = seconds_since(t0);
        }
    }

    json frame_list = json::array();
    for (std::size_t i = 0; i < frames.size(); ++i) {
        write_file(dir / names[i], frame_csv(frames[i], spec, notes[i]), result);
        frame_list.push_back(frame_summary(frames[i], names[i]));
    }

    json contour_info = nullptr;
    if (spec.contour.enabled) {
        t0 = Clock::now();
        std::string text = "# floqhhg contour\n";
        text += fmt::format("# run_spec: {}\n", run_spec_json(spec));
        text += "t,omega_t,omega_k,S,E_e\n";
        const auto n = spec.contour.count;
        for (std::size_t k = 0; k < n; ++k) {
            const double phase = spec.contour.phase_min
                                 + (spec.contour.phase_max - spec.contour.phase_min) * static_cast<double>(k) / static_cast<double>(n - 1);
            const double t = phase / spec.params.omega;
            const SpectrumFrame f = eval.at(t, options);
            const double Ee = spec.params.excited_energy(t);
            for (std::size_t i = 0; i < f.size(); ++i)
                text += fmt::format("{},{},{},{},{}\n", num(t), num(phase), num(f.omega_k[i]), num(f.S[i]), num(Ee));
        }
        write_file(dir / "contour.csv", text, result);
        contour_info = {{"file", "contour.csv"}, {"frames", n}, {"phase_min", spec.contour.phase_min},
                        {"phase_max", spec.contour.phase_max}};
        timing["contour"] = seconds_since(t0);
    }

    json poles = json::array();
    for (const auto& p : setup.ladder.poles())
        poles.push_back({{"n", p.n}, {"re_z", p.z.real()}, {"im_z", p.z.imag()}, {"gamma", p.gamma}});

    json summary;
    summary["run_spec"] = json::parse(run_spec_json(spec));
    summary["truncation"] = setup.truncation();
    summary["pole_method"] = to_string(spec.pole_method);
    summary["gamma"] = setup.ladder.base.gamma;
    summary["residue"] = {{"re", setup.ladder.residue.real()}, {"im", setup.ladder.residue.imag()}};
    summary["poles"] = poles;
    summary["frames"] = frame_list;
    summary["contour"] = contour_info;
    summary["oracle"] = oracle_info;
    summary["warnings"] = result.warnings;
    summary["certificates"] = {{"oracle_step_doubling", oracle_info.is_null() ? json(nullptr) : oracle_info["step_doubling_delta"]},
                               {"oracle_norm", oracle_info.is_null() ? json(nullptr) : oracle_info["max_norm_error"]}};
    result.summary_json = summary.dump(2) + "\n";
    write_file(dir / "summary.json", result.summary_json, result);

    timing["total"] = seconds_since(t_total);
    json tj;
    tj["run_spec"] = json::parse(run_spec_json(spec));
    tj["wall_seconds"] = timing;
    write_file(dir / "timing.json", tj.dump(2) + "\n", result);
    return result;
}

bool ConvergenceReport::all_passed() const
{
    return std::all_of(checks.begin(), checks.end(), [](const ConvergenceCheck& c) { return c.passed || !c.evaluated; });
}

ConvergenceReport convergence_report(const RunSpec& spec)
{
    ConvergenceReport rep;
    rep.trivial = spec.params.lambda == 0.0;
    const auto grid = jittered_grid(spec.grid.min, spec.grid.max, spec.grid.count);

    {
        ConvergenceCheck c;
        c.name = "truncation_doubling";
        c.threshold = 1e-6;
        try {
            const auto base = make_setup(spec.params, spec.continuum, spec.truncation, spec.pole_method);
            const auto twice = make_setup(spec.params, spec.continuum, 2 * spec.truncation, spec.pole_method);
            const auto s1 = stationary_spectrum(grid, base);
            const auto s2 = stationary_spectrum(grid, twice);
            c.measured = max_plateau_relative(grid, s1.S, s2.S, spec.params);
            c.passed = c.measured < c.threshold;
            c.detail = fmt::format("max plateau relative change of S_inf, M = {} -> {}", spec.truncation, 2 * spec.truncation);
        } catch (const Error& e) {
            c.passed = false;
            c.detail = e.what();
        }
        rep.checks.push_back(c);
    }

    const double t_cmp = 2.0 * std::numbers::pi / spec.params.omega;
    ConvergenceCheck grid_check;
    grid_check.name = "oracle_mode_doubling";
    grid_check.threshold = 0.01;
    ConvergenceCheck oracle_check;
    oracle_check.name = "oracle_comparison_2pi";
    oracle_check.threshold = 0.05;
    try {
        IntegrateOptions io;
        io.t_end = t_cmp;
        io.dt = spec.oracle.dt;
        io.snapshot_times = {t_cmp};
        io.certify = spec.oracle.certify;
        const OracleModel m1 = discretize(spec.params, spec.continuum.cutoff, spec.oracle.modes);
        const OracleTrajectory tr1 = integrate(m1, io);
        io.certify = false;
        const OracleModel m2 = discretize(spec.params, spec.continuum.cutoff, 2 * spec.oracle.modes);
        const OracleTrajectory tr2 = integrate(m2, io);
        const SpectrumFrame o1 = oracle_spectrum(tr1, 0);
        const SpectrumFrame o2 = oracle_spectrum(tr2, 0);

        std::vector<double> fine(o1.size());
        for (std::size_t i = 0; i < fine.size(); ++i)
            fine[i] = interpolate(o2.omega_k, o2.S, o1.omega_k[i]);
        grid_check.measured = max_plateau_relative(o1.omega_k, o1.S, fine, spec.params);
        grid_check.passed = rep.trivial || grid_check.measured < grid_check.threshold;
        grid_check.detail = fmt::format("max plateau relative change of the oracle spectrum at omega t = 2 pi, N_k = {} -> {}",
                                        m1.n_modes, m2.n_modes);

        ContinuumSpec full = spec.continuum;
        full.lamb_shift = LambShift::full;
        const auto setup = make_setup(spec.params, full, spec.truncation, spec.pole_method);
        std::vector<double> pgrid;
        std::vector<double> pref;
        for (std::size_t i = 0; i < o1.size(); ++i)
            if (on_plateau(o1.omega_k[i], spec.params)) {
                pgrid.push_back(o1.omega_k[i]);
                pref.push_back(o1.S[i]);
            }
        const auto analytic = temporal_spectrum(pgrid, t_cmp, setup, options_of(spec));
        oracle_check.measured = max_plateau_relative(pgrid, pref, analytic.S, spec.params);
        oracle_check.passed = rep.trivial || oracle_check.measured < oracle_check.threshold;
        oracle_check.detail = "max plateau relative error of analytic S vs oracle |c_j|^2/d_omega at omega t = 2 pi (lamb_shift = full)";
    } catch (const Error& e) {
        grid_check.passed = oracle_check.passed = false;
        grid_check.detail = oracle_check.detail = e.what();
    }
    rep.checks.push_back(grid_check);
    rep.checks.push_back(oracle_check);
    return rep;
}

std::string convergence_json(const RunSpec& spec, const ConvergenceReport& rep)
{
    json j;
    j["run_spec"] = json::parse(run_spec_json(spec));
    j["trivial"] = rep.trivial;
    j["all_passed"] = rep.all_passed();
    json checks = json::array();
    for (const auto& c : rep.checks)
        checks.push_back({{"name", c.name}, {"passed", c.passed}, {"evaluated", c.evaluated}, {"measured", c.measured},
                          {"threshold", c.threshold}, {"detail", c.detail}});
    j["checks"] = checks;
    return j.dump(2) + "\n";
}

} // namespace floqhhg
