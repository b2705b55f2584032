#pragma once

#include <string>
#include <vector>

#include "floqhhg/config.hpp"
#include "floqhhg/spectrum.hpp"

namespace floqhhg {

struct RunResult {
    std::vector<std::string> files; // written paths, in creation order
    std::vector<std::string> warnings;
    std::string summary_json;
};

/// Writes the CSV frames, contour data, summary.json and timing.json for one
/// RunSpec into spec.output_dir. Throws IoError when files cannot be written.
RunResult run_scenario(const RunSpec& spec);

struct ConvergenceCheck {
    std::string name;
    bool passed = false;
    bool evaluated = true;
    double measured = 0.0;
    double threshold = 0.0;
    std::string detail;
};

struct ConvergenceReport {
    bool trivial = false; // lambda = 0: every spectrum is identically zero
    std::vector<ConvergenceCheck> checks;
    bool all_passed() const;
};

/// M-doubling of S_inf, oracle N_k doubling and oracle-vs-analytic at
/// omega t = 2 pi. Failures are recorded, never thrown.
ConvergenceReport convergence_report(const RunSpec& spec);
std::string convergence_json(const RunSpec& spec, const ConvergenceReport& report);

/// CSV text of one frame: '#' metadata lines followed by
/// omega_k,S,S_R,S_C,S_cross[,S_oracle].
std::string frame_csv(const SpectrumFrame& frame, const RunSpec& spec, const std::vector<std::string>& notes = {});

/// Plateau mask |omega_k - delta0| <= a omega.
bool on_plateau(double omega_k, const SystemParams& p);

} // namespace floqhhg
