#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "floqhhg/continuum.hpp"
#include "floqhhg/params.hpp"
#include "floqhhg/poles.hpp"

namespace floqhhg {

inline constexpr int kSchemaVersion = 1;

struct GridSpec {
    double min = 0.0;
    double max = 40.0;
    std::size_t count = 800;
};

struct ContourSpec {
    bool enabled = false;
    double phase_min = 0.0; // omega t
    double phase_max = 0.0;
    std::size_t count = 0;
};

struct OracleSpec {
    bool enabled = false;
    std::size_t modes = 0; // 0: default_oracle_modes(cutoff)
    double dt = 2e-4;
    bool certify = true;
};

struct RunSpec {
    int schema_version = kSchemaVersion;
    std::string scenario; // empty for a custom run
    SystemParams params;
    ContinuumSpec continuum;
    int truncation = 0;
    GridSpec grid;
    bool stationary = true;
    std::vector<double> times;             // absolute
    std::vector<std::string> time_labels;  // as written, e.g. "pi/4" for a phase
    ContourSpec contour;
    PoleMethod pole_method = PoleMethod::perturbative;
    bool branch_term = false;
    bool residue_normalization = false;
    OracleSpec oracle;
    std::string output_dir = "out";
};

/// "pi/4", "3pi/2", "2*pi", "-pi", "0.785" ... -> radians. Throws ConfigError.
double parse_phase(const std::string& text);

/// Reads a YAML config; KEY=VALUE overrides use dotted paths ("system.lambda=0").
RunSpec parse_config(const std::string& path, const std::vector<std::string>& overrides = {});
RunSpec parse_config_text(const std::string& text, const std::vector<std::string>& overrides = {});
/// Preset plus overrides, as if the config held only `scenario: name`.
RunSpec scenario_spec(const std::string& name, const std::vector<std::string>& overrides = {});
std::vector<std::string> scenario_names();

/// Re-checks every invariant of an already built RunSpec. Throws ConfigError.
void validate(const RunSpec& spec);

/// Canonical JSON of the full RunSpec (sorted keys).
std::string run_spec_json(const RunSpec& spec, int indent = -1);

const char* to_string(LambShift v);
const char* to_string(PoleMethod v);

} // namespace floqhhg
