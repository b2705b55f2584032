#include "floqhhg/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>
#include <regex>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <yaml-cpp/yaml.h>

#include "floqhhg/bessel.hpp"
#include "floqhhg/errors.hpp"
#include "floqhhg/oracle.hpp"

namespace floqhhg {

namespace {

constexpr double pi = std::numbers::pi;

int line_of(const YAML::Node& n)
{
    const auto m = n.Mark();
    return m.line >= 0 ? m.line + 1 : 0;
}

std::string scalar(const YAML::Node& n, const std::string& key)
{
    if (!n.IsScalar())
        throw ConfigError(fmt::format("{}: expected a scalar value", key), line_of(n));
    return n.Scalar();
}

double as_double(const YAML::Node& n, const std::string& key)
{
    const std::string s = scalar(n, key);
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size())
            return v;
    } catch (const std::exception&) {
    }
    throw ConfigError(fmt::format("{}: '{}' is not a number", key, s), line_of(n));
}

double as_phase(const YAML::Node& n, const std::string& key)
{
    const std::string s = scalar(n, key);
    try {
        return parse_phase(s);
    } catch (const ConfigError& e) {
        throw ConfigError(fmt::format("{}: {}", key, e.what()), line_of(n));
    }
}

long as_integer(const YAML::Node& n, const std::string& key)
{
    const double v = as_double(n, key);
    if (v != std::floor(v) || std::abs(v) > 1e15)
        throw ConfigError(fmt::format("{}: '{}' is not an integer", key, n.Scalar()), line_of(n));
    return static_cast<long>(v);
}

bool as_bool(const YAML::Node& n, const std::string& key)
{
    const std::string s = scalar(n, key);
    if (s == "true" || s == "True" || s == "yes" || s == "on" || s == "1")
        return true;
    if (s == "false" || s == "False" || s == "no" || s == "off" || s == "0")
        return false;
    throw ConfigError(fmt::format("{}: '{}' is not a boolean", key, s), line_of(n));
}

void check_keys(const YAML::Node& map, const std::string& section, const std::set<std::string>& allowed)
{
    if (!map.IsMap())
        throw ConfigError(fmt::format("{}: expected a mapping", section.empty() ? "document" : section), line_of(map));
    for (const auto& kv : map) {
        const std::string k = kv.first.as<std::string>();
        if (!allowed.count(k)) {
            const std::string full = section.empty() ? k : section + "." + k;
            throw ConfigError(fmt::format("unknown key '{}'", full), line_of(kv.first));
        }
    }
}

struct Defaults {
    bool cutoff = false;
    bool truncation = false;
    bool grid_min = false, grid_max = false, grid_count = false;
};

RunSpec preset(const std::string& name)
{
    RunSpec s;
    s.scenario = name;
    s.params = SystemParams{20.0, 1.0, 10.0, 0.06, 0.0};
    s.continuum.lamb_shift = LambShift::imaginary_only;
    if (name == "fig2a") {
        s.stationary = true;
    } else if (name == "fig2b") {
        s.params.theta = pi / 2.0;
        s.stationary = true;
    } else if (name == "fig3") {
        s.stationary = false;
        for (const char* lab : {"pi/4", "pi/2", "pi", "2pi"}) {
            s.time_labels.emplace_back(lab);
            s.times.push_back(parse_phase(lab) / s.params.omega);
        }
    } else if (name == "fig4") {
        s.params.theta = pi / 2.0;
        s.stationary = true;
        s.contour = {true, 0.0, 4.0 * pi, 97};
    } else {
        throw ConfigError(fmt::format("unknown scenario '{}' (known: fig2a, fig2b, fig3, fig4)", name));
    }
    return s;
}

void apply_override(YAML::Node& root, const std::string& item)
{
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError(fmt::format("override '{}' must have the form KEY=VALUE", item));
    const std::string path = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);

    std::vector<std::string> parts;
    std::stringstream ss(path);
    for (std::string p; std::getline(ss, p, '.');) {
        if (p.empty())
            throw ConfigError(fmt::format("override '{}': empty path component", item));
        parts.push_back(p);
    }
    YAML::Node parsed;
    try {
        parsed = YAML::Load(value);
    } catch (const YAML::Exception&) {
        parsed = YAML::Node(value);
    }
    if (parsed.IsNull())
        parsed = YAML::Node(value);

    std::vector<YAML::Node> chain{root};
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        YAML::Node next = chain.back()[parts[i]];
        if (!next.IsDefined() || next.IsNull())
            chain.back()[parts[i]] = YAML::Node(YAML::NodeType::Map);
        else if (!next.IsMap())
            throw ConfigError(fmt::format("override '{}': '{}' is not a section", item, parts[i]));
        chain.push_back(chain.back()[parts[i]]);
    }
    chain.back()[parts.back()] = parsed;
}

RunSpec build(YAML::Node root, const std::vector<std::string>& overrides)
{
    if (!root.IsDefined() || root.IsNull())
        root = YAML::Node(YAML::NodeType::Map);
    if (!root.IsMap())
        throw ConfigError("config document must be a mapping", line_of(root));
    for (const auto& o : overrides)
        apply_override(root, o);

    check_keys(root, "", {"schema_version", "scenario", "system", "continuum", "truncation", "grid", "times",
                          "contour", "method", "oracle", "output"});

    if (root["schema_version"]) {
        const long v = as_integer(root["schema_version"], "schema_version");
        if (v != kSchemaVersion)
            throw ConfigError(fmt::format("schema_version {} not supported (expected {})", v, kSchemaVersion),
                              line_of(root["schema_version"]));
    }

    RunSpec s;
    if (root["scenario"]) {
        const std::string name = scalar(root["scenario"], "scenario");
        try {
            s = preset(name);
        } catch (const ConfigError& e) {
            throw ConfigError(e.what(), line_of(root["scenario"]));
        }
    }

    Defaults given;
    int system_line = 0;
    if (const auto sys = root["system"]) {
        check_keys(sys, "system", {"delta0", "omega", "a", "lambda", "theta"});
        system_line = line_of(sys);
        if (sys["delta0"]) s.params.delta0 = as_double(sys["delta0"], "system.delta0");
        if (sys["omega"]) s.params.omega = as_double(sys["omega"], "system.omega");
        if (sys["a"]) s.params.a = as_double(sys["a"], "system.a");
        if (sys["lambda"]) s.params.lambda = as_double(sys["lambda"], "system.lambda");
        if (sys["theta"]) s.params.theta = as_phase(sys["theta"], "system.theta");
    }
    try {
        floqhhg::validate(s.params);
    } catch (const DomainError& e) {
        throw ConfigError(e.what(), system_line);
    }

    if (const auto c = root["continuum"]) {
        check_keys(c, "continuum", {"cutoff", "lamb_shift"});
        if (c["cutoff"]) {
            s.continuum.cutoff = as_double(c["cutoff"], "continuum.cutoff");
            given.cutoff = true;
        }
        if (c["lamb_shift"]) {
            const std::string v = scalar(c["lamb_shift"], "continuum.lamb_shift");
            if (v == "full") s.continuum.lamb_shift = LambShift::full;
            else if (v == "imaginary_only") s.continuum.lamb_shift = LambShift::imaginary_only;
            else throw ConfigError(fmt::format("continuum.lamb_shift: '{}' is not one of full, imaginary_only", v), line_of(c["lamb_shift"]));
        }
    }
    if (!given.cutoff)
        s.continuum.cutoff = 10.0 * s.params.delta0;

    if (root["truncation"]) {
        s.truncation = static_cast<int>(as_integer(root["truncation"], "truncation"));
        given.truncation = true;
    } else {
        s.truncation = default_half_width(s.params.a);
    }

    const double w = s.params.omega;
    s.grid.min = std::max(0.0, s.params.delta0 - (s.params.a + 10.0) * w);
    s.grid.max = s.params.delta0 + (s.params.a + 10.0) * w;
    if (const auto g = root["grid"]) {
        check_keys(g, "grid", {"min", "max", "count"});
        if (g["min"]) { s.grid.min = as_double(g["min"], "grid.min"); given.grid_min = true; }
        if (g["max"]) { s.grid.max = as_double(g["max"], "grid.max"); given.grid_max = true; }
        if (g["count"]) {
            const long n = as_integer(g["count"], "grid.count");
            if (n < 2)
                throw ConfigError("grid.count >= 2 required", line_of(g["count"]));
            s.grid.count = static_cast<std::size_t>(n);
            given.grid_count = true;
        }
    }
    if (!given.grid_count && s.grid.max > s.grid.min)
        s.grid.count = static_cast<std::size_t>(std::llround((s.grid.max - s.grid.min) / (w / 20.0)));

    if (const auto t = root["times"]) {
        check_keys(t, "times", {"stationary", "phases", "absolute"});
        if (t["phases"] || t["absolute"]) {
            s.times.clear();
            s.time_labels.clear();
        }
        if (t["stationary"]) s.stationary = as_bool(t["stationary"], "times.stationary");
        for (const char* key : {"phases", "absolute"}) {
            const auto list = t[key];
            if (!list)
                continue;
            if (!list.IsSequence())
                throw ConfigError(fmt::format("times.{}: expected a list", key), line_of(list));
            for (const auto& item : list) {
                const bool phase = std::string(key) == "phases";
                const double v = phase ? as_phase(item, "times.phases") / w : as_double(item, "times.absolute");
                if (!(v >= 0.0))
                    throw ConfigError(fmt::format("times.{}: t >= 0 required", key), line_of(item));
                s.times.push_back(v);
                s.time_labels.push_back(phase ? "wt=" + item.Scalar() : "t=" + item.Scalar());
            }
        }
    }

    if (const auto c = root["contour"]) {
        check_keys(c, "contour", {"enabled", "phase_min", "phase_max", "count"});
        s.contour.enabled = true;
        if (c["enabled"]) s.contour.enabled = as_bool(c["enabled"], "contour.enabled");
        if (c["phase_min"]) s.contour.phase_min = as_phase(c["phase_min"], "contour.phase_min");
        if (c["phase_max"]) s.contour.phase_max = as_phase(c["phase_max"], "contour.phase_max");
        if (c["count"]) {
            const long n = as_integer(c["count"], "contour.count");
            if (n < 2)
                throw ConfigError("contour.count >= 2 required", line_of(c["count"]));
            s.contour.count = static_cast<std::size_t>(n);
        }
    }

    if (const auto m = root["method"]) {
        check_keys(m, "method", {"pole", "branch_term", "residue_normalization"});
        if (m["pole"]) {
            const std::string v = scalar(m["pole"], "method.pole");
            if (v == "perturbative") s.pole_method = PoleMethod::perturbative;
            else if (v == "self_consistent") s.pole_method = PoleMethod::self_consistent;
            else throw ConfigError(fmt::format("method.pole: '{}' is not one of perturbative, self_consistent", v), line_of(m["pole"]));
        }
        if (m["branch_term"]) s.branch_term = as_bool(m["branch_term"], "method.branch_term");
        if (m["residue_normalization"]) s.residue_normalization = as_bool(m["residue_normalization"], "method.residue_normalization");
    }

    if (const auto o = root["oracle"]) {
        check_keys(o, "oracle", {"enabled", "modes", "dt", "certify"});
        if (o["enabled"]) s.oracle.enabled = as_bool(o["enabled"], "oracle.enabled");
        if (o["modes"]) {
            const long n = as_integer(o["modes"], "oracle.modes");
            if (n < 1)
                throw ConfigError("oracle.modes >= 1 required", line_of(o["modes"]));
            s.oracle.modes = static_cast<std::size_t>(n);
        }
        if (o["dt"]) s.oracle.dt = as_double(o["dt"], "oracle.dt");
        if (o["certify"]) s.oracle.certify = as_bool(o["certify"], "oracle.certify");
    }
    if (s.oracle.modes == 0)
        s.oracle.modes = default_oracle_modes(s.continuum.cutoff);

    if (const auto o = root["output"]) {
        check_keys(o, "output", {"dir"});
        if (o["dir"]) s.output_dir = scalar(o["dir"], "output.dir");
    }

    floqhhg::validate(s);
    return s;
}

} // namespace

double parse_phase(const std::string& text)
{
    static const std::regex re(R"(^\s*([+-]?)\s*((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?\s*(\*?\s*pi)?\s*(?:/\s*((?:\d+\.?\d*|\.\d+)))?\s*$)");
    std::smatch m;
    if (!std::regex_match(text, m, re) || (!m[2].matched && !m[3].matched))
        throw ConfigError(fmt::format("'{}' is not a number or a multiple of pi", text));
    if (m[3].matched && m[3].str().front() == '*' && !m[2].matched)
        throw ConfigError(fmt::format("'{}' is not a number or a multiple of pi", text));
    double v = m[2].matched ? std::stod(m[2].str()) : 1.0;
    if (m[3].matched)
        v *= pi;
    if (m[4].matched) {
        const double d = std::stod(m[4].str());
        if (d == 0.0)
            throw ConfigError(fmt::format("'{}': division by zero", text));
        v /= d;
    }
    return m[1].str() == "-" ? -v : v;
}

void validate(const RunSpec& s)
{
    try {
        floqhhg::validate(s.params);
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    if (s.schema_version != kSchemaVersion)
        throw ConfigError(fmt::format("schema_version {} not supported", s.schema_version));
    const int needed = default_half_width(s.params.a);
    if (s.truncation < needed)
        throw ConfigError(fmt::format("truncation M >= ceil(a) + 20 = {} required (got {})", needed, s.truncation));
    try {
        validate_continuum(s.continuum, s.params, s.truncation);
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    if (!(s.grid.max > s.grid.min))
        throw ConfigError(fmt::format("grid.max > grid.min required (min = {}, max = {})", s.grid.min, s.grid.max));
    if (s.grid.count < 2)
        throw ConfigError("grid.count >= 2 required");
    for (double t : s.times)
        if (!(t >= 0.0) || !std::isfinite(t))
            throw ConfigError("frame times must be finite and >= 0");
    if (s.contour.enabled) {
        if (!(s.contour.phase_max > s.contour.phase_min) || s.contour.phase_min < 0.0)
            throw ConfigError("contour: 0 <= phase_min < phase_max required");
        if (s.contour.count < 2)
            throw ConfigError("contour.count >= 2 required");
    }
    if (s.branch_term && s.continuum.lamb_shift != LambShift::full)
        throw ConfigError("method.branch_term requires continuum.lamb_shift = full");
    if (!s.stationary && s.times.empty() && !s.contour.enabled)
        throw ConfigError("nothing to compute: no stationary frame, no times, no contour");
    if (s.oracle.enabled) {
        if (!(s.oracle.dt > 0.0))
            throw ConfigError("oracle.dt > 0 required");
        try {
            (void)discretize(s.params, s.continuum.cutoff, s.oracle.modes);
        } catch (const ResolutionError& e) {
            throw ConfigError(fmt::format("oracle: {}", e.what()));
        }
    }
    if (s.output_dir.empty())
        throw ConfigError("output.dir must not be empty");
}

RunSpec parse_config_text(const std::string& text, const std::vector<std::string>& overrides)
{
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError(e.msg, e.mark.line >= 0 ? e.mark.line + 1 : 0);
    }
    return build(root, overrides);
}

RunSpec parse_config(const std::string& path, const std::vector<std::string>& overrides)
{
    std::ifstream in(path);
    if (!in)
        throw IoError(fmt::format("cannot open config file '{}'", path));
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), overrides);
}

RunSpec scenario_spec(const std::string& name, const std::vector<std::string>& overrides)
{
    YAML::Node root(YAML::NodeType::Map);
    root["scenario"] = name;
    return build(root, overrides);
}

std::vector<std::string> scenario_names()
{
    return {"fig2a", "fig2b", "fig3", "fig4"};
}

const char* to_string(LambShift v)
{
    return v == LambShift::full ? "full" : "imaginary_only";
}

const char* to_string(PoleMethod v)
{
    return v == PoleMethod::perturbative ? "perturbative" : "self_consistent";
}

std::string run_spec_json(const RunSpec& s, int indent)
{
    nlohmann::json j;
    j["schema_version"] = s.schema_version;
    j["scenario"] = s.scenario;
    j["system"] = {{"delta0", s.params.delta0}, {"omega", s.params.omega}, {"a", s.params.a},
                   {"lambda", s.params.lambda}, {"theta", s.params.theta}};
    j["continuum"] = {{"cutoff", s.continuum.cutoff}, {"coupling_form", "sqrt_omega"},
                      {"lamb_shift", to_string(s.continuum.lamb_shift)}};
    j["truncation"] = s.truncation;
    j["grid"] = {{"min", s.grid.min}, {"max", s.grid.max}, {"count", s.grid.count}};
    j["times"] = {{"stationary", s.stationary}, {"absolute", s.times}, {"labels", s.time_labels}};
    j["contour"] = {{"enabled", s.contour.enabled}, {"phase_min", s.contour.phase_min},
                    {"phase_max", s.contour.phase_max}, {"count", s.contour.count}};
    j["method"] = {{"pole", to_string(s.pole_method)}, {"branch_term", s.branch_term},
                   {"residue_normalization", s.residue_normalization}};
    j["oracle"] = {{"enabled", s.oracle.enabled}, {"modes", s.oracle.modes}, {"dt", s.oracle.dt},
                   {"certify", s.oracle.certify}};
    j["output"] = {{"dir", s.output_dir}};
    return j.dump(indent);
}

} // namespace floqhhg
