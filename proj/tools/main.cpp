#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "floqhhg/config.hpp"
#include "floqhhg/errors.hpp"
#include "floqhhg/runner.hpp"

namespace {

enum Exit { ok = 0, config_error = 2, numerical_error = 3, io_error = 4 };

}

int main(int argc, char** argv)
{
    CLI::App app{"Floquet complex-spectral HHG simulator"};
    std::string config_path;
    std::string scenario;
    std::string out_dir;
    std::vector<std::string> overrides;
    bool oracle = false;
    bool branch = false;
    bool convergence = false;

    app.add_option("--config", config_path, "YAML run configuration");
    app.add_option("--scenario", scenario, "preset: fig2a, fig2b, fig3, fig4");
    app.add_option("--out", out_dir, "output directory (overrides output.dir)");
    app.add_option("--override", overrides, "KEY=VALUE with a dotted key, repeatable")->take_all();
    app.add_flag("--oracle", oracle, "run the time-domain oracle and add S_oracle columns");
    app.add_flag("--branch-term", branch, "include the branch-cut term s_BR");
    app.add_flag("--convergence", convergence, "write convergence.json with truncation and oracle checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? ok : config_error;
    }

    try {
        if (config_path.empty() && scenario.empty())
            throw floqhhg::ConfigError("one of --config or --scenario is required");
        if (!scenario.empty())
            overrides.insert(overrides.begin(), "scenario=" + scenario);
        if (oracle)
            overrides.emplace_back("oracle.enabled=true");
        if (branch) {
            overrides.emplace_back("method.branch_term=true");
            overrides.emplace_back("continuum.lamb_shift=full");
        }
        if (!out_dir.empty())
            overrides.push_back("output.dir=" + out_dir);

        const floqhhg::RunSpec spec = config_path.empty() ? floqhhg::parse_config_text("{}", overrides)
                                                          : floqhhg::parse_config(config_path, overrides);
        const auto result = floqhhg::run_scenario(spec);
        for (const auto& w : result.warnings)
            std::cerr << "warning: " << w << '\n';
        for (const auto& f : result.files)
            std::cout << f << '\n';

        if (convergence) {
            const auto report = floqhhg::convergence_report(spec);
            const auto path = std::filesystem::path(spec.output_dir) / "convergence.json";
            std::ofstream out(path, std::ios::binary | std::ios::trunc);
            out << floqhhg::convergence_json(spec, report);
            if (!out)
                throw floqhhg::IoError("failed writing " + path.string());
            std::cout << path.string() << '\n';
            for (const auto& c : report.checks)
                std::cerr << (c.passed ? "PASS " : "FAIL ") << c.name << " measured=" << c.measured
                          << " threshold=" << c.threshold << '\n';
        }
        return ok;
    } catch (const floqhhg::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return config_error;
    } catch (const floqhhg::ResolutionError& e) {
        std::cerr << "resolution error: " << e.what() << '\n';
        return config_error;
    } catch (const floqhhg::DomainError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return config_error;
    } catch (const floqhhg::IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return io_error;
    } catch (const floqhhg::Error& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return numerical_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return numerical_error;
    }
}
