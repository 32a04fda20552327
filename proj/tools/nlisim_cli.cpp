// nlisim: command-line front end for the nonlinear-interferometer simulator.
//
// Exit codes: 0 success, 1 verification failure, 2 config/argument error,
// 3 numeric failure.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "nlisim/nlisim.hpp"

namespace {

enum Exit : int { ok = 0, verify_failed = 1, bad_input = 2, numeric_failure = 3 };

struct SourceArgs {
    std::string preset;
    std::string config;
    std::size_t points = 0;
};

void add_source(CLI::App* cmd, SourceArgs& src) {
    cmd->add_option("--preset", src.preset, "Built-in configuration")->check(CLI::IsMember({"grid", "hde"}));
    cmd->add_option("--config", src.config, "Config file (JSON: pump/crystal/delays/loss/grid)");
    cmd->add_option("--points", src.points, "Grid points per axis (presets only)")->check(CLI::Range(2, 1 << 14));
}

nlisim::RunConfig resolve(const SourceArgs& src) {
    if (src.preset.empty() == src.config.empty())
        throw nlisim::ConfigError("--preset/--config", "give exactly one of --preset or --config");
    if (!src.config.empty()) {
        if (src.points) throw nlisim::ConfigError("--points", "only applies to --preset; set grid.points in the config");
        return nlisim::load_config(src.config);
    }
    const auto kind = nlisim::parse_preset_kind(src.preset, "--preset");
    return nlisim::preset_config(kind, src.points ? src.points : nlisim::default_grid_points);
}

// "min:max:steps"
void parse_range(const std::string& text, double& lo, double& hi, std::size_t& steps) {
    std::istringstream in(text);
    std::string a, b, c;
    if (!std::getline(in, a, ':') || !std::getline(in, b, ':') || !std::getline(in, c) )
        throw nlisim::ConfigError("--x-range", "expected min:max:steps");
    try {
        lo = std::stod(a);
        hi = std::stod(b);
        const long long n = std::stoll(c);
        if (n < 0) throw nlisim::ConfigError("--x-range", "steps must be positive");
        steps = static_cast<std::size_t>(n);
    } catch (const std::logic_error&) {
        throw nlisim::ConfigError("--x-range", "expected min:max:steps");
    }
}

void print_outputs(const nlisim::RunManifest& m) {
    std::cout << "wrote " << m.outputs().size() << " files to " << m.dir().string() << '\n';
    if (m.document().contains("results")) std::cout << m.document().at("results").dump(2) << '\n';
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nonlinear-interferometer joint-spectrum simulator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", nlisim::version_string);

    SourceArgs src;
    std::string out_dir = "out";
    std::size_t max_modes = 16;
    double lambda_s_nm = 1550.0;
    std::string x_range = "0:20:41";
    std::vector<double> snapshots{0.0, 1.0, 3.0, 4.0, 10.0};
    std::uint64_t seed = 1;

    auto* simulate = app.add_subcommand("simulate", "Assemble the JSA and its Schmidt decomposition");
    add_source(simulate, src);
    simulate->add_option("--out", out_dir, "Output directory");
    simulate->add_option("--max-modes", max_modes, "Maximum number of mode files per photon");

    auto* project = app.add_subcommand("project", "Herald the idler by a signal detection");
    add_source(project, src);
    project->add_option("--out", out_dir, "Output directory");
    project->add_option("--lambda-s", lambda_s_nm, "Detected signal wavelength (nm)");

    auto* sweep = app.add_subcommand("loss-sweep", "Schmidt number and overlaps versus interface loss");
    add_source(sweep, src);
    sweep->add_option("--out", out_dir, "Output directory");
    sweep->add_option("--x-range", x_range, "Loss range min:max:steps in dB");
    sweep->add_option("--snapshots", snapshots, "Loss values (dB) with JSI/mode/projection files")->delimiter(',');
    sweep->add_option("--lambda-s", lambda_s_nm, "Signal wavelength for snapshot projections (nm)");

    auto* verify = app.add_subcommand("verify", "Check per-crystal phase factors against closed forms");
    verify->add_option("--seed", seed, "RNG seed");
    verify->add_option("--config", src.config, "Config whose delay table replaces the tagged preset table");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return bad_input;
    }

    try {
        if (*simulate) {
            print_outputs(nlisim::run_simulate(resolve(src), out_dir, {max_modes}));
        } else if (*project) {
            print_outputs(nlisim::run_project(resolve(src), lambda_s_nm * 1e-9, out_dir));
        } else if (*sweep) {
            double lo = 0.0, hi = 0.0;
            std::size_t steps = 0;
            parse_range(x_range, lo, hi, steps);
            nlisim::LossSweepOptions opt;
            opt.snapshots_db = snapshots;
            opt.lambda_s = lambda_s_nm * 1e-9;
            print_outputs(nlisim::run_loss_sweep(resolve(src), lo, hi, steps, out_dir, opt));
        } else if (*verify) {
            nlisim::VerifyOptions opt;
            opt.seed = seed;
            if (!src.config.empty()) {
                const auto rc = nlisim::load_config(src.config);
                if (!rc.modulation)
                    throw nlisim::ConfigError("delays.modulation", "verify needs a grid or hde modulation tag");
                auto table = nlisim::scaled_table(rc.setup.schedule, rc.setup.tau);
                (*rc.modulation == nlisim::PresetKind::Grid ? opt.grid_table : opt.hde_table) = table;
            }
            const auto report = nlisim::run_verify(opt);
            std::cout << report.text();
            return report.passed() ? ok : verify_failed;
        }
    } catch (const nlisim::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return bad_input;
    } catch (const nlisim::InvalidArgument& e) {
        std::cerr << "invalid argument: " << e.what() << '\n';
        return bad_input;
    } catch (const nlisim::RangeError& e) {
        std::cerr << "range error: " << e.what() << '\n';
        return bad_input;
    } catch (const std::exception& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return numeric_failure;
    }
    return ok;
}
