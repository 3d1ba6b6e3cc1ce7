// qce: run lattice-atom and kicked-top entanglement experiments from configs.
#include <cstdio>
#include <iostream>
#include <map>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include "qce/experiment.hpp"
#include "qce/threads.hpp"

namespace ex = qce::experiment;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_failure = 1;
constexpr int exit_config = 2;
constexpr int exit_convergence = 3;

int report(const char* kind, const std::exception& e, int code)
{
    nlohmann::json record{{"error", kind}, {"message", e.what()}, {"exit_code", code}};
    std::cerr << record.dump() << "\n";
    return code;
}

// Flags that map directly onto config keys.
const std::vector<std::pair<std::string, std::string>> flag_keys{
    {"--model", "run.model"},         {"--type", "run.type"},
    {"--label", "run.label"},         {"--v1", "amol.v1"},
    {"--theta-l-deg", "amol.theta_l_deg"}, {"--bx", "amol.bx"},
    {"--f", "amol.f"},                {"--spin-scale", "amol.spin_scale"},
    {"--n-points", "amol.n_points"},  {"--kappa", "qkt.kappa"},
    {"--p-rot", "qkt.p_rot"},         {"--tau", "qkt.tau"},
    {"--j", "qkt.j"},                 {"--source", "state.source"},
    {"--z0", "state.z"},              {"--p0", "state.p"},
    {"--theta", "state.theta"},       {"--phi", "state.phi"},
    {"--prep", "state.prep"},         {"--width", "state.width"},
    {"--t-end", "time.t_end"},        {"--dt", "time.dt"},
    {"--kicks", "time.kicks"},        {"--truncate", "analysis.truncate"},
};

struct OverrideFlags {
    std::map<std::string, std::string> values;
    std::vector<std::string> sets;

    void attach(CLI::App* app)
    {
        for (const auto& [flag, key] : flag_keys)
            app->add_option(flag, values[flag], "override " + key);
        app->add_option("--set", sets, "override any key: section.key=value");
    }

    ex::Overrides collect(CLI::App* app) const
    {
        ex::Overrides out;
        for (const auto& [flag, key] : flag_keys)
            if (app->count(flag) > 0) out.emplace_back(key, values.at(flag));
        for (const auto& s : sets) {
            const auto eq = s.find('=');
            if (eq == std::string::npos) throw ex::ConfigError("--set expects section.key=value, got '" + s + "'");
            out.emplace_back(s.substr(0, eq), s.substr(eq + 1));
        }
        return out;
    }
};

ex::ExperimentConfig load(const std::string& path, const ex::Overrides& overrides)
{
    auto config = path.empty() ? ex::parse_config("", overrides) : ex::load_config(path, overrides);
    config.validate();
    return config;
}

void print_manifest(const ex::RunManifest& m, const std::filesystem::path& dir)
{
    std::cout << dir.string() << ": " << m.outputs.size() << " files, config " << m.config_hash.substr(0, 12)
              << "\n";
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Entanglement dynamics of a lattice atom and the quantum kicked top"};
    app.require_subcommand(1);
    std::string log_level = "warn";
    app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off");

    auto* run_cmd = app.add_subcommand("run", "run one experiment from a config file and/or flags");
    std::string config_path;
    std::string output;
    run_cmd->add_option("config", config_path, "INI config file (optional)");
    run_cmd->add_option("-o,--output", output, "output directory (default qce_out/<label>)");
    OverrideFlags run_flags;
    run_flags.attach(run_cmd);

    auto* preset_cmd = app.add_subcommand("preset", "run a built-in figure preset");
    std::string preset_name;
    std::string preset_output = "qce_out";
    preset_cmd->add_option("name", preset_name, "preset name")->required();
    preset_cmd->add_option("-o,--output", preset_output, "parent output directory");
    std::vector<std::string> preset_sets;
    preset_cmd->add_option("--set", preset_sets, "override any key in every run: section.key=value");

    auto* list_cmd = app.add_subcommand("list-presets", "list the built-in presets");

    auto* validate_cmd = app.add_subcommand("validate", "check a config and print its canonical form");
    std::string validate_path;
    validate_cmd->add_option("config", validate_path, "INI config file")->required();
    OverrideFlags validate_flags;
    validate_flags.attach(validate_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // Help and version requests exit 0; malformed command lines are config errors.
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }

    try {
        spdlog::set_level(spdlog::level::from_str(log_level));
        qce::configure_threads_from_env();

        if (*list_cmd) {
            for (const auto& p : ex::builtin_presets()) std::cout << p.name << "\t" << p.description << "\n";
            return exit_ok;
        }
        if (*validate_cmd) {
            const auto config = load(validate_path, validate_flags.collect(validate_cmd));
            std::cout << ex::serialize(config) << "\n# config_hash=" << ex::config_hash(config) << "\n";
            return exit_ok;
        }
        if (*run_cmd) {
            const auto config = load(config_path, run_flags.collect(run_cmd));
            const std::filesystem::path dir = output.empty() ? std::filesystem::path("qce_out") / config.label
                                                             : std::filesystem::path(output);
            print_manifest(ex::run(config, dir), dir);
            return exit_ok;
        }
        if (*preset_cmd) {
            const auto& preset = ex::find_preset(preset_name);
            ex::Overrides sets;
            for (const auto& s : preset_sets) {
                const auto eq = s.find('=');
                if (eq == std::string::npos) throw ex::ConfigError("--set expects section.key=value, got '" + s + "'");
                sets.emplace_back(s.substr(0, eq), s.substr(eq + 1));
            }
            for (const auto& base : preset.runs) {
                const auto config = ex::parse_config(ex::serialize(base), sets);
                config.validate();
                const auto dir = std::filesystem::path(preset_output) / preset.name / config.label;
                print_manifest(ex::run(config, dir), dir);
            }
            return exit_ok;
        }
    } catch (const ex::ConfigError& e) {
        return report("config", e, exit_config);
    } catch (const qce::DomainError& e) {
        return report("domain", e, exit_config);
    } catch (const qce::ConvergenceError& e) {
        return report("convergence", e, exit_convergence);
    } catch (const std::exception& e) {
        return report("runtime", e, exit_failure);
    }
    return exit_ok;
}
