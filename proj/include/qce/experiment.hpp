#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qce/amol.hpp"
#include "qce/amol_classical.hpp"
#include "qce/entanglement.hpp"
#include "qce/kickedtop.hpp"

namespace qce::experiment {

/// Invalid or inconsistent configuration (CLI exit code 2).
class ConfigError : public DomainError {
public:
    using DomainError::DomainError;
};

enum class Model { amol, qkt };
enum class RunType { spectrum, entropy, classical_section, lyapunov, analyze };
enum class StateSource { point, regular, chaotic };

// Plain data mirroring the config file keys one to one, so that
// parse(serialize(c)) == c holds exactly.
struct ExperimentConfig {
    // [run]
    Model model = Model::amol;
    RunType type = RunType::analyze;
    std::string label = "run";

    // [amol]
    double v1 = 160.0;
    double theta_l_deg = 80.0;
    double bx = 12.0;
    double f = 4.0;
    amol::SpinScale spin_scale = amol::SpinScale::full;
    int n_points = 256;
    int n_periods = 1;
    bool use_parity = true;

    // [qkt]
    double kappa = 3.0;
    double p_rot = pi / 2.0;
    double tau = 1.0;
    double j = 25.0;

    // [state]
    StateSource source = StateSource::point;
    double z = -0.15;
    double p = 0.0;
    double theta = 1.27;
    double phi = 0.0;
    amol::MotionalPrep prep = amol::MotionalPrep::gaussian;
    double width = 0.07;
    double well_m = 4.0;

    // [time]
    double t_end = 50.0;
    double dt = 0.005;
    double early_t_end = 0.05;
    double early_dt = 0.0005;
    int kicks = 500;

    // [analysis]
    int truncate = 0;
    bool renormalize = true;
    Window window = Window::hann;
    int zero_pad = 4;
    double rise_fraction = 0.2;
    double gap_tol = 0.0;  // 0 selects the default for the spectrum kind
    int support_top = 8;

    // [classical]
    double classical_dt = 1e-3;
    int order = 6;
    int crossings = 300;
    double t_max = 2000.0;
    bool on_shell = false;
    double energy = -280.0;
    int shell_seeds = 8;
    double lyapunov_t = 4000.0;

    void validate() const;
    bool operator==(const ExperimentConfig&) const = default;
};

using Overrides = std::vector<std::pair<std::string, std::string>>;

/// Parse INI text; `overrides` are (section.key, value) pairs applied on top.
ExperimentConfig parse_config(const std::string& text, const Overrides& overrides = {});
ExperimentConfig load_config(const std::filesystem::path& path, const Overrides& overrides = {});
/// Canonical INI text with every key in a fixed order.
std::string serialize(const ExperimentConfig& config);
/// SHA-256 of the canonical text.
std::string config_hash(const ExperimentConfig& config);

amol::AmolParams amol_params(const ExperimentConfig& config);
amol::LatticeGrid lattice_grid(const ExperimentConfig& config);
qkt::KickedTopParams qkt_params(const ExperimentConfig& config);

std::string to_string(Model m);
std::string to_string(RunType t);

struct RunManifest {
    std::string config_hash;
    std::string version;
    std::string started;
    std::string finished;
    std::vector<std::string> outputs;  // relative to the run directory
    std::vector<std::string> output_sha256;  // parallel to `outputs`, manifest.json excluded
    std::vector<std::string> warnings;
    nlohmann::json results;  // measured quantities, deterministic

    /// SHA-256 of the manifest without its timestamps; equal for reruns of one config.
    std::string content_hash() const;
    nlohmann::json to_json() const;
};

/// Runs one experiment into `out_dir` (created if needed). On failure every
/// file written by this call is removed and the exception propagates.
RunManifest run(const ExperimentConfig& config, const std::filesystem::path& out_dir);

struct Preset {
    std::string name;
    std::string description;
    std::vector<ExperimentConfig> runs;  // each run's label names its subdirectory
};

std::vector<Preset> builtin_presets();
const Preset& find_preset(const std::string& name);

} // namespace qce::experiment
