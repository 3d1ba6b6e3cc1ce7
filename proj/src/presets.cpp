#include "qce/experiment.hpp"

namespace qce::experiment {

namespace {

ExperimentConfig amol_state(const std::string& label, RunType type, double z, double p, double theta, double phi)
{
    ExperimentConfig c;
    c.model = Model::amol;
    c.type = type;
    c.label = label;
    c.z = z;
    c.p = p;
    c.theta = theta;
    c.phi = phi;
    return c;
}

ExperimentConfig regular_amol(RunType type)
{
    return amol_state("regular", type, -0.15, 0.0, 1.27, 0.0);
}

ExperimentConfig chaotic_amol(RunType type)
{
    return amol_state("chaotic", type, 0.06, 0.0, pi / 2.0, 0.0);
}

ExperimentConfig qkt_state(const std::string& label, RunType type, StateSource source)
{
    ExperimentConfig c;
    c.model = Model::qkt;
    c.type = type;
    c.label = label;
    c.kappa = 3.0;
    c.p_rot = pi / 2.0;
    c.tau = 1.0;
    c.j = 25.0;
    c.source = source;
    c.kicks = 500;
    c.support_top = 3;
    return c;
}

} // namespace

std::vector<Preset> builtin_presets()
{
    std::vector<Preset> out;

    ExperimentConfig shell;
    shell.model = Model::amol;
    shell.type = RunType::classical_section;
    shell.label = "shell";
    shell.on_shell = true;
    shell.energy = -280.0;
    shell.shell_seeds = 8;
    shell.crossings = 300;
    out.push_back({"fig1_sections", "classical sections mu_y=0 and p=0 on the E=-280 E_R shell", {shell}});

    out.push_back({"fig2_entropy", "lattice entropy for the regular and chaotic initial states",
                   {regular_amol(RunType::analyze), chaotic_amol(RunType::analyze)}});

    out.push_back({"fig3_support", "lattice eigenstate support of the regular and chaotic states",
                   {regular_amol(RunType::spectrum), chaotic_amol(RunType::spectrum)}});

    auto truncated = regular_amol(RunType::analyze);
    truncated.truncate = 8;
    out.push_back({"fig4_truncated", "regular lattice entropy against its 8-eigenstate reconstruction",
                   {truncated}});

    out.push_back({"fig5_qkt_support", "kicked-top Floquet support of the regular and chaotic states",
                   {qkt_state("regular", RunType::spectrum, StateSource::regular),
                    qkt_state("chaotic", RunType::spectrum, StateSource::chaotic)}});

    auto qkt_regular = qkt_state("regular", RunType::analyze, StateSource::regular);
    qkt_regular.truncate = 3;
    out.push_back({"fig6_qkt_entropy", "two-qubit entropy of the kicked top, N=50 qubits",
                   {qkt_regular, qkt_state("chaotic", RunType::analyze, StateSource::chaotic)}});
    return out;
}

const Preset& find_preset(const std::string& name)
{
    static const std::vector<Preset> presets = builtin_presets();
    for (const auto& p : presets)
        if (p.name == name) return p;
    throw ConfigError("unknown preset '" + name + "'");
}

} // namespace qce::experiment
