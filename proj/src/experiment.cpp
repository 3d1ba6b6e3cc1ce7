#include "qce/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <functional>
#include <memory>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <spdlog/spdlog.h>

#include "qce/output.hpp"
#include "qce/spectral.hpp"

#ifndef QCE_VERSION
#define QCE_VERSION "0.0.0"
#endif

namespace qce::experiment {

namespace {

using io::format_double;

double parse_double(const std::string& key, const std::string& v)
{
    std::size_t used = 0;
    double out = 0.0;
    try {
        out = std::stod(v, &used);
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected a number, got '" + v + "'");
    }
    if (used != v.size() || !std::isfinite(out)) throw ConfigError(key + ": expected a number, got '" + v + "'");
    return out;
}

int parse_int(const std::string& key, const std::string& v)
{
    std::size_t used = 0;
    int out = 0;
    try {
        out = std::stoi(v, &used);
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected an integer, got '" + v + "'");
    }
    if (used != v.size()) throw ConfigError(key + ": expected an integer, got '" + v + "'");
    return out;
}

bool parse_bool(const std::string& key, const std::string& v)
{
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

template <typename E>
E parse_enum(const std::string& key, const std::string& v, std::initializer_list<std::pair<const char*, E>> table)
{
    std::string options;
    for (const auto& [name, value] : table) {
        if (v == name) return value;
        options += std::string(options.empty() ? "" : ", ") + name;
    }
    throw ConfigError(key + ": '" + v + "' is not one of " + options);
}

template <typename E>
std::string enum_name(E v, std::initializer_list<std::pair<const char*, E>> table)
{
    for (const auto& [name, value] : table)
        if (value == v) return name;
    return "?";
}

constexpr std::initializer_list<std::pair<const char*, Model>> model_names{{"amol", Model::amol},
                                                                         {"qkt", Model::qkt}};
constexpr std::initializer_list<std::pair<const char*, RunType>> type_names{
    {"spectrum", RunType::spectrum},
    {"entropy", RunType::entropy},
    {"classical_section", RunType::classical_section},
    {"lyapunov", RunType::lyapunov},
    {"analyze", RunType::analyze}};
constexpr std::initializer_list<std::pair<const char*, StateSource>> source_names{
    {"point", StateSource::point}, {"regular", StateSource::regular}, {"chaotic", StateSource::chaotic}};
constexpr std::initializer_list<std::pair<const char*, amol::SpinScale>> scale_names{
    {"normalized", amol::SpinScale::normalized}, {"full", amol::SpinScale::full}};
constexpr std::initializer_list<std::pair<const char*, amol::MotionalPrep>> prep_names{
    {"gaussian", amol::MotionalPrep::gaussian}, {"diabatic", amol::MotionalPrep::diabatic}};
constexpr std::initializer_list<std::pair<const char*, Window>> window_names{{"none", Window::none},
                                                                           {"hann", Window::hann}};

struct Field {
    const char* key;  // section.name
    std::function<std::string(const ExperimentConfig&)> get;
    std::function<void(ExperimentConfig&, const std::string&)> set;
};

#define QCE_DOUBLE(k, m)                                                                           \
    Field{k, [](const ExperimentConfig& c) { return format_double(c.m); },                         \
          [](ExperimentConfig& c, const std::string& v) { c.m = parse_double(k, v); }}
#define QCE_INT(k, m)                                                                              \
    Field{k, [](const ExperimentConfig& c) { return std::to_string(c.m); },                        \
          [](ExperimentConfig& c, const std::string& v) { c.m = parse_int(k, v); }}
#define QCE_BOOL(k, m)                                                                             \
    Field{k, [](const ExperimentConfig& c) { return std::string(c.m ? "true" : "false"); },        \
          [](ExperimentConfig& c, const std::string& v) { c.m = parse_bool(k, v); }}
#define QCE_ENUM(k, m, table)                                                                      \
    Field{k, [](const ExperimentConfig& c) { return enum_name(c.m, table); },                      \
          [](ExperimentConfig& c, const std::string& v) { c.m = parse_enum(k, v, table); }}

const std::vector<Field>& fields()
{
    static const std::vector<Field> all{
        QCE_ENUM("run.model", model, model_names),
        QCE_ENUM("run.type", type, type_names),
        Field{"run.label", [](const ExperimentConfig& c) { return c.label; },
              [](ExperimentConfig& c, const std::string& v) { c.label = v; }},
        QCE_DOUBLE("amol.v1", v1),
        QCE_DOUBLE("amol.theta_l_deg", theta_l_deg),
        QCE_DOUBLE("amol.bx", bx),
        QCE_DOUBLE("amol.f", f),
        QCE_ENUM("amol.spin_scale", spin_scale, scale_names),
        QCE_INT("amol.n_points", n_points),
        QCE_INT("amol.n_periods", n_periods),
        QCE_BOOL("amol.use_parity", use_parity),
        QCE_DOUBLE("qkt.kappa", kappa),
        QCE_DOUBLE("qkt.p_rot", p_rot),
        QCE_DOUBLE("qkt.tau", tau),
        QCE_DOUBLE("qkt.j", j),
        QCE_ENUM("state.source", source, source_names),
        QCE_DOUBLE("state.z", z),
        QCE_DOUBLE("state.p", p),
        QCE_DOUBLE("state.theta", theta),
        QCE_DOUBLE("state.phi", phi),
        QCE_ENUM("state.prep", prep, prep_names),
        QCE_DOUBLE("state.width", width),
        QCE_DOUBLE("state.well_m", well_m),
        QCE_DOUBLE("time.t_end", t_end),
        QCE_DOUBLE("time.dt", dt),
        QCE_DOUBLE("time.early_t_end", early_t_end),
        QCE_DOUBLE("time.early_dt", early_dt),
        QCE_INT("time.kicks", kicks),
        QCE_INT("analysis.truncate", truncate),
        QCE_BOOL("analysis.renormalize", renormalize),
        QCE_ENUM("analysis.window", window, window_names),
        QCE_INT("analysis.zero_pad", zero_pad),
        QCE_DOUBLE("analysis.rise_fraction", rise_fraction),
        QCE_DOUBLE("analysis.gap_tol", gap_tol),
        QCE_INT("analysis.support_top", support_top),
        QCE_DOUBLE("classical.dt", classical_dt),
        QCE_INT("classical.order", order),
        QCE_INT("classical.crossings", crossings),
        QCE_DOUBLE("classical.t_max", t_max),
        QCE_BOOL("classical.on_shell", on_shell),
        QCE_DOUBLE("classical.energy", energy),
        QCE_INT("classical.shell_seeds", shell_seeds),
        QCE_DOUBLE("classical.lyapunov_t", lyapunov_t),
    };
    return all;
}

#undef QCE_DOUBLE
#undef QCE_INT
#undef QCE_BOOL
#undef QCE_ENUM

const Field& find_field(const std::string& key)
{
    for (const auto& f : fields())
        if (key == f.key) return f;
    throw ConfigError("unknown config key '" + key + "'");
}

std::string utc_now()
{
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace

std::string to_string(Model m)
{
    return enum_name(m, model_names);
}

std::string to_string(RunType t)
{
    return enum_name(t, type_names);
}

void ExperimentConfig::validate() const
{
    auto check = [](bool ok, const std::string& msg) {
        if (!ok) throw ConfigError(msg);
    };
    check(!label.empty() && label.find_first_of("/\\") == std::string::npos,
          "run.label must be a non-empty name without path separators");
    try {
        if (model == Model::amol) {
            amol_params(*this).validate();
            lattice_grid(*this).validate();
            check(theta >= 0.0 && theta <= pi, "state.theta must lie in [0, pi]");
            check(width > 0.0, "state.width must be positive");
            check(source == StateSource::point, "state.source must be 'point' for the amol model");
            check(t_end > 0.0 && dt > 0.0 && dt <= t_end, "time: need 0 < dt <= t_end");
            check(early_t_end > 0.0 && early_dt > 0.0 && early_dt <= early_t_end,
                  "time: need 0 < early_dt <= early_t_end");
            check(classical_dt > 0.0, "classical.dt must be positive");
            check(order == 2 || order == 4 || order == 6 || order == 8, "classical.order must be 2, 4, 6 or 8");
            check(crossings >= 1 && t_max > 0.0, "classical: crossings >= 1 and t_max > 0 required");
            check(shell_seeds >= 1, "classical.shell_seeds must be at least 1");
            check(lyapunov_t >= 2.0, "classical.lyapunov_t must be at least 2");
        } else {
            qkt_params(*this).validate();
            check(kicks >= 2, "time.kicks must be at least 2");
            check(theta >= 0.0 && theta <= pi, "state.theta must lie in [0, pi]");
            check(type != RunType::classical_section && type != RunType::lyapunov,
                  "classical run types are only defined for the amol model");
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    check(truncate >= 0, "analysis.truncate must be non-negative");
    check(zero_pad >= 1, "analysis.zero_pad must be at least 1");
    check(rise_fraction > 0.0 && rise_fraction <= 1.0, "analysis.rise_fraction must lie in (0, 1]");
    check(gap_tol >= 0.0, "analysis.gap_tol must be non-negative");
    check(support_top >= 1, "analysis.support_top must be at least 1");
}

ExperimentConfig parse_config(const std::string& text, const Overrides& overrides)
{
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        std::istringstream in(text);
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config syntax: ") + e.what());
    }
    ExperimentConfig c;
    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty())
            throw ConfigError("key '" + section + "' must be inside a section");
        for (const auto& [key, value] : body) {
            const std::string full = section + "." + key;
            find_field(full).set(c, value.data());
        }
    }
    for (const auto& [key, value] : overrides) find_field(key).set(c, value);
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path, const Overrides& overrides)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), overrides);
}

std::string serialize(const ExperimentConfig& config)
{
    std::string out;
    std::string current;
    for (const auto& f : fields()) {
        const std::string key = f.key;
        const auto dot = key.find('.');
        const std::string section = key.substr(0, dot);
        if (section != current) {
            out += (current.empty() ? "" : "\n") + std::string("[") + section + "]\n";
            current = section;
        }
        out += key.substr(dot + 1) + " = " + f.get(config) + "\n";
    }
    return out;
}

std::string config_hash(const ExperimentConfig& config)
{
    return io::sha256_hex(serialize(config));
}

amol::AmolParams amol_params(const ExperimentConfig& c)
{
    amol::AmolParams p;
    p.v1 = c.v1;
    p.theta_l = c.theta_l_deg * pi / 180.0;
    p.bx = c.bx;
    p.f = c.f;
    p.spin_scale = c.spin_scale;
    return p;
}

amol::LatticeGrid lattice_grid(const ExperimentConfig& c)
{
    return {c.n_points, c.n_periods};
}

qkt::KickedTopParams qkt_params(const ExperimentConfig& c)
{
    return {c.kappa, c.p_rot, c.tau, c.j};
}

namespace {

nlohmann::json manifest_body(const RunManifest& m)
{
    nlohmann::json files = nlohmann::json::object();
    for (std::size_t i = 0; i < m.output_sha256.size() && i < m.outputs.size(); ++i)
        files[m.outputs[i]] = m.output_sha256[i];
    return {{"artifact", "qce"},   {"version", m.version},   {"config_hash", m.config_hash},
            {"outputs", m.outputs}, {"output_sha256", files}, {"warnings", m.warnings},
            {"results", m.results}};
}

} // namespace

std::string RunManifest::content_hash() const
{
    return io::sha256_hex(manifest_body(*this).dump());
}

nlohmann::json RunManifest::to_json() const
{
    auto j = manifest_body(*this);
    j["manifest_hash"] = content_hash();
    j["started"] = started;
    j["finished"] = finished;
    return j;
}

namespace {

using Comments = std::vector<std::pair<std::string, std::string>>;

// Collects the files of one run so a failure can remove them.
class RunWriter {
public:
    RunWriter(std::filesystem::path dir, const ExperimentConfig& config)
        : dir_(std::move(dir)), hash_(config_hash(config)), config_(config)
    {
    }

    void write(const std::string& name, const std::string& content)
    {
        io::atomic_write(dir_ / name, content);
        written_.push_back(name);
        digests_.push_back(io::sha256_hex(content));
    }

    const std::string& digest(const std::string& name) const
    {
        const auto it = std::find(written_.begin(), written_.end(), name);
        require(it != written_.end(), "no output named " + name);
        return digests_[static_cast<std::size_t>(it - written_.begin())];
    }

    void write_csv(const std::string& name, Comments comments, const std::vector<std::string>& header,
                   const std::vector<std::vector<double>>& columns)
    {
        comments.insert(comments.begin(), {{"model", to_string(config_.model)},
                                           {"label", config_.label},
                                           {"config_hash", hash_}});
        write(name, io::csv(comments, header, columns));
    }

    void remove_all() noexcept
    {
        for (const auto& name : written_) {
            std::error_code ec;
            std::filesystem::remove(dir_ / name, ec);
        }
        written_.clear();
        digests_.clear();
    }

    const std::vector<std::string>& written() const { return written_; }
    const std::filesystem::path& dir() const { return dir_; }

private:
    std::filesystem::path dir_;
    std::string hash_;
    const ExperimentConfig& config_;
    std::vector<std::string> written_;
    std::vector<std::string> digests_;
};

std::string state_descriptor(double z, double p, double theta, double phi)
{
    return "(" + format_double(z) + " " + format_double(p) + " " + format_double(theta) + " " +
           format_double(phi) + ")";
}

// Everything a quantum run needs: the decomposition, the initial state and how
// to reduce states for the entropy.
struct QuantumSetup {
    std::shared_ptr<const SpectralDecomposition> decomp;
    CVec psi0;
    Reducer reduce;
    Dims dims{0, 0};
    int keep = 1;
    std::string time_units;
    std::string eigenvalue_units;
    std::string frequency_units;
    std::string subsystem;
    std::string state;
    std::vector<double> times;
    std::vector<double> early_times;  // empty when the main series serves for the rise fit
};

QuantumSetup setup_amol(const ExperimentConfig& c, nlohmann::json& results, std::vector<std::string>& warnings)
{
    const auto params = amol_params(c);
    const auto grid = lattice_grid(c);
    amol::PrepOptions prep;
    prep.method = c.prep;
    prep.width = c.width;
    prep.well_m = c.well_m;
    const auto state = amol::prepare_state(params, grid, {c.z, c.p, c.theta, c.phi}, prep);
    const CMat h = amol::build_hamiltonian(params, grid);

    DecomposeOptions opts;
    if (c.use_parity) opts.sectors = amol::parity_sectors(grid, build_spin_operators(SpinSpace(params.f)));
    opts.reference = &state.amplitudes;
    auto decomp = std::make_shared<SpectralDecomposition>(decompose(h, SpectrumKind::hamiltonian, opts));
    for (const auto& w : decomp->warnings) warnings.push_back(w);

    const auto moments = amol::motional_moments(grid, state);
    results["initial_state"] = {{"z_over_lambda", c.z},         {"p_over_hbark", c.p},
                                {"theta", c.theta},             {"phi", c.phi},
                                {"prep", enum_name(c.prep, prep_names)},
                                {"spread_z_over_lambda", moments.spread_z},
                                {"spread_p_over_hbark", moments.spread_p},
                                {"mean_energy", state.amplitudes.dot(h * state.amplitudes).real()}};

    QuantumSetup s;
    s.decomp = decomp;
    s.psi0 = state.amplitudes;
    s.dims = {state.motion_dim, state.spin_dim};
    s.keep = 1;
    s.reduce = [d = s.dims](const CVec& psi) { return partial_trace(psi, d, 1); };
    s.time_units = "E_R*t/hbar";
    s.eigenvalue_units = "E_R";
    s.frequency_units = "rad/(hbar/E_R)";
    s.subsystem = "spin (motion traced out)";
    s.state = state_descriptor(c.z, c.p, c.theta, c.phi);
    s.times = uniform_times(0.0, c.t_end, c.dt);
    s.early_times = uniform_times(0.0, c.early_t_end, c.early_dt);
    return s;
}

QuantumSetup setup_qkt(const ExperimentConfig& c, nlohmann::json& results, std::vector<std::string>& warnings)
{
    const auto params = qkt_params(c);
    double theta = c.theta;
    double phi = c.phi;
    if (c.source == StateSource::regular) {
        const auto fp = qkt::regular_fixed_point(params);
        theta = fp.theta;
        phi = fp.phi;
        results["fixed_point"] = {{"theta", fp.theta}, {"phi", fp.phi},
                                  {"stability", qkt::to_string(fp.stability)}, {"residual", fp.residual}};
    } else if (c.source == StateSource::chaotic) {
        const auto seed = qkt::chaotic_seed(params);
        theta = seed.theta;
        phi = seed.phi;
        results["chaotic_seed"] = {{"theta", seed.theta}, {"phi", seed.phi}, {"map_lyapunov", seed.lyapunov}};
    }
    const SpinOperators ops = build_spin_operators(SpinSpace(params.j));
    auto decomp = std::make_shared<SpectralDecomposition>(
        decompose(qkt::floquet_operator(params), SpectrumKind::floquet));
    for (const auto& w : decomp->warnings) warnings.push_back(w);

    QuantumSetup s;
    s.decomp = decomp;
    s.psi0 = spin_coherent_state(ops, theta, phi);
    const int n = params.qubits();
    s.dims = {4, n - 2};
    s.reduce = [n](const CVec& psi) { return qkt::two_qubit_rdm(psi, n); };
    s.time_units = "kicks";
    s.eigenvalue_units = "radians";
    s.frequency_units = "rad/kick";
    s.subsystem = "two qubits of N=" + std::to_string(n);
    s.state = "coherent(" + format_double(theta) + " " + format_double(phi) + ")";
    for (int k = 0; k <= c.kicks; ++k) s.times.push_back(k);
    results["initial_state"] = {{"theta", theta}, {"phi", phi}, {"source", enum_name(c.source, source_names)}};
    return s;
}

Comments series_comments(const QuantumSetup& s, const std::string& what)
{
    return {{"series", what},
            {"time_units", s.time_units},
            {"entropy", "linear 1-Tr(rho^2)"},
            {"subsystem", s.subsystem},
            {"initial_state", s.state}};
}

EntropySeries make_series(const Propagator& prop, const QuantumSetup& s, const std::vector<double>& times)
{
    auto series = entropy_series(prop, s.psi0, times, s.reduce);
    series.dims = s.dims;
    series.keep = s.keep;
    series.time_units = s.time_units;
    series.initial_state = s.state;
    return series;
}

nlohmann::json fit_json(const RiseFit& f)
{
    nlohmann::json params = nlohmann::json::object();
    for (const auto& [k, v] : f.params) params[k] = v;
    return {{"model", to_string(f.model)},
            {"params", params},
            {"residual", f.residual},
            {"window", {f.window.begin, f.window.end}},
            {"n_points", f.n_points}};
}

void run_quantum(const ExperimentConfig& c, RunWriter& out, nlohmann::json& results,
                 std::vector<std::string>& warnings)
{
    const QuantumSetup s = c.model == Model::amol ? setup_amol(c, results, warnings) : setup_qkt(c, results, warnings);
    const auto& decomp = *s.decomp;
    const bool want_support = c.type == RunType::spectrum || c.type == RunType::analyze;
    const bool want_entropy = c.type == RunType::entropy || c.type == RunType::analyze;

    const SupportSpectrum support = support_spectrum(decomp, s.psi0);
    const double gap_tol = c.gap_tol > 0.0 ? c.gap_tol : default_gap_tolerance(decomp.kind);
    results["dimension"] = decomp.dim();
    results["support_total"] = support.total();

    if (want_support) {
        const Comments sc{{"eigenvalue_units", s.eigenvalue_units},
                          {"spectrum", to_string(decomp.kind)},
                          {"initial_state", s.state}};
        out.write_csv("support.csv", sc, {"eigenvalue", "population"},
                      {std::vector<double>(decomp.eigenvalues.begin(), decomp.eigenvalues.end()),
                       std::vector<double>(support.populations.begin(), support.populations.end())});
        std::vector<double> ev;
        std::vector<double> pop;
        for (const auto& [e, w] : support.aggregated(1e-8)) {
            ev.push_back(e);
            pop.push_back(w);
        }
        auto ac = sc;
        ac.emplace_back("aggregation", "eigenvalues closer than 1e-8 merged");
        out.write_csv("support_aggregated.csv", ac, {"eigenvalue", "population"}, {ev, pop});

        const auto st = analyze_support(decomp, support, c.support_top, gap_tol);
        nlohmann::json pairs = nlohmann::json::array();
        for (const auto& pr : st.pairs)
            pairs.push_back({{"first", decomp.eigenvalues(pr.first)},
                             {"second", decomp.eigenvalues(pr.second)},
                             {"gap", pr.gap},
                             {"population", support.populations(pr.first) + support.populations(pr.second)}});
        nlohmann::json dominant = nlohmann::json::array();
        for (int i : st.dominant)
            dominant.push_back({{"eigenvalue", decomp.eigenvalues(i)}, {"population", support.populations(i)}});
        results["support"] = {{"top", c.support_top},       {"top_population", st.population},
                              {"gap_tol", gap_tol},         {"dominant", dominant},
                              {"pairs", pairs},             {"max_pair_gap", st.max_pair_gap},
                              {"min_peak_spacing", st.min_peak_spacing},
                              {"gap_ratio", st.gap_ratio},  {"dominant_pair_gap", st.dominant_pair_gap}};
    }
    if (!want_entropy) return;

    const SpectralPropagator full(s.decomp);
    const EntropySeries series = make_series(full, s, s.times);
    out.write_csv("entropy.csv", series_comments(s, "full"), {"time", "entropy"}, {series.times, series.values});
    results["entropy"] = {{"samples", series.values.size()},
                          {"max", *std::max_element(series.values.begin(), series.values.end())},
                          {"initial", series.values.front()}};

    EntropySeries early = series;
    if (!s.early_times.empty()) {
        early = make_series(full, s, s.early_times);
        out.write_csv("entropy_early.csv", series_comments(s, "early"), {"time", "entropy"},
                      {early.times, early.values});
    }
    if (c.type != RunType::analyze) return;

    if (c.truncate > 0) {
        const auto kept = support.dominant(c.truncate);
        const SpectralPropagator trunc(s.decomp, kept, c.renormalize);
        const EntropySeries ts = make_series(trunc, s, s.times);
        auto cm = series_comments(s, "truncated");
        cm.emplace_back("kept_eigenstates", std::to_string(kept.size()));
        cm.emplace_back("renormalized", c.renormalize ? "true" : "false");
        out.write_csv("entropy_truncated.csv", cm, {"time", "entropy"}, {ts.times, ts.values});
        // Compare over tau <= 20 for the lattice, over the whole record for the top.
        const double horizon = c.model == Model::amol ? 20.0 : ts.times.back();
        double peak = 0.0;
        double dev = 0.0;
        for (std::size_t i = 0; i < ts.times.size() && ts.times[i] <= horizon + 1e-12; ++i) {
            peak = std::max(peak, series.values[i]);
            dev = std::max(dev, std::abs(series.values[i] - ts.values[i]));
        }
        results["truncated"] = {{"kept", kept.size()},
                                {"horizon", horizon},
                                {"max_deviation", dev},
                                {"peak", peak},
                                {"relative_deviation", peak > 0.0 ? dev / peak : 0.0}};
    }

    const PowerSpectrum ps = power_spectrum(series, c.window, c.zero_pad);
    out.write_csv("spectrum.csv",
                  {{"frequency_units", s.frequency_units},
                   {"window", enum_name(c.window, window_names)},
                   {"zero_pad", std::to_string(c.zero_pad)},
                   {"source", "entropy.csv"}},
                  {"frequency", "magnitude"}, {ps.frequencies, ps.magnitudes});
    results["spectral_flatness"] = spectral_flatness(ps);
    results["autocorrelation_secondary_peak"] = secondary_autocorrelation_peak(series.values);

    try {
        const TimeWindow window = c.model == Model::amol ? default_rise_window(early, c.rise_fraction)
                                                         : pre_saturation_window(early);
        const auto cmp = compare_rise_models(early, window);
        const RiseFit& best = cmp.preferred == RiseModel::quadratic ? cmp.quadratic : cmp.exponential;
        nlohmann::json fits = fit_json(best);
        fits["series"] = s.early_times.empty() ? "entropy.csv" : "entropy_early.csv";
        fits["window_rule"] = c.model == Model::amol
                                  ? "t=0 until S first reaches " + format_double(c.rise_fraction) +
                                        " of its first local maximum"
                                  : "first kick through the first local maximum";
        fits["candidates"] = {fit_json(cmp.quadratic), fit_json(cmp.exponential)};
        out.write("fits.json", fits.dump(2) + "\n");
        results["rise"] = fits;
    } catch (const DomainError& e) {
        warnings.push_back(std::string("rise fit skipped: ") + e.what());
    }
}

std::vector<amol::ClassicalState> classical_initial_conditions(const ExperimentConfig& c,
                                                               std::vector<std::string>& warnings)
{
    const auto params = amol_params(c);
    if (!c.on_shell) return {amol::to_classical({c.z, c.p, c.theta, c.phi})};
    const double emin = amol::minimum_energy(params);
    if (c.energy < emin)
        throw ConfigError("classical.energy " + format_double(c.energy) + " is below the minimum " +
                          format_double(emin));
    std::vector<amol::ClassicalState> candidates;
    constexpr int nz = 16;
    for (double phi : {pi, 0.0})
        for (double theta : {pi / 2.0, pi / 4.0, 3.0 * pi / 4.0})
            for (int k = 0; k < nz; ++k) {
                amol::PhasePoint base{-0.25 + 0.5 * k / nz, 0.0, theta, phi};
                const double e0 = amol::classical_energy(amol::to_classical(base), params);
                if (e0 > c.energy) continue;
                const double pmax = std::sqrt((c.energy - e0) * 2.0 * amol::mass) + 1.0;
                candidates.push_back(amol::to_classical(
                    amol::seed_on_shell(params, base, amol::Coordinate::p, c.energy, 0.0, pmax)));
            }
    if (candidates.empty()) throw ConfigError("no seed reaches the requested energy shell");
    std::vector<amol::ClassicalState> out;
    const int n = std::min<int>(c.shell_seeds, static_cast<int>(candidates.size()));
    if (n < c.shell_seeds)
        warnings.push_back("only " + std::to_string(n) + " shell seeds available");
    for (int i = 0; i < n; ++i)
        out.push_back(candidates[static_cast<std::size_t>(i) * candidates.size() / static_cast<std::size_t>(n)]);
    return out;
}

void run_classical(const ExperimentConfig& c, RunWriter& out, nlohmann::json& results,
                   std::vector<std::string>& warnings)
{
    const auto params = amol_params(c);
    const amol::IntegratorOptions opts{c.classical_dt, c.order};
    const auto ics = classical_initial_conditions(c, warnings);
    nlohmann::json list = nlohmann::json::array();
    for (std::size_t i = 0; i < ics.size(); ++i) {
        const auto& ic = ics[i];
        const auto pp = amol::to_phase_point(ic);
        nlohmann::json entry{{"z_over_lambda", pp.z}, {"p_over_hbark", pp.p}, {"theta", pp.theta},
                             {"phi", pp.phi}, {"energy", amol::classical_energy(ic, params)}};
        char idx[24];
        std::snprintf(idx, sizeof idx, "%03zu", i);
        if (c.type == RunType::classical_section) {
            for (auto var : {amol::SectionVariable::mu_y, amol::SectionVariable::p}) {
                const std::string vname = var == amol::SectionVariable::mu_y ? "mu_y" : "p";
                const auto sec = amol::poincare_section(ic, params, {var, +1}, c.crossings, c.t_max, opts);
                if (!sec.complete) warnings.push_back("section " + vname + " seed " + idx + ": " + sec.warning);
                std::vector<std::vector<double>> cols(5);
                for (const auto& pt : sec.points) {
                    cols[0].push_back(pt.point.z);
                    cols[1].push_back(pt.point.p);
                    cols[2].push_back(pt.point.theta);
                    cols[3].push_back(pt.point.phi);
                    cols[4].push_back(pt.time);
                }
                out.write_csv("section_" + vname + "_" + idx + ".csv",
                              {{"section", vname + "=0, d" + vname + "/dt>0"},
                               {"length_units", "lambda"},
                               {"momentum_units", "hbar*k"},
                               {"angle_units", "rad"},
                               {"time_units", "E_R*t/hbar"},
                               {"energy", format_double(amol::classical_energy(ic, params))},
                               {"spin_scale", enum_name(c.spin_scale, scale_names)}},
                              {"z_over_lambda", "p_over_hbark", "theta", "phi", "crossing_time"}, cols);
                entry["crossings_" + vname] = sec.points.size();
                entry["complete_" + vname] = sec.complete;
            }
        } else {
            const double half = amol::lyapunov_estimate(ic, params, 0.5 * c.lyapunov_t, opts);
            const double whole = amol::lyapunov_estimate(ic, params, c.lyapunov_t, opts);
            entry["lyapunov"] = whole;
            entry["lyapunov_half_time"] = half;
            entry["t_total"] = c.lyapunov_t;
        }
        list.push_back(entry);
    }
    results["initial_conditions"] = list;
    if (c.type == RunType::lyapunov) out.write("lyapunov.json", list.dump(2) + "\n");
}

} // namespace

RunManifest run(const ExperimentConfig& config, const std::filesystem::path& out_dir)
{
    config.validate();
    RunManifest manifest;
    manifest.config_hash = config_hash(config);
    manifest.version = QCE_VERSION;
    manifest.started = utc_now();
    std::filesystem::create_directories(out_dir);
    RunWriter out(out_dir, config);
    try {
        out.write("config.ini", serialize(config));
        nlohmann::json results = nlohmann::json::object();
        if (config.type == RunType::classical_section || config.type == RunType::lyapunov)
            run_classical(config, out, results, manifest.warnings);
        else
            run_quantum(config, out, results, manifest.warnings);
        manifest.results = results;
        for (const auto& name : out.written()) {
            manifest.outputs.push_back(name);
            manifest.output_sha256.push_back(out.digest(name));
        }
        manifest.finished = utc_now();
        manifest.outputs.push_back("manifest.json");
        io::atomic_write(out_dir / "manifest.json", manifest.to_json().dump(2) + "\n");
    } catch (...) {
        out.remove_all();
        throw;
    }
    for (const auto& w : manifest.warnings) spdlog::warn("{}", w);
    return manifest;
}

} // namespace qce::experiment
