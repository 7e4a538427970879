// Command-line front end: builds relay-mediated coupling data, parameter
// scans, dynamics comparisons and validity sweeps as deterministic CSV/JSON
// files.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "rydrelay/analytics.hpp"
#include "rydrelay/dynamics.hpp"
#include "rydrelay/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace rydrelay;

namespace {

constexpr double kPi = std::numbers::pi;

struct GeometryConfig {
    std::string kind = "pair";
    int n_main = 21;
    double spacing = 10.0;
    double r_ij = 10.0;
    // relay placement defaults depend on the kind: 6 um for pairs, 12 um for
    // chains (the reference configurations)
    std::optional<double> r_imu;
    double theta_imu = kPi / 2.0;
    double min_distance = 1.0;

    double relay_distance() const {
        return r_imu.value_or(kind == "pair" ? 6.0 : 12.0);
    }
};

struct FitConfig {
    double r_min = 10.0;
    double r_max = 30.0;
    double r_step = 0.5;
    int sep_min = 2;
    int sep_max = 10;
};

struct DynamicsConfig {
    std::string mode = "compare";
    int site = 0;
    double periods = 1.0;
    int samples = 81;
    double tol = 1e-7;
    double omega_up = 0.0;
    // protocol switch times as fractions of the exchange period; resolved
    // absolute values are recorded in the output config
    double t_loss_fraction = 0.25;
    double t_reinjection_fraction = 0.5;
    std::vector<double> gamma_p_values{0.0, 0.001, 1.0, 100.0};
};

struct ValidityConfig {
    double r_ij = 10.0;
    double r_imu = 8.0;
    int n_theta = 121;
    double threshold = 10.0;
    double gamma_hz = 3800.0;
    double nf_r_min_m = 1e-5;
    double nf_r_max_m = 1e-2;
    int nf_points = 121;
};

struct RunConfig {
    PhysicalParams params;
    Regime regime = Regime::Room;
    std::string out = "out";
    GeometryConfig geometry;
    FitConfig fit;
    ScanConfig scan = ScanConfig::pair_defaults();
    DynamicsConfig dynamics;
    ValidityConfig validity;
};

void reject_unknown(const json& j, std::initializer_list<const char*> known,
                    const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* k : known)
            if (key == k)
                ok = true;
        if (!ok)
            throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

template <typename T>
void read_into(const json& j, const char* key, T& target) {
    if (j.contains(key))
        target = j.at(key).get<T>();
}

void apply_geometry(const json& j, GeometryConfig& g) {
    reject_unknown(j, {"kind", "n_main", "spacing", "r_ij", "r_imu", "theta_imu",
                       "min_distance"},
                   "geometry");
    read_into(j, "kind", g.kind);
    read_into(j, "n_main", g.n_main);
    read_into(j, "spacing", g.spacing);
    read_into(j, "r_ij", g.r_ij);
    if (j.contains("r_imu"))
        g.r_imu = j.at("r_imu").get<double>();
    read_into(j, "theta_imu", g.theta_imu);
    read_into(j, "min_distance", g.min_distance);
    if (g.kind != "pair" && g.kind != "chain")
        throw ConfigError("geometry.kind must be 'pair' or 'chain'");
}

void apply_fit(const json& j, FitConfig& f) {
    reject_unknown(j, {"r_min", "r_max", "r_step", "sep_min", "sep_max"}, "fit");
    read_into(j, "r_min", f.r_min);
    read_into(j, "r_max", f.r_max);
    read_into(j, "r_step", f.r_step);
    read_into(j, "sep_min", f.sep_min);
    read_into(j, "sep_max", f.sep_max);
}

void apply_scan(const json& j, ScanConfig& s) {
    reject_unknown(j,
                   {"kind", "n_r", "n_theta", "r_min", "r_max", "theta_min", "theta_max",
                    "fit_r_min", "fit_r_max", "fit_r_step", "chain_length",
                    "chain_spacing", "fit_sep_min", "fit_sep_max", "strength_separation",
                    "min_distance", "min_coupling"},
                   "scan");
    if (j.contains("kind")) {
        const std::string kind = j.at("kind").get<std::string>();
        if (kind == "pair")
            s = ScanConfig::pair_defaults();
        else if (kind == "chain")
            s = ScanConfig::chain_defaults();
        else
            throw ConfigError("scan.kind must be 'pair' or 'chain'");
    }
    read_into(j, "n_r", s.n_r);
    read_into(j, "n_theta", s.n_theta);
    read_into(j, "r_min", s.r_min);
    read_into(j, "r_max", s.r_max);
    read_into(j, "theta_min", s.theta_min);
    read_into(j, "theta_max", s.theta_max);
    read_into(j, "fit_r_min", s.fit_r_min);
    read_into(j, "fit_r_max", s.fit_r_max);
    read_into(j, "fit_r_step", s.fit_r_step);
    read_into(j, "chain_length", s.chain_length);
    read_into(j, "chain_spacing", s.chain_spacing);
    read_into(j, "fit_sep_min", s.fit_sep_min);
    read_into(j, "fit_sep_max", s.fit_sep_max);
    read_into(j, "strength_separation", s.strength_separation);
    read_into(j, "min_distance", s.min_distance);
    read_into(j, "min_coupling", s.min_coupling);
}

void apply_dynamics(const json& j, DynamicsConfig& d) {
    reject_unknown(j,
                   {"mode", "site", "periods", "samples", "tol", "omega_up",
                    "t_loss_fraction", "t_reinjection_fraction", "gamma_p_values"},
                   "dynamics");
    read_into(j, "mode", d.mode);
    read_into(j, "site", d.site);
    read_into(j, "periods", d.periods);
    read_into(j, "samples", d.samples);
    read_into(j, "tol", d.tol);
    read_into(j, "omega_up", d.omega_up);
    read_into(j, "t_loss_fraction", d.t_loss_fraction);
    read_into(j, "t_reinjection_fraction", d.t_reinjection_fraction);
    read_into(j, "gamma_p_values", d.gamma_p_values);
    if (d.mode != "compare" && d.mode != "protocol" && d.mode != "gamma-p")
        throw ConfigError("dynamics.mode must be 'compare', 'protocol' or 'gamma-p'");
    if (d.samples < 2)
        throw ConfigError("dynamics.samples must be at least 2");
    if (!(d.periods > 0.0))
        throw ConfigError("dynamics.periods must be positive");
}

void apply_validity(const json& j, ValidityConfig& v) {
    reject_unknown(j,
                   {"r_ij", "r_imu", "n_theta", "threshold", "gamma_hz", "nf_r_min_m",
                    "nf_r_max_m", "nf_points"},
                   "validity");
    read_into(j, "r_ij", v.r_ij);
    read_into(j, "r_imu", v.r_imu);
    read_into(j, "n_theta", v.n_theta);
    read_into(j, "threshold", v.threshold);
    read_into(j, "gamma_hz", v.gamma_hz);
    read_into(j, "nf_r_min_m", v.nf_r_min_m);
    read_into(j, "nf_r_max_m", v.nf_r_max_m);
    read_into(j, "nf_points", v.nf_points);
    if (v.n_theta < 1 || v.nf_points < 1)
        throw ConfigError("validity sweep must contain at least one point");
}

void apply_config_file(const std::string& path, RunConfig& config) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& ex) {
        throw ConfigError("config file " + path + " is not valid JSON: " + ex.what());
    }
    reject_unknown(j, {"params", "regime", "out", "geometry", "fit", "scan", "dynamics",
                       "validity"},
                   "config");
    if (j.contains("params"))
        config.params = params_with_overrides(config.params, j.at("params"));
    if (j.contains("regime"))
        config.regime = regime_from_string(j.at("regime").get<std::string>());
    read_into(j, "out", config.out);
    if (j.contains("geometry"))
        apply_geometry(j.at("geometry"), config.geometry);
    if (j.contains("fit"))
        apply_fit(j.at("fit"), config.fit);
    if (j.contains("scan"))
        apply_scan(j.at("scan"), config.scan);
    if (j.contains("dynamics"))
        apply_dynamics(j.at("dynamics"), config.dynamics);
    if (j.contains("validity"))
        apply_validity(j.at("validity"), config.validity);
}

json resolved_config(const std::string& command, const RunConfig& c) {
    json geometry{{"kind", c.geometry.kind},
                  {"n_main", c.geometry.n_main},
                  {"spacing", c.geometry.spacing},
                  {"r_ij", c.geometry.r_ij},
                  {"r_imu", c.geometry.relay_distance()},
                  {"theta_imu", c.geometry.theta_imu},
                  {"min_distance", c.geometry.min_distance}};
    json fit{{"r_min", c.fit.r_min},
             {"r_max", c.fit.r_max},
             {"r_step", c.fit.r_step},
             {"sep_min", c.fit.sep_min},
             {"sep_max", c.fit.sep_max}};
    json scan{{"kind", c.scan.kind == ScanKind::Pair ? "pair" : "chain"},
              {"n_r", c.scan.n_r},
              {"n_theta", c.scan.n_theta},
              {"r_min", c.scan.r_min},
              {"r_max", c.scan.r_max},
              {"theta_min", c.scan.theta_min},
              {"theta_max", c.scan.theta_max},
              {"fit_r_min", c.scan.fit_r_min},
              {"fit_r_max", c.scan.fit_r_max},
              {"fit_r_step", c.scan.fit_r_step},
              {"chain_length", c.scan.chain_length},
              {"chain_spacing", c.scan.chain_spacing},
              {"fit_sep_min", c.scan.fit_sep_min},
              {"fit_sep_max", c.scan.fit_sep_max},
              {"strength_separation", c.scan.strength_separation},
              {"min_distance", c.scan.min_distance},
              {"min_coupling", c.scan.min_coupling}};
    json dynamics{{"mode", c.dynamics.mode},
                  {"site", c.dynamics.site},
                  {"periods", c.dynamics.periods},
                  {"samples", c.dynamics.samples},
                  {"tol", c.dynamics.tol},
                  {"omega_up", c.dynamics.omega_up},
                  {"t_loss_fraction", c.dynamics.t_loss_fraction},
                  {"t_reinjection_fraction", c.dynamics.t_reinjection_fraction},
                  {"gamma_p_values", c.dynamics.gamma_p_values}};
    json validity{{"r_ij", c.validity.r_ij},
                  {"r_imu", c.validity.r_imu},
                  {"n_theta", c.validity.n_theta},
                  {"threshold", c.validity.threshold},
                  {"gamma_hz", c.validity.gamma_hz},
                  {"nf_r_min_m", c.validity.nf_r_min_m},
                  {"nf_r_max_m", c.validity.nf_r_max_m},
                  {"nf_points", c.validity.nf_points}};
    return json{{"command", command},
                {"regime", to_string(c.regime)},
                {"out", c.out},
                {"params", to_json(c.params)},
                {"geometry", geometry},
                {"fit", fit},
                {"scan", scan},
                {"dynamics", dynamics},
                {"validity", validity}};
}

// All output files of a command are staged in memory and written together,
// each atomically, so failures never leave partial results.
struct OutputSet {
    fs::path dir;
    std::vector<std::pair<fs::path, std::string>> files;

    void add(const std::string& name, std::string content) {
        files.emplace_back(dir / name, std::move(content));
    }
    void add_json(const std::string& name, const json& j) {
        add(name, j.dump(2) + "\n");
    }
    void write() const {
        for (const auto& [path, content] : files)
            write_text_atomic(path, content);
    }
};

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        v[static_cast<std::size_t>(i)] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
    return v;
}

AtomArray pair_from_config(const GeometryConfig& g, double r_ij) {
    return build_pair_mirrored(r_ij, g.relay_distance(), g.theta_imu, g.min_distance);
}

int cmd_couplings(const RunConfig& config) {
    OutputSet out{config.out, {}};
    out.add_json("config.json", resolved_config("couplings", config));
    const PhysicalParams& params = config.params;
    params.validate();

    if (config.geometry.kind == "pair") {
        std::vector<double> rs, abs_j, gamma_room, gamma_cryo;
        std::vector<std::pair<double, double>> points;
        for (double r = config.fit.r_min; r <= config.fit.r_max + 1e-9;
             r += config.fit.r_step) {
            const AtomArray array = pair_from_config(config.geometry, r);
            const double j01 = std::abs(effective_couplings(array, params, config.regime)(0, 1));
            rs.push_back(r);
            abs_j.push_back(j01);
            gamma_room.push_back(effective_decay(array, params, Regime::Room).maxCoeff());
            gamma_cryo.push_back(effective_decay(array, params, Regime::Cryo).maxCoeff());
            points.emplace_back(r, j01);
        }
        const PowerLawFit fit = fit_power_law(points, config.fit.r_min, config.fit.r_max);
        out.add("couplings_pair.csv",
                csv_table({"r_ij", "abs_J_mhz", "gamma_eff_room_mhz", "gamma_eff_cryo_mhz"},
                          {rs, abs_j, gamma_room, gamma_cryo}));
        json fit_doc = to_json(fit);
        fit_doc["gamma_eff_room_mhz"] = gamma_room.back();
        fit_doc["gamma_eff_cryo_mhz"] = gamma_cryo.back();
        out.add_json("fit.json", fit_doc);
    } else {
        const AtomArray array =
            build_chain_mirrored(config.geometry.n_main, config.geometry.spacing,
                                 config.geometry.relay_distance(),
                                 config.geometry.theta_imu,
                                 config.geometry.min_distance);
        const EffectiveModel model = build_effective_model(array, params, config.regime);
        const auto averages = average_coupling_by_separation(model.coupling);
        std::vector<double> separation, mean_abs;
        std::vector<std::pair<double, double>> points;
        for (const auto& [d, value] : averages) {
            separation.push_back(d);
            mean_abs.push_back(value);
            points.emplace_back(static_cast<double>(d), value);
        }
        const PowerLawFit fit =
            fit_power_law(points, config.fit.sep_min, config.fit.sep_max);
        out.add("couplings_chain.csv",
                csv_table({"separation", "mean_abs_J_mhz"}, {separation, mean_abs}));
        json fit_doc = to_json(fit);
        fit_doc["gamma_eff_room_mhz"] =
            effective_decay(array, params, Regime::Room).mean();
        fit_doc["gamma_eff_cryo_mhz"] =
            effective_decay(array, params, Regime::Cryo).mean();
        out.add_json("fit.json", fit_doc);
        out.add("coupling_matrix.csv", coupling_matrix_csv(model.coupling));
        out.add_json("effective_model.json", to_json(model));
    }
    out.write();
    return 0;
}

int cmd_scan(const RunConfig& config) {
    OutputSet out{config.out, {}};
    out.add_json("config.json", resolved_config("scan", config));
    const ScanResult scan = exponent_scan(config.scan, config.params, config.regime);
    out.add("scan.csv", scan_to_csv(scan));
    std::size_t succeeded = 0;
    for (const ScanPoint& p : scan.points)
        succeeded += p.ok ? 1 : 0;
    out.write();
    const double fraction =
        static_cast<double>(succeeded) / static_cast<double>(scan.points.size());
    if (fraction < 0.9) {
        std::fprintf(stderr, "scan: only %.1f%% of grid points succeeded\n",
                     100.0 * fraction);
        return 3;
    }
    return 0;
}

int cmd_dynamics(const RunConfig& config) {
    OutputSet out{config.out, {}};
    out.add_json("config.json", resolved_config("dynamics", config));
    const PhysicalParams& params = config.params;
    const DynamicsConfig& dyn = config.dynamics;
    const AtomArray array = pair_from_config(config.geometry, config.geometry.r_ij);
    const EffectiveModel model = build_effective_model(array, params, config.regime);
    const double coupling = std::abs(model.coupling(0, 1));
    if (!(coupling > 0.0))
        throw ConfigError("effective coupling vanishes; no exchange period exists");
    const double period = 1.0 / (2.0 * coupling);
    const std::vector<double> times = linspace(0.0, dyn.periods * period, dyn.samples);

    if (dyn.mode == "compare") {
        const CompareResult result = compare_full_vs_effective(
            array, params, dyn.site, times, config.regime, dyn.tol);
        out.add("full.csv", trajectory_to_csv(result.full));
        out.add("effective.csv", trajectory_to_csv(result.effective));
        out.add_json("deviation.json",
                     json{{"max_abs_deviation", result.max_abs_deviation},
                          {"exchange_period_us", period},
                          {"coupling_mhz", model.coupling(0, 1)}});
    } else if (dyn.mode == "protocol") {
        const double t_loss = dyn.t_loss_fraction * period;
        const double t_reinjection = dyn.t_reinjection_fraction * period;
        const ProtocolResult result = loss_repump_protocol(
            array, params, t_loss, t_reinjection, times, config.regime, dyn.tol);
        out.add("protocol_no_loss.csv", trajectory_to_csv(result.no_loss));
        out.add("protocol_loss.csv", trajectory_to_csv(result.loss));
        out.add("protocol_repump.csv", trajectory_to_csv(result.repump));
        out.add("protocol_fidelity.csv",
                csv_table({"time_us", "fidelity_loss", "fidelity_repump"},
                          {times, result.fidelity_loss, result.fidelity_repump}));
        out.add_json("protocol.json", json{{"t_loss_us", t_loss},
                                           {"t_reinjection_us", t_reinjection},
                                           {"exchange_period_us", period}});
    } else { // gamma-p sweep
        const CompositeSpace space = CompositeSpace::for_array(array);
        const SparseOp h = build_full_hamiltonian(array, params, dyn.omega_up);
        const auto observables = up_population_observables(space, array.num_main());
        const QuantumState rho0 = excitation_state_full(space, array, dyn.site);
        std::optional<Trajectory> reference;
        json summary = json::array();
        for (double gamma_p : dyn.gamma_p_values) {
            const auto jumps =
                build_jump_operators(array, params, config.regime, gamma_p);
            const Trajectory trajectory = evolve_master_equation(
                space, h, jumps, rho0, times, observables, dyn.tol);
            char name[64];
            std::snprintf(name, sizeof(name), "gamma_p_%g.csv", gamma_p);
            out.add(name, trajectory_to_csv(trajectory));
            double deviation = 0.0;
            if (!reference) {
                reference = trajectory;
            } else {
                for (int i = 0; i < array.num_main(); ++i) {
                    const auto a = reference->series_for("p_up_" + std::to_string(i));
                    const auto b = trajectory.series_for("p_up_" + std::to_string(i));
                    deviation = std::max(deviation, (a - b).cwiseAbs().maxCoeff());
                }
            }
            summary.push_back(json{{"gamma_p_mhz", gamma_p},
                                   {"max_abs_deviation_from_first", deviation}});
        }
        out.add_json("gamma_p_summary.json", summary);
    }
    out.write();
    return 0;
}

int cmd_validity(const RunConfig& config) {
    OutputSet out{config.out, {}};
    out.add_json("config.json", resolved_config("validity", config));
    const PhysicalParams& params = config.params;
    const ValidityConfig& v = config.validity;

    // adiabaticity sweep over the relay angle (varies the relay separation)
    std::vector<double> thetas = linspace(0.0, kPi, v.n_theta);
    std::vector<double> col_theta, col_rmn, col_lambda, col_delta, col_j, col_gamma,
        col_ratio, col_valid;
    for (double theta : thetas) {
        AtomArray array = build_pair_mirrored(v.r_ij, v.r_imu, theta,
                                              config.geometry.min_distance);
        const PairGeometry relay_pair =
            pair_geometry(array, array.relay_index(0), array.relay_index(1));
        const AdiabaticityReport report =
            adiabaticity_report(array, params, config.regime, v.threshold);
        col_theta.push_back(theta);
        col_rmn.push_back(relay_pair.r);
        col_lambda.push_back(report.lambda_lowest);
        col_delta.push_back(report.max_abs_delta_eff);
        col_j.push_back(report.max_abs_coupling);
        col_gamma.push_back(report.max_gamma_eff);
        col_ratio.push_back(report.ratio);
        col_valid.push_back(report.valid ? 1.0 : 0.0);
    }
    out.add("adiabaticity.csv",
            csv_table({"theta_imu", "r_munu", "lambda_lowest_mhz", "max_abs_delta_eff_mhz",
                       "max_abs_J_mhz", "max_gamma_eff_mhz", "ratio", "valid"},
                      {col_theta, col_rmn, col_lambda, col_delta, col_j, col_gamma,
                       col_ratio, col_valid}));

    // near-field vs full coupling over distance, at pi/2 and the magic angle
    std::vector<double> col_r, col_angle, col_nf, col_full_re, col_full_im;
    const double log_lo = std::log10(v.nf_r_min_m);
    const double log_hi = std::log10(v.nf_r_max_m);
    for (double theta : {kPi / 2.0, magic_angle()}) {
        for (int k = 0; k < v.nf_points; ++k) {
            const double r =
                std::pow(10.0, v.nf_points == 1
                                   ? log_lo
                                   : log_lo + (log_hi - log_lo) * k / (v.nf_points - 1));
            const ComplexEnergy full =
                full_dd_coupling(v.gamma_hz, v.gamma_hz, params.lambda_mn, r, theta);
            col_r.push_back(r);
            col_angle.push_back(theta);
            col_nf.push_back(near_field_limit(v.gamma_hz, v.gamma_hz, params.lambda_mn,
                                              r, theta));
            col_full_re.push_back(full.real());
            col_full_im.push_back(full.imag());
        }
    }
    out.add("nf_vs_full.csv",
            csv_table({"r_m", "theta", "nf_mhz", "full_re_mhz", "full_im_mhz"},
                      {col_r, col_angle, col_nf, col_full_re, col_full_im}));
    out.write();
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Relay-mediated dipolar interaction engineering for atom arrays"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string regime_name;
    app.add_option("--config", config_path, "JSON config file")->expected(1);
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--regime", regime_name, "temperature regime: room|cryo");

    RunConfig config;

    auto* couplings = app.add_subcommand("couplings", "pair |J|(r_ij) or chain mean |J| vs separation, with power-law fit");
    std::string geo_kind;
    double opt_r_imu = 0, opt_theta_imu = 0, opt_spacing = 0;
    int opt_n = 0;
    couplings->add_option("--kind", geo_kind, "pair|chain");
    couplings->add_option("--r-imu", opt_r_imu, "relay distance (um)");
    couplings->add_option("--theta-imu", opt_theta_imu, "relay polar angle (rad)");
    couplings->add_option("--n", opt_n, "chain length");
    couplings->add_option("--spacing", opt_spacing, "chain spacing (um)");

    auto* scan = app.add_subcommand("scan", "power-law exponent over the relay placement grid");
    std::string scan_kind;
    int opt_n_r = 0, opt_n_theta = 0;
    scan->add_option("--kind", scan_kind, "pair|chain");
    scan->add_option("--n-r", opt_n_r, "grid points in r_imu");
    scan->add_option("--n-theta", opt_n_theta, "grid points in theta_imu");

    auto* dynamics = app.add_subcommand("dynamics", "full vs effective evolution, loss protocol, dephasing sweep");
    std::string dyn_mode;
    double opt_r_ij = 0;
    dynamics->add_option("--mode", dyn_mode, "compare|protocol|gamma-p");
    dynamics->add_option("--r-ij", opt_r_ij, "main-atom separation (um)");
    dynamics->add_option("--r-imu", opt_r_imu, "relay distance (um)");
    dynamics->add_option("--theta-imu", opt_theta_imu, "relay polar angle (rad)");

    auto* validity = app.add_subcommand("validity", "adiabaticity sweep and near-field validity data");

    CLI11_PARSE(app, argc, argv);

    try {
        if (!config_path.empty())
            apply_config_file(config_path, config);
        if (!out_dir.empty())
            config.out = out_dir;
        if (!regime_name.empty())
            config.regime = regime_from_string(regime_name);
        config.params.validate();

        if (couplings->parsed()) {
            if (!geo_kind.empty()) {
                if (geo_kind != "pair" && geo_kind != "chain")
                    throw ConfigError("--kind must be 'pair' or 'chain'");
                config.geometry.kind = geo_kind;
            }
            if (couplings->count("--r-imu"))
                config.geometry.r_imu = opt_r_imu;
            if (couplings->count("--theta-imu"))
                config.geometry.theta_imu = opt_theta_imu;
            if (couplings->count("--n"))
                config.geometry.n_main = opt_n;
            if (couplings->count("--spacing"))
                config.geometry.spacing = opt_spacing;
            return cmd_couplings(config);
        }
        if (scan->parsed()) {
            if (!scan_kind.empty()) {
                if (scan_kind == "pair")
                    config.scan = ScanConfig::pair_defaults();
                else if (scan_kind == "chain")
                    config.scan = ScanConfig::chain_defaults();
                else
                    throw ConfigError("--kind must be 'pair' or 'chain'");
            }
            if (scan->count("--n-r"))
                config.scan.n_r = opt_n_r;
            if (scan->count("--n-theta"))
                config.scan.n_theta = opt_n_theta;
            return cmd_scan(config);
        }
        if (dynamics->parsed()) {
            if (!dyn_mode.empty())
                config.dynamics.mode = dyn_mode;
            if (dynamics->count("--r-ij"))
                config.geometry.r_ij = opt_r_ij;
            if (dynamics->count("--r-imu"))
                config.geometry.r_imu = opt_r_imu;
            if (dynamics->count("--theta-imu"))
                config.geometry.theta_imu = opt_theta_imu;
            if (config.dynamics.mode != "compare" && config.dynamics.mode != "protocol" &&
                config.dynamics.mode != "gamma-p")
                throw ConfigError("dynamics.mode must be 'compare', 'protocol' or 'gamma-p'");
            return cmd_dynamics(config);
        }
        if (validity->parsed())
            return cmd_validity(config);
        return 2;
    } catch (const ConfigError& ex) {
        std::fprintf(stderr, "config error: %s\n", ex.what());
        return 2;
    } catch (const GeometryError& ex) {
        std::fprintf(stderr, "geometry error: %s\n", ex.what());
        return 2;
    } catch (const EliminationError& ex) {
        std::fprintf(stderr, "elimination error: %s\n", ex.what());
        return 3;
    } catch (const IntegrationError& ex) {
        std::fprintf(stderr, "integration error: %s\n", ex.what());
        return 4;
    } catch (const std::invalid_argument& ex) {
        std::fprintf(stderr, "invalid argument: %s\n", ex.what());
        return 2;
    } catch (const std::domain_error& ex) {
        std::fprintf(stderr, "domain error: %s\n", ex.what());
        return 2;
    } catch (const std::exception& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return 1;
    }
}
