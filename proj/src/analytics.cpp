#include "rydrelay/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>

#include "rydrelay/io.hpp"

namespace rydrelay {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// Reduced parameters of the mirrored configuration; the cross coupling from
// relay to far main atom is C3 (B r + C) / (2 r_jμ^5) with
// r_jμ² = r_ij² (1 + D/r_ij + E/r_ij²).
struct ReducedParams {
    double b, c, d, e;
};

ReducedParams reduced_params(double r_imu, double theta_imu, double theta_ij) {
    const double beta_imu = theta_imu - std::numbers::pi / 2.0;
    const double beta_ij = theta_ij - std::numbers::pi / 2.0;
    ReducedParams p{};
    p.b = -2.0 * r_imu * std::cos(beta_imu - beta_ij) +
          6.0 * r_imu * std::cos(beta_imu + beta_ij);
    p.c = -3.0 * r_imu * r_imu * std::cos(2.0 * beta_imu) + r_imu * r_imu;
    p.d = -2.0 * r_imu * std::cos(beta_imu - beta_ij);
    p.e = r_imu * r_imu;
    return p;
}

} // namespace

double mirrored_pair_closed_form(double r_ij, double r_imu, double theta_imu,
                                 double theta_ij, double delta, double c3) {
    if (!(r_ij > 0.0))
        throw std::domain_error("closed form requires r_ij > 0");
    if (delta == 0.0)
        throw Error("closed form is undefined on resonance (Δ = 0)");
    const ReducedParams p = reduced_params(r_imu, theta_imu, theta_ij);
    const double radicand = 1.0 + p.d / r_ij + p.e / (r_ij * r_ij);
    if (!(radicand > 0.0))
        throw GeometryError("geometry singularity: relay coincides with the far main atom");
    const double bracket = (p.b / r_ij + p.c / (r_ij * r_ij)) /
                           (2.0 * r_ij * r_ij * r_ij * std::pow(radicand, 2.5));
    const double prefactor = near_field_coupling(c3, r_imu, theta_imu);
    return -2.0 / delta * prefactor * c3 * bracket;
}

double mirrored_pair_taylor(double r_ij, double r_imu, double theta_imu,
                            double theta_ij, double delta, double c3, int order) {
    if (!(r_ij > 0.0))
        throw std::domain_error("taylor expansion requires r_ij > 0");
    if (delta == 0.0)
        throw Error("taylor expansion is undefined on resonance (Δ = 0)");
    if (order < 4 || order > 6)
        throw std::invalid_argument("taylor order must be 4, 5 or 6");
    const ReducedParams p = reduced_params(r_imu, theta_imu, theta_ij);
    const double a4 = 0.5 * p.b;
    const double a5 = 0.5 * p.c - 1.25 * p.b * p.d;
    const double a6 = -(0.5 * p.b * (2.5 * p.e - 35.0 / 8.0 * p.d * p.d) +
                        1.25 * p.c * p.d);
    const double r4 = r_ij * r_ij * r_ij * r_ij;
    double series = a4 / r4;
    if (order >= 5)
        series += a5 / (r4 * r_ij);
    if (order >= 6)
        series += a6 / (r4 * r_ij * r_ij);
    const double prefactor = near_field_coupling(c3, r_imu, theta_imu);
    return -2.0 / delta * prefactor * c3 * series;
}

PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& points,
                          double window_min, double window_max) {
    if (!(window_min < window_max))
        throw std::invalid_argument("fit window must be nonempty");
    std::vector<double> lx, ly;
    int dropped = 0;
    for (const auto& [x, y] : points) {
        if (x < window_min || x > window_max)
            continue;
        if (!(x > 0.0) || !(y > 0.0)) {
            ++dropped;
            continue;
        }
        lx.push_back(std::log10(x));
        ly.push_back(std::log10(y));
    }
    const int n = static_cast<int>(lx.size());
    if (n < 4)
        throw std::invalid_argument("power-law fit needs at least 4 positive points in the window, got " +
                                    std::to_string(n));

    double mx = 0.0, my = 0.0;
    for (int i = 0; i < n; ++i) {
        mx += lx[static_cast<std::size_t>(i)];
        my += ly[static_cast<std::size_t>(i)];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (int i = 0; i < n; ++i) {
        const double dx = lx[static_cast<std::size_t>(i)] - mx;
        sxx += dx * dx;
        sxy += dx * (ly[static_cast<std::size_t>(i)] - my);
    }
    if (!(sxx > 0.0))
        throw std::invalid_argument("power-law fit requires at least two distinct abscissae");
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;

    double ss = 0.0;
    for (int i = 0; i < n; ++i) {
        const double resid = ly[static_cast<std::size_t>(i)] -
                             (intercept + slope * lx[static_cast<std::size_t>(i)]);
        ss += resid * resid;
    }

    PowerLawFit fit;
    fit.amplitude = std::pow(10.0, intercept);
    fit.exponent = -slope;
    fit.rmse = std::sqrt(ss / n);
    fit.window_min = window_min;
    fit.window_max = window_max;
    fit.points_used = n;
    fit.points_dropped = dropped;
    return fit;
}

ScanConfig ScanConfig::pair_defaults() {
    return ScanConfig{};
}

ScanConfig ScanConfig::chain_defaults() {
    ScanConfig config;
    config.kind = ScanKind::Chain;
    config.r_min = 6.0;
    config.r_max = 20.0;
    return config;
}

void ScanConfig::validate() const {
    if (n_r < 1 || n_theta < 1)
        throw ConfigError("scan grid must contain at least one point per axis");
    if (!(r_min > 0.0) || r_max < r_min)
        throw ConfigError("scan requires 0 < r_min <= r_max");
    if (theta_max < theta_min)
        throw ConfigError("scan requires theta_min <= theta_max");
    if (kind == ScanKind::Pair) {
        if (!(fit_r_min > 0.0) || !(fit_r_max > fit_r_min) || !(fit_r_step > 0.0))
            throw ConfigError("pair scan requires a positive fit window and step");
    } else {
        if (chain_length < 2)
            throw ConfigError("chain scan requires at least two main atoms");
        if (!(chain_spacing > 0.0))
            throw ConfigError("chain scan requires positive spacing");
        if (fit_sep_min < 1 || fit_sep_max <= fit_sep_min ||
            fit_sep_max > chain_length - 1)
            throw ConfigError("chain fit window must satisfy 1 <= min < max <= N-1");
        if (strength_separation < 1 || strength_separation > chain_length - 1)
            throw ConfigError("strength separation must lie in 1..N-1");
    }
}

namespace {

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        v[static_cast<std::size_t>(i)] =
            n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
    return v;
}

ScanPoint scan_pair_point(double r_imu, double theta_imu, const ScanConfig& config,
                          const PhysicalParams& params, Regime regime) {
    ScanPoint point;
    point.r_imu = r_imu;
    point.theta_imu = theta_imu;
    point.exponent = kNan;
    point.rmse = kNan;
    point.mean_abs_coupling = kNan;
    try {
        std::vector<std::pair<double, double>> samples;
        double sum_abs = 0.0;
        for (double r = config.fit_r_min; r <= config.fit_r_max + 1e-9;
             r += config.fit_r_step) {
            std::optional<AtomArray> array;
            try {
                array = build_pair_mirrored(r, r_imu, theta_imu, config.min_distance);
            } catch (const GeometryError&) {
                continue; // pathological window sample (relay on top of a main)
            }
            const Eigen::MatrixXd j = effective_couplings(*array, params, regime);
            const double abs_j = std::abs(j(0, 1));
            sum_abs += abs_j;
            if (abs_j >= config.min_coupling)
                samples.emplace_back(r, abs_j);
        }
        const PowerLawFit fit =
            fit_power_law(samples, config.fit_r_min, config.fit_r_max);
        point.exponent = fit.exponent;
        point.rmse = fit.rmse;
        point.mean_abs_coupling =
            samples.empty() ? 0.0 : sum_abs / static_cast<double>(samples.size());
        point.ok = true;
    } catch (const std::exception& ex) {
        point.error = ex.what();
    }
    return point;
}

ScanPoint scan_chain_point(double r_imu, double theta_imu, const ScanConfig& config,
                           const PhysicalParams& params, Regime regime) {
    ScanPoint point;
    point.r_imu = r_imu;
    point.theta_imu = theta_imu;
    point.exponent = kNan;
    point.rmse = kNan;
    point.mean_abs_coupling = kNan;
    try {
        const AtomArray array = build_chain_mirrored(
            config.chain_length, config.chain_spacing, r_imu, theta_imu,
            config.min_distance);
        const Eigen::MatrixXd j = effective_couplings(array, params, regime);
        const auto averages = average_coupling_by_separation(j);
        std::vector<std::pair<double, double>> samples;
        samples.reserve(averages.size());
        for (const auto& [d, value] : averages) {
            if (value >= config.min_coupling)
                samples.emplace_back(static_cast<double>(d), value);
        }
        const PowerLawFit fit = fit_power_law(
            samples, static_cast<double>(config.fit_sep_min),
            static_cast<double>(config.fit_sep_max));
        point.exponent = fit.exponent;
        point.rmse = fit.rmse;
        point.mean_abs_coupling =
            averages[static_cast<std::size_t>(config.strength_separation - 1)].second;
        point.ok = true;
    } catch (const std::exception& ex) {
        point.error = ex.what();
    }
    return point;
}

} // namespace

ScanResult exponent_scan(const ScanConfig& config, const PhysicalParams& params,
                         Regime regime) {
    config.validate();
    params.validate();

    const std::vector<double> rs = linspace(config.r_min, config.r_max, config.n_r);
    const std::vector<double> thetas =
        linspace(config.theta_min, config.theta_max, config.n_theta);

    ScanResult result;
    result.kind = config.kind;
    result.points.resize(rs.size() * thetas.size());

    const int total = static_cast<int>(result.points.size());
#pragma omp parallel for schedule(dynamic)
    for (int idx = 0; idx < total; ++idx) {
        const double r = rs[static_cast<std::size_t>(idx) / thetas.size()];
        const double theta = thetas[static_cast<std::size_t>(idx) % thetas.size()];
        result.points[static_cast<std::size_t>(idx)] =
            config.kind == ScanKind::Pair
                ? scan_pair_point(r, theta, config, params, regime)
                : scan_chain_point(r, theta, config, params, regime);
    }

    if (config.kind == ScanKind::Pair) {
        const std::vector<bool> mask =
            exclusion_mask(result, params, regime, 25.0, config.min_distance);
        for (std::size_t i = 0; i < mask.size(); ++i)
            result.points[i].excluded = mask[i];
    }
    return result;
}

std::vector<bool> exclusion_mask(const ScanResult& scan, const PhysicalParams& params,
                                 Regime regime, double r_cut, double min_distance) {
    if (scan.kind != ScanKind::Pair)
        throw std::invalid_argument("exclusion mask is defined for pair scans only");
    std::vector<bool> mask(scan.points.size(), false);
    const int total = static_cast<int>(scan.points.size());
#pragma omp parallel for schedule(dynamic)
    for (int idx = 0; idx < total; ++idx) {
        const ScanPoint& point = scan.points[static_cast<std::size_t>(idx)];
        bool excluded;
        try {
            const AtomArray array = build_pair_mirrored(r_cut, point.r_imu,
                                                        point.theta_imu, min_distance);
            const double abs_j =
                std::abs(effective_couplings(array, params, regime)(0, 1));
            const double gamma = effective_decay(array, params, regime).maxCoeff();
            excluded = abs_j < gamma;
        } catch (const std::exception&) {
            excluded = true; // cannot certify coupling strength at r_cut
        }
        mask[static_cast<std::size_t>(idx)] = excluded;
    }
    return mask;
}

std::vector<std::pair<int, double>> average_coupling_by_separation(
    const Eigen::MatrixXd& coupling) {
    const int n = static_cast<int>(coupling.rows());
    if (coupling.cols() != n)
        throw std::invalid_argument("coupling matrix must be square");
    std::vector<std::pair<int, double>> averages;
    averages.reserve(static_cast<std::size_t>(std::max(0, n - 1)));
    for (int d = 1; d < n; ++d) {
        double sum = 0.0;
        for (int i = 0; i + d < n; ++i)
            sum += std::abs(coupling(i, i + d));
        averages.emplace_back(d, sum / static_cast<double>(n - d));
    }
    return averages;
}

std::string scan_to_csv(const ScanResult& scan) {
    std::vector<std::vector<double>> columns(6);
    for (const ScanPoint& p : scan.points) {
        columns[0].push_back(p.r_imu);
        columns[1].push_back(p.theta_imu);
        columns[2].push_back(p.exponent);
        columns[3].push_back(p.rmse);
        columns[4].push_back(p.mean_abs_coupling);
        columns[5].push_back(p.excluded ? 1.0 : 0.0);
    }
    return csv_table({"r_imu", "theta_imu", "b", "rmse", "mean_abs_J", "excluded"},
                     columns);
}

nlohmann::json to_json(const PowerLawFit& fit) {
    return nlohmann::json{{"amplitude", fit.amplitude},
                          {"exponent", fit.exponent},
                          {"rmse", fit.rmse},
                          {"window", {fit.window_min, fit.window_max}},
                          {"points_used", fit.points_used},
                          {"points_dropped", fit.points_dropped}};
}

} // namespace rydrelay
