#ifndef RYDRELAY_ANALYTICS_HPP
#define RYDRELAY_ANALYTICS_HPP

#include <string>
#include <utility>
#include <vector>

#include "rydrelay/effective.hpp"

namespace rydrelay {

/// Result of fitting |J| = a / x^b by least squares in log-log space.
struct PowerLawFit {
    double amplitude = 0.0;  // a
    double exponent = 0.0;   // b
    double rmse = 0.0;       // root-mean-square residual in log10(y)
    double window_min = 0.0;
    double window_max = 0.0;
    int points_used = 0;
    int points_dropped = 0;  // nonpositive y inside the window
};

/// Closed-form mirrored-pair coupling in MHz, expressed through the reduced
/// parameters B, C, D, E of the mirrored configuration (β angles measured
/// from the x axis, β = θ - π/2). Exact on the magic-angle main line.
/// Sign matches effective_couplings. Throws GeometryError when the
/// denominator radicand (r_jμ/r_ij)² is not positive.
double mirrored_pair_closed_form(double r_ij, double r_imu, double theta_imu,
                                 double theta_ij, double delta, double c3);

/// Partial sum of the large-r_ij expansion of the closed form through
/// 1/r_ij^order, order in {4, 5, 6}.
double mirrored_pair_taylor(double r_ij, double r_imu, double theta_imu,
                            double theta_ij, double delta, double c3, int order);

/// Ordinary least squares of log10(y) on log10(x) over the window
/// [window_min, window_max]; b = -slope, a = 10^intercept. Nonpositive y
/// inside the window are dropped and counted; fewer than 4 usable points
/// throw std::invalid_argument.
PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& points,
                          double window_min, double window_max);

enum class ScanKind { Pair, Chain };

/// Grid and fit-window settings for exponent scans. Defaults cover the
/// relay placements of interest; see pair_defaults()/chain_defaults().
struct ScanConfig {
    ScanKind kind = ScanKind::Pair;
    int n_r = 60;
    int n_theta = 60;
    double r_min = 5.0;   // μm, relay distance grid
    double r_max = 14.0;
    double theta_min = 0.0;
    double theta_max = 3.14159265358979323846;
    // pair: |J|(r_ij) fit window
    double fit_r_min = 10.0;
    double fit_r_max = 30.0;
    double fit_r_step = 0.5;
    // chain: averaged |J| vs |i-j| fit window and strength separation
    int chain_length = 21;
    double chain_spacing = 10.0;
    int fit_sep_min = 2;
    int fit_sep_max = 10;
    int strength_separation = 8;
    double min_distance = 1.0;      // μm, geometry construction guard
    double min_coupling = 1e-12;    // MHz, |J| below this is dropped from fits

    static ScanConfig pair_defaults();
    static ScanConfig chain_defaults();
    void validate() const;
};

struct ScanPoint {
    double r_imu = 0.0;
    double theta_imu = 0.0;
    double exponent = 0.0;         // b
    double rmse = 0.0;
    double mean_abs_coupling = 0.0; // pair: mean |J| over the fit window; chain: mean |J_{i,i+8}|
    bool excluded = false;
    bool ok = false;
    std::string error;             // empty when ok
};

struct ScanResult {
    ScanKind kind = ScanKind::Pair;
    std::vector<ScanPoint> points; // grid order: r outer, theta inner
};

/// Per grid point: builds the geometry, computes J via the full elimination,
/// fits the power law and records exponent, RMSE and strength. Per-point
/// failures are recorded in the point, never fatal. Pair scans also fill the
/// exclusion flag (r_cut = 25 μm).
ScanResult exponent_scan(const ScanConfig& config, const PhysicalParams& params,
                         Regime regime = Regime::Room);

/// Marks pair-scan grid points whose coupling at r_ij = r_cut is weaker than
/// the effective decay rate there. Throws std::invalid_argument for chain
/// scans.
std::vector<bool> exclusion_mask(const ScanResult& scan, const PhysicalParams& params,
                                 Regime regime = Regime::Room, double r_cut = 25.0,
                                 double min_distance = 1.0);

/// For each separation d = 1..N-1, the arithmetic mean of |J_{i,i+d}|.
std::vector<std::pair<int, double>> average_coupling_by_separation(const Eigen::MatrixXd& coupling);

std::string scan_to_csv(const ScanResult& scan);
nlohmann::json to_json(const PowerLawFit& fit);

} // namespace rydrelay

#endif
