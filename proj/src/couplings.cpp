#include "rydrelay/couplings.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rydrelay {

double near_field_coupling(double c3, double r, double theta) {
    if (!(r > 0.0))
        throw std::domain_error("near-field coupling requires r > 0");
    const double c = std::cos(theta);
    return c3 * (3.0 * c * c - 1.0) / (r * r * r);
}

ComplexEnergy full_dd_coupling(double gamma_i_hz, double gamma_j_hz,
                               double lambda_m, double r_m, double theta) {
    if (!(r_m > 0.0))
        throw std::domain_error("full dipole-dipole coupling requires r > 0");
    if (!(lambda_m > 0.0))
        throw std::domain_error("full dipole-dipole coupling requires lambda > 0");
    const double xi = 2.0 * std::numbers::pi * r_m / lambda_m;
    const double c = std::cos(theta);
    const double s2 = 1.0 - c * c;
    const double angular = 3.0 * c * c - 1.0;
    const std::complex<double> phase = std::exp(std::complex<double>(0.0, xi));
    const std::complex<double> far = s2 * phase / xi;
    const std::complex<double> near =
        angular * (phase / (xi * xi * xi) -
                   std::complex<double>(0.0, 1.0) * phase / (xi * xi));
    const double prefactor = -1.5 * std::sqrt(gamma_i_hz * gamma_j_hz);
    return prefactor * (far + near) * 1e-6; // Hz → MHz
}

double near_field_limit(double gamma_i_hz, double gamma_j_hz,
                        double lambda_m, double r_m, double theta) {
    if (!(r_m > 0.0) || !(lambda_m > 0.0))
        throw std::domain_error("near-field limit requires r > 0 and lambda > 0");
    const double xi = 2.0 * std::numbers::pi * r_m / lambda_m;
    const double c = std::cos(theta);
    const double angular = 3.0 * c * c - 1.0;
    return -1.5 * std::sqrt(gamma_i_hz * gamma_j_hz) * angular / (xi * xi * xi) * 1e-6;
}

double forster_detuning(const PhysicalParams& params) {
    return params.delta0 + (params.p2_beta_alpha - params.p2_up_down) * params.F * params.F;
}

PhysicalParams calibrate_delta0(PhysicalParams params, double f_resonance) {
    if (f_resonance < 0.0)
        throw std::domain_error("resonance field must be nonnegative");
    params.delta0 =
        -(params.p2_beta_alpha - params.p2_up_down) * f_resonance * f_resonance;
    return params;
}

Eigen::VectorXd coupling_vector(const AtomArray& array, const PhysicalParams& params,
                                int main_index) {
    if (main_index < 0 || main_index >= array.num_main())
        throw std::out_of_range("coupling vector requires a main-atom index");
    const int n_relay = array.num_relay();
    Eigen::VectorXd v(n_relay);
    for (int k = 0; k < n_relay; ++k) {
        const PairGeometry g = pair_geometry(array, main_index, array.relay_index(k));
        v(k) = near_field_coupling(params.C3_up_alpha, g.r, g.theta);
    }
    return v;
}

Eigen::MatrixXcd relay_matrix(const AtomArray& array, const PhysicalParams& params,
                              Regime regime) {
    const int n_relay = array.num_relay();
    if (n_relay < 1)
        throw GeometryError("relay matrix requires at least one relay atom");
    const std::complex<double> diagonal(forster_detuning(params),
                                        -params.relay_decay_mhz(regime));
    Eigen::MatrixXcd m(n_relay, n_relay);
    for (int a = 0; a < n_relay; ++a) {
        m(a, a) = diagonal;
        for (int b = a + 1; b < n_relay; ++b) {
            const PairGeometry g =
                pair_geometry(array, array.relay_index(a), array.relay_index(b));
            const double v = near_field_coupling(params.C3_beta_alpha, g.r, g.theta);
            m(a, b) = v;
            m(b, a) = v;
        }
    }
    return m;
}

} // namespace rydrelay
