#ifndef RYDRELAY_COUPLINGS_HPP
#define RYDRELAY_COUPLINGS_HPP

#include <complex>

#include <Eigen/Core>

#include "rydrelay/geometry.hpp"
#include "rydrelay/params.hpp"

namespace rydrelay {

/// Coherent shift (re) and dissipative part (im), both in MHz.
using ComplexEnergy = std::complex<double>;

/// Near-field dipole-dipole coupling C3 (3cos²θ - 1) / r³ in MHz,
/// with C3 in MHz·μm³ and r in μm. Throws std::domain_error for r <= 0.
double near_field_coupling(double c3, double r, double theta);

/// Full (near- plus far-field) dipole-dipole coupling in MHz for two
/// emitters with linewidths gamma_i, gamma_j (Hz), transition wavelength
/// lambda (m) and separation r (m):
///   V = -3/2 sqrt(γiγj) [ sin²θ e^{iξ}/ξ + (3cos²θ-1)(e^{iξ}/ξ³ - i e^{iξ}/ξ²) ],
/// ξ = 2πr/λ.
ComplexEnergy full_dd_coupling(double gamma_i_hz, double gamma_j_hz,
                               double lambda_m, double r_m, double theta);

/// ξ→0 limit of full_dd_coupling (its near-field term), in MHz. Used for the
/// near-field validity study.
double near_field_limit(double gamma_i_hz, double gamma_j_hz,
                        double lambda_m, double r_m, double theta);

/// Förster detuning Δ(F) = delta0 + (p2_beta_alpha - p2_up_down) F², MHz.
double forster_detuning(const PhysicalParams& params);

/// Returns params with delta0 chosen so that Δ(f_resonance) = 0 exactly.
PhysicalParams calibrate_delta0(PhysicalParams params, double f_resonance);

/// Vector of main-relay couplings (V_i)_μ = V(C3_up_alpha, r_iμ, θ_iμ) in MHz
/// for main atom i against every relay, length N_R.
Eigen::VectorXd coupling_vector(const AtomArray& array, const PhysicalParams& params,
                                int main_index);

/// Complex symmetric relay matrix M with (Δ - iγ) on the diagonal and the
/// relay-relay near-field couplings off-diagonal; γ is the relay dissipation
/// rate of the regime.
Eigen::MatrixXcd relay_matrix(const AtomArray& array, const PhysicalParams& params,
                              Regime regime = Regime::Room);

} // namespace rydrelay

#endif
