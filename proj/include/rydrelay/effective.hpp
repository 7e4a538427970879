#ifndef RYDRELAY_EFFECTIVE_HPP
#define RYDRELAY_EFFECTIVE_HPP

#include <Eigen/Core>

#include "rydrelay/couplings.hpp"

namespace rydrelay {

/// Validity check of the elimination: the smallest eigenvalue magnitude of
/// B = -iM must dominate the effective energy scales.
struct AdiabaticityReport {
    double lambda_lowest = 0.0;     // MHz, min |eigenvalue of -iM|
    double max_abs_delta_eff = 0.0; // MHz, max |δ_eff - mean(δ_eff)|
    double max_abs_coupling = 0.0;  // MHz, max |J_ij|
    double max_gamma_eff = 0.0;     // MHz
    double ratio = 0.0;             // lambda_lowest / max of the three above
    bool valid = false;             // ratio > threshold
};

/// Result of eliminating the relay atoms: exchange couplings J (symmetric,
/// zero diagonal), per-site detunings and decay rates, plus the validity
/// report.
struct EffectiveModel {
    Eigen::MatrixXd coupling;   // J, N×N, MHz
    Eigen::VectorXd delta_eff;  // MHz
    Eigen::VectorXd gamma_eff;  // MHz
    AdiabaticityReport adiabaticity;
};

/// J_ij = -Re[V_jᵀ M⁻¹ V_i] for i ≠ j, zero diagonal. Solved as one linear
/// system per main atom; throws EliminationError (with the condition number)
/// when the smallest singular value of M drops below 1e-9 of the largest.
Eigen::MatrixXd effective_couplings(const AtomArray& array, const PhysicalParams& params,
                                    Regime regime = Regime::Room);

/// Shortcut neglecting relay-relay interactions,
/// J_ij = -(1/Δ) Σ_μ V_iμ V_jμ, sign matched to effective_couplings.
/// Throws Error at Δ = 0.
Eigen::MatrixXd effective_couplings_diagonal_relay(const AtomArray& array,
                                                   const PhysicalParams& params);

/// δ_eff_i = omega_up_dressed - Re[V_iᵀ M⁻¹ V_i]. The common reference
/// omega_up_dressed only shifts all entries; exchange dynamics sees
/// differences.
Eigen::VectorXd effective_detunings(const AtomArray& array, const PhysicalParams& params,
                                    double omega_up_dressed = 0.0,
                                    Regime regime = Regime::Room);

/// γ_eff_i = γ_main + Im[V_iᵀ M⁻¹ V_i].
Eigen::VectorXd effective_decay(const AtomArray& array, const PhysicalParams& params,
                                Regime regime = Regime::Room);

/// Computes the eigenvalues of B = -iM and compares the smallest magnitude
/// against the effective scales. A singular M reports lambda_lowest ≈ 0 and
/// valid = false instead of throwing.
AdiabaticityReport adiabaticity_report(const AtomArray& array, const PhysicalParams& params,
                                       Regime regime = Regime::Room,
                                       double threshold = 10.0);

EffectiveModel build_effective_model(const AtomArray& array, const PhysicalParams& params,
                                     Regime regime = Regime::Room,
                                     double omega_up_dressed = 0.0,
                                     double threshold = 10.0);

nlohmann::json to_json(const EffectiveModel& model);
/// CSV rows "i,j,value" of the coupling matrix.
std::string coupling_matrix_csv(const Eigen::MatrixXd& coupling);

} // namespace rydrelay

#endif
