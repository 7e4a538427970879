#ifndef RYDRELAY_DYNAMICS_HPP
#define RYDRELAY_DYNAMICS_HPP

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "rydrelay/effective.hpp"

namespace rydrelay {

using SparseOp = Eigen::SparseMatrix<std::complex<double>>;

/// Main atoms carry four levels: the spin states Down/Up plus two spectator
/// circular levels that only collect dissipation. Relays carry two.
struct MainLevel {
    static constexpr int SpectatorDown = 0; // lower circular neighbor
    static constexpr int Down = 1;
    static constexpr int Up = 2;
    static constexpr int SpectatorUp = 3;   // upper circular neighbor
    static constexpr int count = 4;
};

struct RelayLevel {
    static constexpr int Alpha = 0;
    static constexpr int Beta = 1;
    static constexpr int count = 2;
};

/// Product Hilbert space of distinguishable atoms with per-atom level counts.
/// Atom 0 is the most significant digit of the basis index.
class CompositeSpace {
public:
    /// Full model: 4 levels per main atom, 2 per relay.
    static CompositeSpace for_array(const AtomArray& array);
    /// Effective model: n two-level spins (0 = down, 1 = up).
    static CompositeSpace spins(int n);

    int atom_count() const noexcept { return static_cast<int>(dims_.size()); }
    int levels(int atom) const { return dims_.at(static_cast<std::size_t>(atom)); }
    long dimension() const noexcept { return dimension_; }

    /// |to><from| on one atom, identity on all others.
    SparseOp site_operator(int atom, int to, int from) const;
    /// Projector onto level m of one atom.
    SparseOp site_projector(int atom, int m) const { return site_operator(atom, m, m); }

    /// Level of `atom` in product basis state `index`.
    int basis_level(long index, int atom) const;

private:
    explicit CompositeSpace(std::vector<int> dims);
    std::vector<int> dims_;
    std::vector<long> strides_;
    long dimension_ = 1;
};

/// One Lindblad channel sqrt(rate) |to><from| acting on a single atom.
/// from == to describes a projector (dephasing-type) channel.
struct JumpOperatorSpec {
    int atom = 0;
    int from = 0;
    int to = 0;
    double rate_mhz = 0.0;
};

/// Pure state vector or density matrix over a composite space.
struct QuantumState {
    bool pure = true;
    Eigen::VectorXcd psi;  // valid when pure
    Eigen::MatrixXcd rho;  // valid when !pure

    static QuantumState pure_state(Eigen::VectorXcd psi);
    static QuantumState density(Eigen::MatrixXcd rho);
    long dimension() const { return pure ? psi.size() : rho.rows(); }
    /// Checks norm/trace, Hermiticity and positivity tolerances; throws Error.
    void validate() const;
};

/// Product state: one main atom in Up, the rest Down, relays in Alpha.
QuantumState excitation_state_full(const CompositeSpace& space, const AtomArray& array,
                                   int excited_main);
/// Product state of n spins with one site up.
QuantumState excitation_state_spins(int n, int excited_site);

/// Named operator whose expectation value is recorded along a trajectory.
struct Observable {
    std::string name;
    SparseOp op;
};

/// Up-state projectors of every main atom ("p_up_<i>").
std::vector<Observable> up_population_observables(const CompositeSpace& space, int n_main);

/// Time series of observable expectations plus the final state.
struct Trajectory {
    std::vector<double> times;                // μs, strictly increasing
    std::vector<std::string> names;
    Eigen::MatrixXd series;                   // times.size() × names.size()
    QuantumState final_state;

    Eigen::VectorXd series_for(const std::string& name) const;
};

/// Full multi-level Hamiltonian H_0 + exchange terms, entries in MHz.
/// Energies are measured relative to the dressed main transition
/// (omega_up = dressed |Up> energy, default 0): each relay Beta level then
/// sits at omega_up + Δ(F). Spectator levels enter no coherent term.
/// Throws std::invalid_argument when the composite dimension exceeds dim_cap.
SparseOp build_full_hamiltonian(const AtomArray& array, const PhysicalParams& params,
                                double omega_up = 0.0, long dim_cap = 4096);

/// Dissipation channels of the regime: at room temperature all six BBR
/// channels per main atom and both relay microwave channels; at cryogenic
/// temperature only the three spontaneous-emission channels per main atom
/// (and the relay emission channel when gamma_relay_cryo > 0). gamma_p > 0
/// adds the |alpha><alpha| projector channel on every relay.
std::vector<JumpOperatorSpec> build_jump_operators(const AtomArray& array,
                                                   const PhysicalParams& params,
                                                   Regime regime,
                                                   double gamma_p_mhz = 0.0);

/// Integrates d rho/dt = -i 2π [H, rho] + Σ_η (2 L rho L† - {L†L, rho}) with
/// an adaptive embedded Runge-Kutta pair, recording observables at `times`.
/// H is in MHz, rates in MHz, time in μs. Raises IntegrationError when the
/// trace drifts by more than 1e-6.
Trajectory evolve_master_equation(const CompositeSpace& space, const SparseOp& hamiltonian,
                                  const std::vector<JumpOperatorSpec>& jumps,
                                  const QuantumState& rho0, const std::vector<double>& times,
                                  const std::vector<Observable>& observables,
                                  double tol = 1e-8);

/// Schrödinger evolution of a pure state under d psi/dt = -i 2π H psi.
Trajectory evolve_schrodinger(const SparseOp& hamiltonian, const QuantumState& psi0,
                              const std::vector<double>& times,
                              const std::vector<Observable>& observables,
                              double tol = 1e-8);

/// Spin Hamiltonian of the effective model: Σ_{i<j} J_ij (σ_i†σ_j + h.c.)
/// plus the δ_eff diagonal, entries in MHz.
SparseOp build_effective_hamiltonian(const EffectiveModel& model);

/// Evolves the effective spin model. dissipative = false uses the pure-state
/// path (n ≤ 12); dissipative = true evolves a density matrix with per-site
/// Up→Down channels at γ_eff (n ≤ 6).
Trajectory evolve_effective(const EffectiveModel& model, const QuantumState& state0,
                            const std::vector<double>& times, bool dissipative,
                            double tol = 1e-8);

struct CompareResult {
    Trajectory full;
    Trajectory effective;
    double max_abs_deviation = 0.0; // over shared up-population series
};

/// Runs the full master equation and the effective model from the same
/// single-excitation product state and reports the largest up-population
/// deviation.
CompareResult compare_full_vs_effective(const AtomArray& array, const PhysicalParams& params,
                                        int excited_main, const std::vector<double>& times,
                                        Regime regime = Regime::Room, double tol = 1e-8);

struct ProtocolResult {
    Trajectory no_loss;
    Trajectory loss;
    Trajectory repump;
    std::vector<double> fidelity_loss;   // vs no-loss, per time
    std::vector<double> fidelity_repump;
};

/// Relay-loss/repump protocol on the two-spin effective space: evolve with
/// both relays until t_loss, with one relay removed until t_reinjection, then
/// with both again. Requires a mirrored pair array (N = N_R = 2) and
/// t_loss <= t_reinjection.
ProtocolResult loss_repump_protocol(const AtomArray& pair_array, const PhysicalParams& params,
                                    double t_loss, double t_reinjection,
                                    const std::vector<double>& times,
                                    Regime regime = Regime::Room, double tol = 1e-8);

/// Squared overlap |<a|b>|² of two pure states. Mixed input throws Error.
double fidelity(const QuantumState& a, const QuantumState& b);

std::string trajectory_to_csv(const Trajectory& trajectory);
nlohmann::json to_json(const Trajectory& trajectory);

} // namespace rydrelay

#endif
