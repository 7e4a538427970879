#include "rydrelay/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

#include <boost/numeric/odeint.hpp>
#include <boost/numeric/odeint/external/eigen/eigen.hpp>

#include <Eigen/Dense>

#include "rydrelay/io.hpp"

namespace boost::numeric::odeint {

// The stock Eigen adapter returns a complex "norm"; the error checker needs
// a real one.
template <>
struct vector_space_norm_inf<Eigen::VectorXcd> {
    typedef double result_type;
    double operator()(const Eigen::VectorXcd& v) const {
        return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
    }
};

} // namespace boost::numeric::odeint

namespace rydrelay {

namespace ode = boost::numeric::odeint;

using Complex = std::complex<double>;
using Vec = Eigen::VectorXcd;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kTraceTolerance = 1e-6;

using Stepper = ode::runge_kutta_dopri5<Vec, double, Vec, double, ode::vector_space_algebra>;

void check_times(const std::vector<double>& times) {
    if (times.empty())
        throw std::invalid_argument("at least one sample time is required");
    for (std::size_t k = 1; k < times.size(); ++k) {
        if (!(times[k] > times[k - 1]))
            throw std::invalid_argument("sample times must be strictly increasing");
    }
}

template <class Rhs, class Observer>
void integrate_over(Rhs&& rhs, Vec& state, const std::vector<double>& times,
                    double tol, Observer&& observer) {
    if (!(tol > 0.0))
        throw std::invalid_argument("integration tolerance must be positive");
    if (times.size() == 1) {
        observer(state, times.front());
        return;
    }
    auto controlled = ode::make_controlled<Stepper>(tol, tol);
    const double dt0 = (times.back() - times.front()) / 1000.0;
    try {
        ode::integrate_times(controlled, rhs, state, times.begin(), times.end(), dt0,
                             observer);
    } catch (const std::overflow_error& ex) {
        throw IntegrationError(std::string("integrator stalled: ") + ex.what());
    }
}

template <class Rhs>
void integrate_span(Rhs&& rhs, Vec& state, double t0, double t1, double tol) {
    if (!(t1 > t0))
        return;
    auto controlled = ode::make_controlled<Stepper>(tol, tol);
    try {
        ode::integrate_adaptive(controlled, rhs, state, t0, t1, (t1 - t0) / 1000.0);
    } catch (const std::overflow_error& ex) {
        throw IntegrationError(std::string("integrator stalled: ") + ex.what());
    }
}

double expectation_rho(const SparseOp& op, const Eigen::Ref<const Eigen::MatrixXcd>& rho) {
    Complex sum(0.0, 0.0);
    for (int outer = 0; outer < op.outerSize(); ++outer) {
        for (SparseOp::InnerIterator it(op, outer); it; ++it)
            sum += it.value() * rho(it.col(), it.row());
    }
    return sum.real();
}

double expectation_psi(const SparseOp& op, const Vec& psi) {
    return psi.dot(op * psi).real();
}

} // namespace

CompositeSpace::CompositeSpace(std::vector<int> dims) : dims_(std::move(dims)) {
    strides_.resize(dims_.size());
    for (int a = static_cast<int>(dims_.size()) - 1; a >= 0; --a) {
        strides_[static_cast<std::size_t>(a)] = dimension_;
        dimension_ *= dims_[static_cast<std::size_t>(a)];
    }
}

CompositeSpace CompositeSpace::for_array(const AtomArray& array) {
    std::vector<int> dims;
    dims.reserve(static_cast<std::size_t>(array.size()));
    for (const Atom& atom : array.atoms())
        dims.push_back(atom.role == AtomRole::Main ? MainLevel::count : RelayLevel::count);
    return CompositeSpace(std::move(dims));
}

CompositeSpace CompositeSpace::spins(int n) {
    if (n < 1)
        throw std::invalid_argument("spin space requires at least one site");
    return CompositeSpace(std::vector<int>(static_cast<std::size_t>(n), 2));
}

int CompositeSpace::basis_level(long index, int atom) const {
    return static_cast<int>((index / strides_.at(static_cast<std::size_t>(atom))) %
                            dims_[static_cast<std::size_t>(atom)]);
}

SparseOp CompositeSpace::site_operator(int atom, int to, int from) const {
    if (atom < 0 || atom >= atom_count())
        throw std::invalid_argument("site operator: atom index out of range");
    const int levels_here = levels(atom);
    if (to < 0 || to >= levels_here || from < 0 || from >= levels_here)
        throw std::invalid_argument("site operator: level index out of range for atom");

    const long stride = strides_[static_cast<std::size_t>(atom)];
    std::vector<Eigen::Triplet<Complex>> triplets;
    triplets.reserve(static_cast<std::size_t>(dimension_ / levels_here));
    for (long idx = 0; idx < dimension_; ++idx) {
        if (basis_level(idx, atom) == from)
            triplets.emplace_back(static_cast<int>(idx + (to - from) * stride),
                                  static_cast<int>(idx), Complex(1.0, 0.0));
    }
    SparseOp op(static_cast<int>(dimension_), static_cast<int>(dimension_));
    op.setFromTriplets(triplets.begin(), triplets.end());
    return op;
}

QuantumState QuantumState::pure_state(Eigen::VectorXcd psi) {
    QuantumState state;
    state.pure = true;
    state.psi = std::move(psi);
    return state;
}

QuantumState QuantumState::density(Eigen::MatrixXcd rho) {
    QuantumState state;
    state.pure = false;
    state.rho = std::move(rho);
    return state;
}

void QuantumState::validate() const {
    if (pure) {
        if (psi.size() == 0)
            throw Error("empty state vector");
        if (std::abs(psi.norm() - 1.0) > 1e-9)
            throw Error("pure state norm deviates from 1 by more than 1e-9");
        return;
    }
    if (rho.rows() == 0 || rho.rows() != rho.cols())
        throw Error("density matrix must be square and nonempty");
    if (std::abs(rho.trace().real() - 1.0) > 1e-9 || std::abs(rho.trace().imag()) > 1e-9)
        throw Error("density matrix trace deviates from 1 by more than 1e-9");
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
        throw Error("density matrix is not Hermitian within 1e-12");
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
        0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < -1e-10)
        throw Error("density matrix has an eigenvalue below -1e-10");
}

QuantumState excitation_state_full(const CompositeSpace& space, const AtomArray& array,
                                   int excited_main) {
    if (excited_main < 0 || excited_main >= array.num_main())
        throw std::invalid_argument("excited site must be a main atom");
    long index = 0;
    long stride = 1;
    for (int a = space.atom_count() - 1; a >= 0; --a) {
        const bool is_main = array.atom(a).role == AtomRole::Main;
        const int level = is_main ? (a == excited_main ? MainLevel::Up : MainLevel::Down)
                                  : RelayLevel::Alpha;
        index += level * stride;
        stride *= space.levels(a);
    }
    Vec psi = Vec::Zero(space.dimension());
    psi(index) = Complex(1.0, 0.0);
    return QuantumState::pure_state(std::move(psi));
}

QuantumState excitation_state_spins(int n, int excited_site) {
    if (excited_site < 0 || excited_site >= n)
        throw std::invalid_argument("excited site out of range");
    const CompositeSpace space = CompositeSpace::spins(n);
    long index = 0;
    long stride = 1;
    for (int a = n - 1; a >= 0; --a) {
        index += (a == excited_site ? 1 : 0) * stride;
        stride *= 2;
    }
    Vec psi = Vec::Zero(space.dimension());
    psi(index) = Complex(1.0, 0.0);
    return QuantumState::pure_state(std::move(psi));
}

std::vector<Observable> up_population_observables(const CompositeSpace& space, int n_main) {
    std::vector<Observable> observables;
    observables.reserve(static_cast<std::size_t>(n_main));
    for (int i = 0; i < n_main; ++i) {
        const int up = space.levels(i) == MainLevel::count ? MainLevel::Up : 1;
        observables.push_back({"p_up_" + std::to_string(i), space.site_projector(i, up)});
    }
    return observables;
}

Eigen::VectorXd Trajectory::series_for(const std::string& name) const {
    for (std::size_t c = 0; c < names.size(); ++c) {
        if (names[c] == name)
            return series.col(static_cast<Eigen::Index>(c));
    }
    throw std::invalid_argument("no observable named '" + name + "' in trajectory");
}

SparseOp build_full_hamiltonian(const AtomArray& array, const PhysicalParams& params,
                                double omega_up, long dim_cap) {
    const CompositeSpace space = CompositeSpace::for_array(array);
    if (space.dimension() > dim_cap)
        throw std::invalid_argument("composite dimension " + std::to_string(space.dimension()) +
                                    " exceeds the cap " + std::to_string(dim_cap));

    const double delta = forster_detuning(params);
    const int n_main = array.num_main();
    const int m = array.size();

    SparseOp h(static_cast<int>(space.dimension()), static_cast<int>(space.dimension()));
    for (int a = 0; a < m; ++a) {
        const bool is_main = array.atom(a).role == AtomRole::Main;
        const double energy = is_main ? omega_up : omega_up + delta;
        if (energy != 0.0)
            h = h + SparseOp(energy *
                             space.site_projector(a, is_main ? MainLevel::Up : RelayLevel::Beta));
    }

    auto add_exchange = [&](const SparseOp& raise_a_lower_b, double v) {
        if (v == 0.0)
            return;
        h = h + SparseOp(v * raise_a_lower_b) +
            SparseOp(v * SparseOp(raise_a_lower_b.adjoint()));
    };

    for (int a = 0; a < m; ++a) {
        for (int b = a + 1; b < m; ++b) {
            const bool main_a = a < n_main;
            const bool main_b = b < n_main;
            const PairGeometry g = pair_geometry(array, a, b);
            if (main_a && main_b) {
                const double v = near_field_coupling(params.C3_up_down, g.r, g.theta);
                add_exchange(SparseOp(space.site_operator(a, MainLevel::Up, MainLevel::Down) *
                                      space.site_operator(b, MainLevel::Down, MainLevel::Up)),
                             v);
            } else if (main_a && !main_b) {
                const double v = near_field_coupling(params.C3_up_alpha, g.r, g.theta);
                add_exchange(SparseOp(space.site_operator(a, MainLevel::Up, MainLevel::Down) *
                                      space.site_operator(b, RelayLevel::Alpha, RelayLevel::Beta)),
                             v);
            } else {
                const double v = near_field_coupling(params.C3_beta_alpha, g.r, g.theta);
                add_exchange(SparseOp(space.site_operator(a, RelayLevel::Beta, RelayLevel::Alpha) *
                                      space.site_operator(b, RelayLevel::Alpha, RelayLevel::Beta)),
                             v);
            }
        }
    }
    h.makeCompressed();
    return h;
}

std::vector<JumpOperatorSpec> build_jump_operators(const AtomArray& array,
                                                   const PhysicalParams& params,
                                                   Regime regime, double gamma_p_mhz) {
    if (gamma_p_mhz < 0.0)
        throw std::invalid_argument("gamma_P must be nonnegative");
    std::vector<JumpOperatorSpec> jumps;
    const int n_main = array.num_main();
    const double gamma_main = params.main_decay_mhz(regime);
    const double gamma_relay = params.relay_decay_mhz(regime);

    for (int i = 0; i < n_main; ++i) {
        if (regime == Regime::Room) {
            // All six BBR channels share a single rate.
            jumps.push_back({i, MainLevel::Up, MainLevel::SpectatorUp, gamma_main});
            jumps.push_back({i, MainLevel::SpectatorUp, MainLevel::Up, gamma_main});
            jumps.push_back({i, MainLevel::Down, MainLevel::Up, gamma_main});
            jumps.push_back({i, MainLevel::Up, MainLevel::Down, gamma_main});
            jumps.push_back({i, MainLevel::SpectatorDown, MainLevel::Down, gamma_main});
            jumps.push_back({i, MainLevel::Down, MainLevel::SpectatorDown, gamma_main});
        } else {
            // Spontaneous emission only.
            jumps.push_back({i, MainLevel::Down, MainLevel::SpectatorDown, gamma_main});
            jumps.push_back({i, MainLevel::Up, MainLevel::Down, gamma_main});
            jumps.push_back({i, MainLevel::SpectatorUp, MainLevel::Up, gamma_main});
        }
    }
    for (int k = 0; k < array.num_relay(); ++k) {
        const int mu = array.relay_index(k);
        if (regime == Regime::Room) {
            jumps.push_back({mu, RelayLevel::Beta, RelayLevel::Alpha, gamma_relay});
            jumps.push_back({mu, RelayLevel::Alpha, RelayLevel::Beta, gamma_relay});
        } else if (gamma_relay > 0.0) {
            jumps.push_back({mu, RelayLevel::Beta, RelayLevel::Alpha, gamma_relay});
        }
        if (gamma_p_mhz > 0.0)
            jumps.push_back({mu, RelayLevel::Alpha, RelayLevel::Alpha, gamma_p_mhz});
    }
    return jumps;
}

namespace {

std::vector<SparseOp> embed_jumps(const CompositeSpace& space,
                                  const std::vector<JumpOperatorSpec>& jumps) {
    std::vector<SparseOp> ops;
    ops.reserve(jumps.size());
    for (const JumpOperatorSpec& jump : jumps) {
        if (jump.rate_mhz < 0.0)
            throw std::invalid_argument("jump rates must be nonnegative");
        if (jump.rate_mhz == 0.0)
            continue;
        ops.push_back(SparseOp(std::sqrt(jump.rate_mhz) *
                               space.site_operator(jump.atom, jump.to, jump.from)));
    }
    return ops;
}

Trajectory make_trajectory(const std::vector<double>& times,
                           const std::vector<Observable>& observables) {
    Trajectory trajectory;
    trajectory.times = times;
    trajectory.names.reserve(observables.size());
    for (const Observable& o : observables)
        trajectory.names.push_back(o.name);
    trajectory.series.resize(static_cast<Eigen::Index>(times.size()),
                             static_cast<Eigen::Index>(observables.size()));
    return trajectory;
}

} // namespace

Trajectory evolve_master_equation(const CompositeSpace& space, const SparseOp& hamiltonian,
                                  const std::vector<JumpOperatorSpec>& jumps,
                                  const QuantumState& rho0, const std::vector<double>& times,
                                  const std::vector<Observable>& observables, double tol) {
    check_times(times);
    rho0.validate();
    const long dim = space.dimension();
    if (hamiltonian.rows() != dim || rho0.dimension() != dim)
        throw std::invalid_argument("dimension mismatch between space, Hamiltonian and state");

    Eigen::MatrixXcd rho_init =
        rho0.pure ? Eigen::MatrixXcd(rho0.psi * rho0.psi.adjoint()) : rho0.rho;

    const std::vector<SparseOp> ls = embed_jumps(space, jumps);
    std::vector<SparseOp> ls_adj;
    ls_adj.reserve(ls.size());
    SparseOp anticomm(static_cast<int>(dim), static_cast<int>(dim));
    for (const SparseOp& l : ls) {
        ls_adj.push_back(SparseOp(l.adjoint()));
        anticomm = anticomm + SparseOp(ls_adj.back() * l);
    }
    anticomm.makeCompressed();

    Vec state = Eigen::Map<const Vec>(rho_init.data(), dim * dim);
    Eigen::MatrixXcd tmp1(dim, dim), tmp2(dim, dim);
    const Complex minus_i_two_pi(0.0, -kTwoPi);

    auto rhs = [&](const Vec& x, Vec& dxdt, double) {
        const Eigen::Map<const Eigen::MatrixXcd> rho(x.data(), dim, dim);
        dxdt.resize(dim * dim);
        Eigen::Map<Eigen::MatrixXcd> out(dxdt.data(), dim, dim);
        tmp1.noalias() = hamiltonian * rho;
        tmp2.noalias() = rho * hamiltonian;
        out = minus_i_two_pi * (tmp1 - tmp2);
        tmp1.noalias() = anticomm * rho;
        tmp2.noalias() = rho * anticomm;
        out -= tmp1 + tmp2;
        for (std::size_t k = 0; k < ls.size(); ++k) {
            tmp1.noalias() = ls[k] * rho;
            tmp2.noalias() = tmp1 * ls_adj[k];
            out += 2.0 * tmp2;
        }
    };

    Trajectory trajectory = make_trajectory(times, observables);
    std::size_t sample = 0;
    auto observer = [&](const Vec& x, double) {
        const Eigen::Map<const Eigen::MatrixXcd> rho(x.data(), dim, dim);
        const double drift = std::abs(rho.trace().real() - 1.0) + std::abs(rho.trace().imag());
        if (drift > kTraceTolerance)
            throw IntegrationError("trace drift " + format_double(drift) +
                                   " exceeds 1e-6; tighten the tolerance");
        for (std::size_t c = 0; c < observables.size(); ++c)
            trajectory.series(static_cast<Eigen::Index>(sample), static_cast<Eigen::Index>(c)) =
                expectation_rho(observables[c].op, rho);
        ++sample;
    };

    integrate_over(rhs, state, times, tol, observer);
    trajectory.final_state =
        QuantumState::density(Eigen::Map<const Eigen::MatrixXcd>(state.data(), dim, dim));
    return trajectory;
}

Trajectory evolve_schrodinger(const SparseOp& hamiltonian, const QuantumState& psi0,
                              const std::vector<double>& times,
                              const std::vector<Observable>& observables, double tol) {
    check_times(times);
    psi0.validate();
    if (!psi0.pure)
        throw std::invalid_argument("Schrödinger evolution requires a pure state");
    if (hamiltonian.rows() != psi0.psi.size())
        throw std::invalid_argument("dimension mismatch between Hamiltonian and state");

    const Complex minus_i_two_pi(0.0, -kTwoPi);
    auto rhs = [&](const Vec& x, Vec& dxdt, double) {
        dxdt = minus_i_two_pi * (hamiltonian * x);
    };

    Trajectory trajectory = make_trajectory(times, observables);
    std::size_t sample = 0;
    auto observer = [&](const Vec& x, double) {
        if (std::abs(x.norm() - 1.0) > kTraceTolerance)
            throw IntegrationError("state norm drifted by more than 1e-6");
        for (std::size_t c = 0; c < observables.size(); ++c)
            trajectory.series(static_cast<Eigen::Index>(sample), static_cast<Eigen::Index>(c)) =
                expectation_psi(observables[c].op, x);
        ++sample;
    };

    Vec state = psi0.psi;
    integrate_over(rhs, state, times, tol, observer);
    trajectory.final_state = QuantumState::pure_state(std::move(state));
    return trajectory;
}

SparseOp build_effective_hamiltonian(const EffectiveModel& model) {
    const int n = static_cast<int>(model.coupling.rows());
    const CompositeSpace space = CompositeSpace::spins(n);
    SparseOp h(static_cast<int>(space.dimension()), static_cast<int>(space.dimension()));
    for (int i = 0; i < n; ++i) {
        if (model.delta_eff.size() == n && model.delta_eff(i) != 0.0)
            h = h + SparseOp(model.delta_eff(i) * space.site_projector(i, 1));
        for (int j = i + 1; j < n; ++j) {
            const double v = model.coupling(i, j);
            if (v == 0.0)
                continue;
            const SparseOp hop =
                SparseOp(space.site_operator(i, 1, 0) * space.site_operator(j, 0, 1));
            h = h + SparseOp(v * hop) + SparseOp(v * SparseOp(hop.adjoint()));
        }
    }
    h.makeCompressed();
    return h;
}

Trajectory evolve_effective(const EffectiveModel& model, const QuantumState& state0,
                            const std::vector<double>& times, bool dissipative, double tol) {
    const int n = static_cast<int>(model.coupling.rows());
    if (!dissipative && n > 12)
        throw std::invalid_argument("pure effective evolution is capped at 12 spins");
    if (dissipative && n > 6)
        throw std::invalid_argument("dissipative effective evolution is capped at 6 spins");

    const CompositeSpace space = CompositeSpace::spins(n);
    const SparseOp h = build_effective_hamiltonian(model);
    const std::vector<Observable> observables = up_population_observables(space, n);

    if (!dissipative)
        return evolve_schrodinger(h, state0, times, observables, tol);

    std::vector<JumpOperatorSpec> jumps;
    for (int i = 0; i < n; ++i) {
        const double gamma = model.gamma_eff.size() == n ? model.gamma_eff(i) : 0.0;
        if (gamma < 0.0)
            throw Error("negative effective decay rate at site " + std::to_string(i) +
                        ": " + format_double(gamma));
        if (gamma > 0.0)
            jumps.push_back({i, 1, 0, gamma});
    }
    return evolve_master_equation(space, h, jumps, state0, times, observables, tol);
}

CompareResult compare_full_vs_effective(const AtomArray& array, const PhysicalParams& params,
                                        int excited_main, const std::vector<double>& times,
                                        Regime regime, double tol) {
    CompareResult result;

    const CompositeSpace space = CompositeSpace::for_array(array);
    const SparseOp h = build_full_hamiltonian(array, params);
    const std::vector<JumpOperatorSpec> jumps = build_jump_operators(array, params, regime);
    const QuantumState rho0 = excitation_state_full(space, array, excited_main);
    result.full = evolve_master_equation(space, h, jumps, rho0, times,
                                         up_population_observables(space, array.num_main()),
                                         tol);

    const EffectiveModel model = build_effective_model(array, params, regime);
    const QuantumState psi0 = excitation_state_spins(array.num_main(), excited_main);
    result.effective = evolve_effective(model, psi0, times, true, tol);

    double deviation = 0.0;
    for (int i = 0; i < array.num_main(); ++i) {
        const Eigen::VectorXd a = result.full.series_for("p_up_" + std::to_string(i));
        const Eigen::VectorXd b = result.effective.series_for("p_up_" + std::to_string(i));
        deviation = std::max(deviation, (a - b).cwiseAbs().maxCoeff());
    }
    result.max_abs_deviation = deviation;
    return result;
}

namespace {

// Pure-state evolution under a piecewise-constant Hamiltonian; hamiltonians
// has one entry more than boundaries. Returns the sampled trajectory plus
// the state at every sample time.
std::pair<Trajectory, std::vector<Vec>> evolve_piecewise(
    const std::vector<const SparseOp*>& hamiltonians, const std::vector<double>& boundaries,
    const QuantumState& psi0, const std::vector<double>& times,
    const std::vector<Observable>& observables, double tol) {
    check_times(times);
    psi0.validate();

    const Complex minus_i_two_pi(0.0, -kTwoPi);
    auto segment_rhs = [&](const SparseOp* h) {
        return [h, minus_i_two_pi](const Vec& x, Vec& dxdt, double) {
            dxdt = minus_i_two_pi * (*h * x);
        };
    };
    auto active_segment = [&](double t) {
        std::size_t s = 0;
        while (s < boundaries.size() && boundaries[s] <= t)
            ++s;
        return s;
    };

    Trajectory trajectory = make_trajectory(times, observables);
    std::vector<Vec> states;
    states.reserve(times.size());

    Vec psi = psi0.psi;
    double t = times.front();
    for (std::size_t sample = 0; sample < times.size(); ++sample) {
        const double target = times[sample];
        while (t < target) {
            const std::size_t segment = active_segment(t);
            double stop = target;
            if (segment < boundaries.size())
                stop = std::min(stop, std::max(boundaries[segment], t));
            if (stop <= t)
                stop = target; // boundary exactly at t was already consumed
            integrate_span(segment_rhs(hamiltonians[segment]), psi, t, stop, tol);
            t = stop;
        }
        if (std::abs(psi.norm() - 1.0) > kTraceTolerance)
            throw IntegrationError("state norm drifted by more than 1e-6");
        for (std::size_t c = 0; c < observables.size(); ++c)
            trajectory.series(static_cast<Eigen::Index>(sample), static_cast<Eigen::Index>(c)) =
                expectation_psi(observables[c].op, psi);
        states.push_back(psi);
    }
    trajectory.final_state = QuantumState::pure_state(psi);
    return {std::move(trajectory), std::move(states)};
}

} // namespace

ProtocolResult loss_repump_protocol(const AtomArray& pair_array, const PhysicalParams& params,
                                    double t_loss, double t_reinjection,
                                    const std::vector<double>& times, Regime regime,
                                    double tol) {
    if (pair_array.num_main() != 2 || pair_array.num_relay() != 2)
        throw std::invalid_argument("loss protocol requires a mirrored pair (N = N_R = 2)");
    if (t_loss > t_reinjection)
        throw std::invalid_argument("t_loss must not exceed t_reinjection");

    const EffectiveModel both = build_effective_model(pair_array, params, regime);
    const AtomArray one_relay = pair_array.without_atoms({pair_array.relay_index(1)});
    const EffectiveModel single = build_effective_model(one_relay, params, regime);

    const SparseOp h_both = build_effective_hamiltonian(both);
    const SparseOp h_single = build_effective_hamiltonian(single);

    const CompositeSpace space = CompositeSpace::spins(2);
    const std::vector<Observable> observables = up_population_observables(space, 2);
    const QuantumState psi0 = excitation_state_spins(2, 0);

    ProtocolResult result;
    auto [no_loss, states_no_loss] =
        evolve_piecewise({&h_both}, {}, psi0, times, observables, tol);
    auto [loss, states_loss] =
        evolve_piecewise({&h_both, &h_single}, {t_loss}, psi0, times, observables, tol);
    auto [repump, states_repump] =
        evolve_piecewise({&h_both, &h_single, &h_both}, {t_loss, t_reinjection}, psi0,
                         times, observables, tol);

    result.no_loss = std::move(no_loss);
    result.loss = std::move(loss);
    result.repump = std::move(repump);
    result.fidelity_loss.reserve(times.size());
    result.fidelity_repump.reserve(times.size());
    for (std::size_t k = 0; k < times.size(); ++k) {
        result.fidelity_loss.push_back(std::norm(states_no_loss[k].dot(states_loss[k])));
        result.fidelity_repump.push_back(std::norm(states_no_loss[k].dot(states_repump[k])));
    }
    return result;
}

double fidelity(const QuantumState& a, const QuantumState& b) {
    if (!a.pure || !b.pure)
        throw Error("fidelity is implemented for pure states only");
    if (a.psi.size() != b.psi.size())
        throw std::invalid_argument("fidelity requires states of equal dimension");
    return std::norm(a.psi.dot(b.psi));
}

std::string trajectory_to_csv(const Trajectory& trajectory) {
    std::vector<std::string> header{"time_us"};
    std::vector<std::vector<double>> columns;
    columns.emplace_back(trajectory.times);
    for (std::size_t c = 0; c < trajectory.names.size(); ++c) {
        header.push_back(trajectory.names[c]);
        const auto col = trajectory.series.col(static_cast<Eigen::Index>(c));
        columns.emplace_back(col.begin(), col.end());
    }
    return csv_table(header, columns);
}

nlohmann::json to_json(const Trajectory& trajectory) {
    nlohmann::json series;
    for (std::size_t c = 0; c < trajectory.names.size(); ++c) {
        const auto col = trajectory.series.col(static_cast<Eigen::Index>(c));
        series[trajectory.names[c]] = std::vector<double>(col.begin(), col.end());
    }
    return nlohmann::json{{"times_us", trajectory.times}, {"series", series}};
}

} // namespace rydrelay
