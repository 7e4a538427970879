#include "doctest.h"

#include <cmath>
#include <numbers>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "rydrelay/dynamics.hpp"

using namespace rydrelay;

namespace {

constexpr double kPi = std::numbers::pi;
using Cx = std::complex<double>;

// Brute-force superoperator propagation: rho(t) = unvec(exp(S t) vec(rho0)),
// with the same (2 L rho L† - {L†L, rho}) convention and 2π phases. Column-
// major vec, so vec(A rho B) = (Bᵀ ⊗ A) vec(rho).
Eigen::MatrixXcd superoperator(const Eigen::MatrixXcd& h,
                               const std::vector<Eigen::MatrixXcd>& ls) {
    const long d = h.rows();
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(d, d);
    Eigen::MatrixXcd s = Cx(0.0, -2.0 * kPi) * (Eigen::kroneckerProduct(id, h).eval() -
                                                Eigen::kroneckerProduct(h.transpose(), id).eval());
    for (const auto& l : ls) {
        const Eigen::MatrixXcd ldl = l.adjoint() * l;
        s += 2.0 * Eigen::kroneckerProduct(l.conjugate(), l).eval();
        s -= Eigen::kroneckerProduct(id, ldl).eval();
        s -= Eigen::kroneckerProduct(ldl.transpose(), id).eval();
    }
    return s;
}

Eigen::MatrixXcd propagate_exact(const Eigen::MatrixXcd& h,
                                 const std::vector<Eigen::MatrixXcd>& ls,
                                 const Eigen::MatrixXcd& rho0, double t) {
    const long d = h.rows();
    const Eigen::MatrixXcd s = superoperator(h, ls);
    const Eigen::MatrixXcd propagator = (s * t).exp();
    const Eigen::VectorXcd v0 = Eigen::Map<const Eigen::VectorXcd>(rho0.data(), d * d);
    const Eigen::VectorXcd vt = propagator * v0;
    return Eigen::Map<const Eigen::MatrixXcd>(vt.data(), d, d);
}

EffectiveModel two_spin_model(double coupling, double delta1, double delta2,
                              double gamma1 = 0.0, double gamma2 = 0.0) {
    EffectiveModel model;
    model.coupling = Eigen::MatrixXd::Zero(2, 2);
    model.coupling(0, 1) = model.coupling(1, 0) = coupling;
    model.delta_eff = Eigen::Vector2d(delta1, delta2);
    model.gamma_eff = Eigen::Vector2d(gamma1, gamma2);
    return model;
}

} // namespace

TEST_CASE("lindblad convention lock: single decay channel") {
    // one two-level atom, channel up -> down at rate g, H = 0
    const CompositeSpace space = CompositeSpace::spins(1);
    const double g = 0.37; // MHz
    SparseOp h(2, 2);
    const QuantumState rho0 =
        QuantumState::density((Eigen::MatrixXcd(2, 2) << 0.0, 0.0, 0.0, 1.0).finished());
    const std::vector<double> times{0.0, 0.3, 0.9, 1.7};
    const auto trajectory = evolve_master_equation(space, h, {{0, 1, 0, g}}, rho0, times,
                                                   up_population_observables(space, 1), 1e-12);

    const Eigen::MatrixXcd l = std::sqrt(g) * (Eigen::MatrixXcd(2, 2) << 0.0, 1.0, 0.0, 0.0).finished();
    for (std::size_t k = 0; k < times.size(); ++k) {
        const double p = trajectory.series(static_cast<Eigen::Index>(k), 0);
        // the printed superoperator decays populations at 2g
        CHECK(p == doctest::Approx(std::exp(-2.0 * g * times[k])).epsilon(1e-9));
        const Eigen::MatrixXcd exact = propagate_exact(Eigen::MatrixXcd::Zero(2, 2), {l},
                                                       rho0.rho, times[k]);
        CHECK(std::abs(p - exact(1, 1).real()) < 1e-9);
    }
}

TEST_CASE("master equation matches the exact propagator with coherences") {
    // driven-and-damped two-level system exercises both the 2π phase
    // convention and the dissipator normalization off the diagonal
    const CompositeSpace space = CompositeSpace::spins(1);
    Eigen::MatrixXcd hd(2, 2);
    hd << 0.0, 0.4, 0.4, -0.3; // MHz
    SparseOp h = hd.sparseView();
    const double g = 0.15;
    const Eigen::MatrixXcd l =
        std::sqrt(g) * (Eigen::MatrixXcd(2, 2) << 0.0, 1.0, 0.0, 0.0).finished();

    Eigen::MatrixXcd rho0(2, 2);
    rho0 << 0.25, Cx(0.1, 0.05), Cx(0.1, -0.05), 0.75;
    const std::vector<double> times{0.0, 0.45, 1.1};
    const auto trajectory =
        evolve_master_equation(space, h, {{0, 1, 0, g}}, QuantumState::density(rho0), times,
                               up_population_observables(space, 1), 1e-12);
    const Eigen::MatrixXcd exact = propagate_exact(hd, {l}, rho0, times.back());
    const Eigen::MatrixXcd integrated = trajectory.final_state.rho;
    CHECK((integrated - exact).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("two-spin exchange oscillation") {
    const double coupling = 0.8; // MHz
    const EffectiveModel model = two_spin_model(coupling, 0.0, 0.0);
    std::vector<double> times;
    for (int k = 0; k <= 40; ++k)
        times.push_back(k * 0.025 / coupling);
    const auto trajectory =
        evolve_effective(model, excitation_state_spins(2, 0), times, false, 1e-10);
    for (std::size_t k = 0; k < times.size(); ++k) {
        const double expected = std::pow(std::sin(2.0 * kPi * coupling * times[k]), 2);
        CHECK(trajectory.series(static_cast<Eigen::Index>(k), 1) ==
              doctest::Approx(expected).epsilon(1e-7));
    }
    // full transfer at t = 1/(4 J)
    const auto transfer = evolve_effective(model, excitation_state_spins(2, 0),
                                           {0.0, 1.0 / (4.0 * coupling)}, false, 1e-10);
    CHECK(transfer.series(1, 1) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("detuned exchange has reduced amplitude") {
    const double coupling = 0.5, detuning = 1.2;
    const EffectiveModel model = two_spin_model(coupling, detuning, 0.0);
    const double omega = std::hypot(coupling, detuning / 2.0);
    std::vector<double> times;
    for (int k = 0; k <= 60; ++k)
        times.push_back(k * 0.02 / omega);
    const auto trajectory =
        evolve_effective(model, excitation_state_spins(2, 0), times, false, 1e-10);
    const double amp = coupling * coupling / (omega * omega);
    double max_transfer = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k) {
        const double expected = amp * std::pow(std::sin(2.0 * kPi * omega * times[k]), 2);
        CHECK(trajectory.series(static_cast<Eigen::Index>(k), 1) ==
              doctest::Approx(expected).epsilon(1e-6).scale(1.0));
        max_transfer = std::max(max_transfer, trajectory.series(static_cast<Eigen::Index>(k), 1));
    }
    CHECK(max_transfer < 1.0);
    CHECK(max_transfer == doctest::Approx(amp).epsilon(0.01));
}

TEST_CASE("excitation number is conserved without dissipation") {
    EffectiveModel model;
    model.coupling = Eigen::MatrixXd::Zero(3, 3);
    model.coupling(0, 1) = model.coupling(1, 0) = 0.4;
    model.coupling(1, 2) = model.coupling(2, 1) = -0.7;
    model.coupling(0, 2) = model.coupling(2, 0) = 0.11;
    model.delta_eff = Eigen::Vector3d(0.3, -0.2, 0.9);
    model.gamma_eff = Eigen::Vector3d::Zero();
    std::vector<double> times;
    for (int k = 0; k <= 25; ++k)
        times.push_back(0.08 * k);
    const auto trajectory =
        evolve_effective(model, excitation_state_spins(3, 1), times, false, 1e-10);
    for (std::size_t k = 0; k < times.size(); ++k) {
        const double total = trajectory.series(static_cast<Eigen::Index>(k), 0) +
                             trajectory.series(static_cast<Eigen::Index>(k), 1) +
                             trajectory.series(static_cast<Eigen::Index>(k), 2);
        CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("dissipative effective evolution decays the excitation") {
    const double gamma = 0.25;
    const EffectiveModel model = two_spin_model(0.0, 0.0, 0.0, gamma, gamma);
    const std::vector<double> times{0.0, 0.5, 1.5};
    const auto trajectory =
        evolve_effective(model, excitation_state_spins(2, 0), times, true, 1e-10);
    for (std::size_t k = 0; k < times.size(); ++k)
        CHECK(trajectory.series(static_cast<Eigen::Index>(k), 0) ==
              doctest::Approx(std::exp(-2.0 * gamma * times[k])).epsilon(1e-8));

    EffectiveModel bad = model;
    bad.gamma_eff(0) = -1e-3;
    CHECK_THROWS_AS(evolve_effective(bad, excitation_state_spins(2, 0), times, true), Error);
}

TEST_CASE("dimension caps") {
    EffectiveModel big;
    big.coupling = Eigen::MatrixXd::Zero(13, 13);
    big.delta_eff = Eigen::VectorXd::Zero(13);
    big.gamma_eff = Eigen::VectorXd::Zero(13);
    CHECK_THROWS_AS(evolve_effective(big, excitation_state_spins(13, 0), {0.0, 0.1}, false),
                    std::invalid_argument);
    EffectiveModel seven;
    seven.coupling = Eigen::MatrixXd::Zero(7, 7);
    seven.delta_eff = Eigen::VectorXd::Zero(7);
    seven.gamma_eff = Eigen::VectorXd::Zero(7);
    CHECK_THROWS_AS(evolve_effective(seven, excitation_state_spins(7, 0), {0.0, 0.1}, true),
                    std::invalid_argument);

    const auto chain = build_chain_mirrored(3, 10.0, 6.0, kPi / 2.0);
    CHECK_THROWS_AS(build_full_hamiltonian(chain, PhysicalParams{}, 0.0, 64),
                    std::invalid_argument);
}

TEST_CASE("full hamiltonian structure") {
    PhysicalParams params;

    SUBCASE("magic pair without relays is diagonal-free at zero reference") {
        const auto mains = AtomArray::from_atoms(
            {{{0.0, 0.0}, AtomRole::Main},
             {{10.0 * std::sqrt(2.0 / 3.0), 10.0 * std::sqrt(1.0 / 3.0)}, AtomRole::Main}});
        const auto h = build_full_hamiltonian(mains, params);
        CHECK(Eigen::MatrixXcd(h).cwiseAbs().maxCoeff() < 1e-12);
    }

    SUBCASE("one main and one relay form a single exchange block") {
        const auto array = AtomArray::from_atoms({{{0.0, 0.0}, AtomRole::Main},
                                                  {{0.0, 7.0}, AtomRole::Relay}});
        const auto g = pair_geometry(array, 0, 1);
        const double v = near_field_coupling(params.C3_up_alpha, g.r, g.theta);
        const auto h = Eigen::MatrixXcd(build_full_hamiltonian(array, params));
        // basis index = 2 * main_level + relay_level
        const long up_alpha = 2 * MainLevel::Up + RelayLevel::Alpha;
        const long down_beta = 2 * MainLevel::Down + RelayLevel::Beta;
        CHECK(h(down_beta, up_alpha).real() == doctest::Approx(v));
        CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() == 0.0);
        CHECK(h(down_beta, down_beta).real() == doctest::Approx(forster_detuning(params)));
    }
}

TEST_CASE("jump operator sets per regime") {
    PhysicalParams params;
    const auto array = build_pair_mirrored(15.0, 6.0, 0.0);

    const auto room = build_jump_operators(array, params, Regime::Room);
    CHECK(room.size() == 16); // 6 per main, 2 per relay
    const auto with_projector = build_jump_operators(array, params, Regime::Room, 0.5);
    CHECK(with_projector.size() == 18);

    const auto cryo = build_jump_operators(array, params, Regime::Cryo);
    CHECK(cryo.size() == 6); // 3 emission channels per main, none for relays
    for (const auto& jump : cryo)
        CHECK(jump.rate_mhz == doctest::Approx(24.0 * 1e-6));

    PhysicalParams cold_relays = params;
    cold_relays.gamma_relay_cryo = 0.2;
    CHECK(build_jump_operators(array, cold_relays, Regime::Cryo).size() == 8);
}

TEST_CASE("purity is non-increasing under a projector channel with diagonal H") {
    const auto relay_only = AtomArray::from_atoms({{{0.0, 0.0}, AtomRole::Relay}});
    const CompositeSpace space = CompositeSpace::for_array(relay_only);
    SparseOp h = SparseOp(0.7 * space.site_projector(0, RelayLevel::Beta));

    Eigen::VectorXcd plus(2);
    plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    const Eigen::MatrixXcd rho0 = plus * plus.adjoint();

    double previous = 1.0;
    for (double t : {0.2, 0.5, 1.0, 2.0, 4.0}) {
        const auto trajectory = evolve_master_equation(
            space, h, {{0, RelayLevel::Alpha, RelayLevel::Alpha, 0.8}},
            QuantumState::density(rho0), {0.0, t}, {}, 1e-10);
        const Eigen::MatrixXcd rho = trajectory.final_state.rho;
        const double purity = (rho * rho).trace().real();
        CHECK(purity <= previous + 1e-9);
        previous = purity;
    }
}

TEST_CASE("state validation and fidelity") {
    Eigen::VectorXcd psi(2);
    psi << 1.0, 0.0;
    const auto a = QuantumState::pure_state(psi);
    CHECK(fidelity(a, a) == doctest::Approx(1.0));

    Eigen::VectorXcd orth(2);
    orth << 0.0, 1.0;
    CHECK(fidelity(a, QuantumState::pure_state(orth)) == doctest::Approx(0.0));

    const Cx phase = std::exp(Cx(0.0, 0.83));
    CHECK(fidelity(a, QuantumState::pure_state((phase * psi).eval())) ==
          doctest::Approx(1.0).epsilon(1e-12));

    Eigen::MatrixXcd mixed = Eigen::MatrixXcd::Identity(2, 2) * 0.5;
    CHECK_THROWS_AS(fidelity(a, QuantumState::density(mixed)), Error);

    Eigen::VectorXcd unnormalized(2);
    unnormalized << 2.0, 0.0;
    CHECK_THROWS_AS(QuantumState::pure_state(unnormalized).validate(), Error);
    Eigen::MatrixXcd bad_trace = Eigen::MatrixXcd::Identity(2, 2);
    CHECK_THROWS_AS(QuantumState::density(bad_trace).validate(), Error);
}

TEST_CASE("loss and repump protocol basics") {
    PhysicalParams params;
    const auto array = build_pair_mirrored(15.0, 6.0, 0.0);
    const EffectiveModel model = build_effective_model(array, params);
    const double period = 1.0 / (2.0 * std::abs(model.coupling(0, 1)));

    std::vector<double> times;
    for (int k = 0; k <= 80; ++k)
        times.push_back(2.0 * period * k / 80.0);

    SUBCASE("zero-length interruption is a no-op") {
        const auto result = loss_repump_protocol(array, params, 0.25 * period,
                                                 0.25 * period, times);
        for (double f : result.fidelity_repump)
            CHECK(f == doctest::Approx(1.0).epsilon(1e-6));
    }

    SUBCASE("losing a relay suppresses the exchange") {
        const auto result =
            loss_repump_protocol(array, params, 0.25 * period, 0.5 * period, times);
        double before = 0.0, after = 0.0;
        const auto series = result.loss.series_for("p_up_1");
        for (std::size_t k = 0; k < times.size(); ++k) {
            if (times[k] <= 0.25 * period)
                before = std::max(before, series(static_cast<Eigen::Index>(k)));
        }
        // once the relay is gone, transfer stalls near the interruption value
        double max_after = 0.0, min_after = 1.0;
        for (std::size_t k = 0; k < times.size(); ++k) {
            if (times[k] >= 0.3 * period) {
                max_after = std::max(max_after, series(static_cast<Eigen::Index>(k)));
                min_after = std::min(min_after, series(static_cast<Eigen::Index>(k)));
            }
        }
        after = max_after - min_after;
        CHECK(after < 0.5 * before);

        // repumping restores the oscillation but not the trajectory
        const auto repump_series = result.repump.series_for("p_up_1");
        double repump_swing = 0.0;
        for (std::size_t k = 0; k < times.size(); ++k) {
            if (times[k] >= 0.5 * period)
                repump_swing = std::max(repump_swing,
                                        repump_series(static_cast<Eigen::Index>(k)));
        }
        CHECK(repump_swing > after);
        CHECK(result.fidelity_repump.back() < 1.0 - 1e-3);
    }

    CHECK_THROWS_AS(loss_repump_protocol(array, params, 0.5, 0.1, times),
                    std::invalid_argument);
    const auto chain = build_chain_mirrored(3, 10.0, 6.0, 0.0);
    CHECK_THROWS_AS(loss_repump_protocol(chain, params, 0.1, 0.2, times),
                    std::invalid_argument);
}

TEST_CASE("trajectory export") {
    const EffectiveModel model = two_spin_model(0.5, 0.0, 0.0);
    const auto trajectory = evolve_effective(model, excitation_state_spins(2, 0),
                                             {0.0, 0.1, 0.2}, false, 1e-10);
    const auto csv = trajectory_to_csv(trajectory);
    CHECK(csv.rfind("time_us,p_up_0,p_up_1\n", 0) == 0);
    const auto j = to_json(trajectory);
    CHECK(j["times_us"].size() == 3);
    CHECK(j["series"]["p_up_0"].size() == 3);
    CHECK_THROWS_AS(trajectory.series_for("nope"), std::invalid_argument);
}
