#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "rydrelay/couplings.hpp"

using namespace rydrelay;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("near_field_coupling evaluates the stated formula") {
    // magic angle annihilates the angular factor
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> c3(10.0, 1e4);
    std::uniform_real_distribution<double> rdist(0.5, 50.0);
    for (int k = 0; k < 100; ++k) {
        const double c = c3(rng), r = rdist(rng);
        CHECK(std::abs(near_field_coupling(c, r, magic_angle())) < 1e-12 * c / (r * r * r));
    }

    CHECK(near_field_coupling(kPi * 2250.0, 6.0, 0.0) ==
          doctest::Approx(2.0 * kPi * 2250.0 / 216.0).epsilon(1e-14));
    CHECK(near_field_coupling(kPi * 2250.0, 6.0, 0.0) == doctest::Approx(65.4498).epsilon(1e-4));
    CHECK(near_field_coupling(500.0, 2.0, kPi / 2.0) == doctest::Approx(-500.0 / 8.0));

    CHECK_THROWS_AS(near_field_coupling(100.0, 0.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(near_field_coupling(100.0, -1.0, 0.0), std::domain_error);
}

TEST_CASE("near_field_coupling symmetries and scaling") {
    std::mt19937 rng(12);
    std::uniform_real_distribution<double> theta(0.0, kPi);
    std::uniform_real_distribution<double> rdist(0.5, 30.0);
    std::uniform_real_distribution<double> scale(0.25, 4.0);
    for (int k = 0; k < 200; ++k) {
        const double t = theta(rng);
        const double r = rdist(rng);
        const double v = near_field_coupling(1000.0, r, t);
        CHECK(near_field_coupling(1000.0, r, -t) == doctest::Approx(v).epsilon(1e-12));
        CHECK(near_field_coupling(1000.0, r, kPi - t) == doctest::Approx(v).epsilon(1e-9));
        const double s = scale(rng);
        CHECK(near_field_coupling(1000.0, s * r, t) ==
              doctest::Approx(v / (s * s * s)).epsilon(1e-12));
    }
}

TEST_CASE("full_dd_coupling approaches the near-field limit") {
    const double gamma = 3800.0, lambda = 7e-3;
    // ratio -> 1 as xi -> 0 at fixed theta away from the magic angle
    const double r_small = 1e-3 * lambda / (2.0 * kPi); // xi = 1e-3
    const auto v = full_dd_coupling(gamma, gamma, lambda, r_small, kPi / 2.0);
    const double nf = near_field_limit(gamma, gamma, lambda, r_small, kPi / 2.0);
    CHECK(std::abs(v.real() / nf - 1.0) < 1e-3);

    // dissipative part is tiny deep in the near field
    CHECK(std::abs(v.imag()) / std::abs(v.real()) < 1e-6);
    const auto v4 = full_dd_coupling(gamma, gamma, lambda, 1e-4, kPi / 2.0);
    CHECK(std::abs(v4.imag() / v4.real()) < 1e-2);

    // relative deviation grows to O(1) near r ~ lambda
    const auto far = full_dd_coupling(gamma, gamma, lambda, 1e-3, kPi / 2.0);
    const double nf_far = near_field_limit(gamma, gamma, lambda, 1e-3, kPi / 2.0);
    CHECK(std::abs(far.real() / nf_far - 1.0) > 0.1);

    // only the sin^2 far-field term survives at the magic angle
    const double r = 2e-4;
    const auto magic = full_dd_coupling(gamma, gamma, lambda, r, magic_angle());
    const double xi = 2.0 * kPi * r / lambda;
    const double s2 = 1.0 - 1.0 / 3.0;
    const double expected_re = -1.5 * gamma * s2 * std::cos(xi) / xi * 1e-6;
    CHECK(magic.real() == doctest::Approx(expected_re).epsilon(1e-9));
}

TEST_CASE("forster detuning and calibration") {
    PhysicalParams params; // defaults are calibrated to resonance at 1.6 V/cm
    params.F = 1.6;
    CHECK(forster_detuning(params) == doctest::Approx(0.0).epsilon(1e-12));

    params.F = 3.5;
    CHECK(std::abs(forster_detuning(params)) == doctest::Approx(548.5509).epsilon(1e-6));

    params.F = 0.0;
    CHECK(forster_detuning(params) == doctest::Approx(params.delta0));

    auto recal = calibrate_delta0(params, 1.6);
    recal.F = 1.6;
    CHECK(forster_detuning(recal) == 0.0);
    recal.F = 3.5;
    // arithmetic oracle: |(p2_ba - p2_ud)| (3.5^2 - 1.6^2) = 56.61 * 9.69
    CHECK(std::abs(forster_detuning(recal)) ==
          doctest::Approx(56.61 * (3.5 * 3.5 - 1.6 * 1.6)).epsilon(1e-12));

    auto zero = calibrate_delta0(params, 0.0);
    CHECK(zero.delta0 == 0.0);
}

TEST_CASE("coupling_vector follows the geometry") {
    PhysicalParams params;
    const auto array = build_pair_mirrored(15.0, 6.0, 0.0);
    const auto v0 = coupling_vector(array, params, 0);
    REQUIRE(v0.size() == 2);
    CHECK(v0(0) == doctest::Approx(near_field_coupling(params.C3_up_alpha, 6.0, 0.0)));

    // mirror symmetry: V_i with relays swapped equals V_j
    const auto v1 = coupling_vector(array, params, 1);
    CHECK(v0(0) == doctest::Approx(v1(1)).epsilon(1e-12));
    CHECK(v0(1) == doctest::Approx(v1(0)).epsilon(1e-12));

    CHECK_THROWS_AS(coupling_vector(array, params, 2), std::out_of_range);
}

TEST_CASE("relay_matrix structure") {
    PhysicalParams params;
    const double delta = forster_detuning(params);

    SUBCASE("single relay") {
        auto array = AtomArray::from_atoms({{{0.0, 0.0}, AtomRole::Main},
                                            {{0.0, 8.0}, AtomRole::Relay}});
        const auto m = relay_matrix(array, params);
        REQUIRE(m.rows() == 1);
        CHECK(m(0, 0).real() == doctest::Approx(delta));
        CHECK(m(0, 0).imag() == doctest::Approx(-params.relay_decay_mhz(Regime::Room)));
    }

    SUBCASE("magic-angle relays decouple") {
        const double d = 9.0;
        auto array = AtomArray::from_atoms(
            {{{0.0, 0.0}, AtomRole::Main},
             {{40.0, 0.0}, AtomRole::Relay},
             {{40.0 + std::sqrt(2.0 / 3.0) * d, std::sqrt(1.0 / 3.0) * d}, AtomRole::Relay}});
        const auto m = relay_matrix(array, params);
        CHECK(std::abs(m(0, 1)) < 1e-12);
        CHECK(std::abs(m(1, 0)) < 1e-12);
    }

    SUBCASE("complex symmetric always, real symmetric at zero relay decay") {
        const auto array = build_chain_mirrored(4, 10.0, 7.0, 1.3);
        const auto m = relay_matrix(array, params);
        CHECK((m - m.transpose()).cwiseAbs().maxCoeff() == 0.0);
        PhysicalParams lossless = params;
        lossless.gamma_ell = 0.0;
        const auto m0 = relay_matrix(array, lossless);
        CHECK(m0.imag().cwiseAbs().maxCoeff() == 0.0);
    }
}
