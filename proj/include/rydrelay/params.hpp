#ifndef RYDRELAY_PARAMS_HPP
#define RYDRELAY_PARAMS_HPP

#include <string>

#include "json.hpp"

#include "rydrelay/errors.hpp"

namespace rydrelay {

/// Temperature regime selecting the dissipation rate set.
enum class Regime { Room, Cryo };

std::string to_string(Regime regime);
Regime regime_from_string(const std::string& s);

/// Physical constants of the implementation: dipole-dipole C3 coefficients,
/// differential Stark shifts, bare splitting offset, static field and decay
/// rates. Defaults reproduce the circular-Rydberg / low-l relay realization.
///
/// Unit conventions: energies and C3 prefactors in MHz (times μm³), field in
/// V/cm, wavelength in m. Rates keep their natural magnitudes (gamma_bbr and
/// gamma_ell in kHz, gamma_cryo in Hz); use main_decay_mhz()/relay_decay_mhz()
/// for values in MHz.
struct PhysicalParams {
    double C3_up_alpha = 2250.0 * 3.14159265358979323846;   // MHz·μm³, main-relay cross transition
    double C3_beta_alpha = 1310.0 * 3.14159265358979323846; // MHz·μm³, relay-relay
    double C3_up_down = 2250.0 * 3.14159265358979323846;    // MHz·μm³, main-main; vanishes on the magic line
    double p2_up_down = -0.39;   // MHz/(V/cm)², differential Stark shift of the main transition
    double p2_beta_alpha = -57.0; // MHz/(V/cm)², differential Stark shift of the relay transition
    // Bare splitting difference (MHz), defaulted so the Förster resonance
    // sits at F = 1.6 V/cm.
    double delta0 = -(p2_beta_alpha - p2_up_down) * (1.6 * 1.6);
    double F = 3.5;          // V/cm
    double lambda_mn = 7e-3; // m, transition wavelength
    double gamma_bbr = 3.5;  // kHz, room-temperature BBR rate of the main levels
    double gamma_cryo = 24.0; // Hz, cryogenic spontaneous-emission rate
    double gamma_ell = 10.0;  // kHz, room-temperature low-l relay decay
    double gamma_relay_cryo = 0.0; // kHz, cryogenic relay rate (negligible by default)

    /// Throws ConfigError if an invariant (positive wavelength, nonnegative
    /// rates and field) is violated.
    void validate() const;

    /// Main-atom dissipation rate in MHz for the regime.
    double main_decay_mhz(Regime regime) const;
    /// Relay dissipation rate in MHz for the regime (enters the relay matrix).
    double relay_decay_mhz(Regime regime) const;
};

nlohmann::json to_json(const PhysicalParams& p);
PhysicalParams params_from_json(const nlohmann::json& j);
/// Applies the fields present in `overrides` on top of `base`; unknown keys
/// throw ConfigError.
PhysicalParams params_with_overrides(const PhysicalParams& base, const nlohmann::json& overrides);

} // namespace rydrelay

#endif
