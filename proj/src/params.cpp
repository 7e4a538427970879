#include "rydrelay/params.hpp"

#include <cmath>

namespace rydrelay {

std::string to_string(Regime regime) {
    return regime == Regime::Room ? "room" : "cryo";
}

Regime regime_from_string(const std::string& s) {
    if (s == "room")
        return Regime::Room;
    if (s == "cryo")
        return Regime::Cryo;
    throw ConfigError("regime must be 'room' or 'cryo', got '" + s + "'");
}

void PhysicalParams::validate() const {
    if (!(lambda_mn > 0.0))
        throw ConfigError("lambda_mn must be positive");
    if (gamma_bbr < 0.0 || gamma_cryo < 0.0 || gamma_ell < 0.0 || gamma_relay_cryo < 0.0)
        throw ConfigError("decay rates must be nonnegative");
    if (F < 0.0)
        throw ConfigError("electric field F must be nonnegative");
    for (double v : {C3_up_alpha, C3_beta_alpha, C3_up_down, p2_up_down, p2_beta_alpha,
                     delta0, F, lambda_mn}) {
        if (!std::isfinite(v))
            throw ConfigError("physical parameters must be finite");
    }
}

double PhysicalParams::main_decay_mhz(Regime regime) const {
    return regime == Regime::Room ? gamma_bbr * 1e-3 : gamma_cryo * 1e-6;
}

double PhysicalParams::relay_decay_mhz(Regime regime) const {
    return (regime == Regime::Room ? gamma_ell : gamma_relay_cryo) * 1e-3;
}

namespace {

struct Field {
    const char* name;
    double PhysicalParams::* member;
};

constexpr Field kFields[] = {
    {"C3_up_alpha", &PhysicalParams::C3_up_alpha},
    {"C3_beta_alpha", &PhysicalParams::C3_beta_alpha},
    {"C3_up_down", &PhysicalParams::C3_up_down},
    {"p2_up_down", &PhysicalParams::p2_up_down},
    {"p2_beta_alpha", &PhysicalParams::p2_beta_alpha},
    {"delta0", &PhysicalParams::delta0},
    {"F", &PhysicalParams::F},
    {"lambda_mn", &PhysicalParams::lambda_mn},
    {"gamma_bbr", &PhysicalParams::gamma_bbr},
    {"gamma_cryo", &PhysicalParams::gamma_cryo},
    {"gamma_ell", &PhysicalParams::gamma_ell},
    {"gamma_relay_cryo", &PhysicalParams::gamma_relay_cryo},
};

} // namespace

nlohmann::json to_json(const PhysicalParams& p) {
    nlohmann::json j;
    for (const Field& f : kFields)
        j[f.name] = p.*(f.member);
    return j;
}

PhysicalParams params_with_overrides(const PhysicalParams& base, const nlohmann::json& overrides) {
    if (!overrides.is_object())
        throw ConfigError("params overrides must be a JSON object");
    PhysicalParams p = base;
    for (const auto& [key, value] : overrides.items()) {
        bool known = false;
        for (const Field& f : kFields) {
            if (key == f.name) {
                if (!value.is_number())
                    throw ConfigError("params field '" + key + "' must be a number");
                p.*(f.member) = value.get<double>();
                known = true;
                break;
            }
        }
        if (!known)
            throw ConfigError("unknown params field '" + key + "'");
    }
    p.validate();
    return p;
}

PhysicalParams params_from_json(const nlohmann::json& j) {
    return params_with_overrides(PhysicalParams{}, j);
}

} // namespace rydrelay
