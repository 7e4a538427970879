#include "rydrelay/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rydrelay {

namespace {

constexpr double kDegenerateDistance = 1e-12; // μm

std::string pair_label(const AtomArray& array, int a, int b) {
    auto label = [&](int k) {
        std::ostringstream ss;
        ss << (array.atom(k).role == AtomRole::Main ? "main" : "relay") << " #" << k;
        return ss.str();
    };
    return label(a) + " and " + label(b);
}

} // namespace

double magic_angle() {
    static const double value = std::acos(std::sqrt(1.0 / 3.0));
    return value;
}

AtomArray AtomArray::from_atoms(std::vector<Atom> atoms, double min_distance) {
    if (atoms.empty())
        throw GeometryError("atom array must contain at least one atom");
    int n_main = 0;
    bool relay_seen = false;
    for (const Atom& atom : atoms) {
        if (!std::isfinite(atom.pos.x) || !std::isfinite(atom.pos.z))
            throw GeometryError("atom position must be finite");
        if (atom.role == AtomRole::Main) {
            if (relay_seen)
                throw GeometryError("main atoms must precede all relay atoms");
            ++n_main;
        } else {
            relay_seen = true;
        }
    }

    AtomArray array(std::move(atoms), n_main);
    const int m = array.size();
    for (int a = 0; a < m; ++a) {
        for (int b = a + 1; b < m; ++b) {
            const double dx = array.atom(a).pos.x - array.atom(b).pos.x;
            const double dz = array.atom(a).pos.z - array.atom(b).pos.z;
            const double r = std::hypot(dx, dz);
            if (r < min_distance) {
                std::ostringstream ss;
                ss << "atoms closer than the minimum distance (" << min_distance
                   << " μm): " << pair_label(array, a, b) << " at separation " << r;
                throw GeometryError(ss.str());
            }
        }
    }
    return array;
}

AtomArray AtomArray::without_atoms(const std::vector<int>& remove, double min_distance) const {
    std::vector<Atom> kept;
    kept.reserve(atoms_.size());
    for (int a = 0; a < size(); ++a) {
        if (std::find(remove.begin(), remove.end(), a) == remove.end())
            kept.push_back(atoms_[static_cast<std::size_t>(a)]);
    }
    return from_atoms(std::move(kept), min_distance);
}

PairGeometry pair_geometry(const Position& a, const Position& b) {
    const double dx = a.x - b.x;
    const double dz = a.z - b.z;
    const double r = std::hypot(dx, dz);
    if (r < kDegenerateDistance)
        throw GeometryError("degenerate geometry: identical atom positions");
    const double c = std::clamp(dz / r, -1.0, 1.0);
    return PairGeometry{r, std::acos(c)};
}

PairGeometry pair_geometry(const AtomArray& array, int a, int b) {
    if (a == b)
        throw GeometryError("pair geometry requires two distinct atoms");
    return pair_geometry(array.atom(a).pos, array.atom(b).pos);
}

namespace {

Position displaced(const Position& origin, double r, double theta) {
    return Position{origin.x + r * std::sin(theta), origin.z + r * std::cos(theta)};
}

Position reflect_through(const Position& p, const Position& center) {
    return Position{2.0 * center.x - p.x, 2.0 * center.z - p.z};
}

} // namespace

AtomArray build_pair_mirrored(double r_ij, double r_imu, double theta_imu,
                              double min_distance) {
    if (r_ij <= 0.0 || r_imu <= 0.0)
        throw GeometryError("pair geometry requires positive r_ij and r_imu");

    const Position i{0.0, 0.0};
    const Position j = displaced(i, r_ij, magic_angle());
    const Position mu = displaced(i, r_imu, theta_imu);
    const Position midpoint{0.5 * (i.x + j.x), 0.5 * (i.z + j.z)};
    const Position nu = reflect_through(mu, midpoint);

    return AtomArray::from_atoms({{i, AtomRole::Main},
                                  {j, AtomRole::Main},
                                  {mu, AtomRole::Relay},
                                  {nu, AtomRole::Relay}},
                                 min_distance);
}

AtomArray build_chain_mirrored(int n_main, double spacing, double r_imu,
                               double theta_imu, double min_distance) {
    if (n_main < 2)
        throw GeometryError("chain requires at least two main atoms");
    if (spacing <= 0.0 || r_imu <= 0.0)
        throw GeometryError("chain geometry requires positive spacing and r_imu");

    const double theta_m = magic_angle();
    std::vector<Atom> atoms;
    atoms.reserve(static_cast<std::size_t>(3 * n_main - 2));
    std::vector<Position> mains(static_cast<std::size_t>(n_main));
    for (int k = 0; k < n_main; ++k) {
        mains[static_cast<std::size_t>(k)] =
            displaced(Position{0.0, 0.0}, spacing * k, theta_m);
        atoms.push_back({mains[static_cast<std::size_t>(k)], AtomRole::Main});
    }
    // One mirrored relay pair per adjacent block, identical placement in
    // every block.
    for (int k = 0; k + 1 < n_main; ++k) {
        const Position& a = mains[static_cast<std::size_t>(k)];
        const Position& b = mains[static_cast<std::size_t>(k + 1)];
        const Position mu = displaced(a, r_imu, theta_imu);
        const Position midpoint{0.5 * (a.x + b.x), 0.5 * (a.z + b.z)};
        atoms.push_back({mu, AtomRole::Relay});
        atoms.push_back({reflect_through(mu, midpoint), AtomRole::Relay});
    }
    return AtomArray::from_atoms(std::move(atoms), min_distance);
}

nlohmann::json to_json(const AtomArray& array) {
    nlohmann::json atoms = nlohmann::json::array();
    for (const Atom& atom : array.atoms()) {
        atoms.push_back({{"x", atom.pos.x},
                         {"z", atom.pos.z},
                         {"role", atom.role == AtomRole::Main ? "main" : "relay"}});
    }
    return nlohmann::json{{"atoms", atoms}};
}

AtomArray array_from_json(const nlohmann::json& j, double min_distance) {
    if (!j.is_object() || !j.contains("atoms") || !j["atoms"].is_array())
        throw GeometryError("atom array JSON must be {\"atoms\": [...]}");
    std::vector<Atom> atoms;
    for (const auto& entry : j["atoms"]) {
        if (!entry.contains("x") || !entry.contains("z") || !entry.contains("role"))
            throw GeometryError("atom entry requires x, z and role");
        const std::string role = entry["role"].get<std::string>();
        if (role != "main" && role != "relay")
            throw GeometryError("atom role must be 'main' or 'relay', got '" + role + "'");
        atoms.push_back({Position{entry["x"].get<double>(), entry["z"].get<double>()},
                         role == "main" ? AtomRole::Main : AtomRole::Relay});
    }
    return AtomArray::from_atoms(std::move(atoms), min_distance);
}

} // namespace rydrelay
