#ifndef RYDRELAY_GEOMETRY_HPP
#define RYDRELAY_GEOMETRY_HPP

#include <string>
#include <vector>

#include "json.hpp"

#include "rydrelay/errors.hpp"

namespace rydrelay {

/// Polar angle of the "magic" direction, arccos(sqrt(1/3)), at which the
/// near-field angular factor 3cos^2(theta) - 1 vanishes.
double magic_angle();

/// Planar position in the x-z plane, micrometers. The z axis is the
/// quantization axis set by the static fields.
struct Position {
    double x = 0.0;
    double z = 0.0;
};

enum class AtomRole { Main, Relay };

struct Atom {
    Position pos;
    AtomRole role = AtomRole::Main;
};

/// Distance (μm) and polar angle (rad, in [0, π]) of a connection vector.
struct PairGeometry {
    double r = 0.0;
    double theta = 0.0;
};

/// An ordered, immutable collection of main and relay atoms.
///
/// Main atoms always occupy the leading indices 0..N-1, relays N..M-1.
/// Construction enforces a minimum pairwise distance (default 1 μm).
class AtomArray {
public:
    /// Builds an array from explicit atoms. Throws GeometryError if a relay
    /// precedes a main atom or any pair violates the minimum distance.
    static AtomArray from_atoms(std::vector<Atom> atoms, double min_distance = 1.0);

    int num_main() const noexcept { return n_main_; }
    int num_relay() const noexcept { return static_cast<int>(atoms_.size()) - n_main_; }
    int size() const noexcept { return static_cast<int>(atoms_.size()); }

    const Atom& atom(int a) const { return atoms_.at(static_cast<std::size_t>(a)); }
    const std::vector<Atom>& atoms() const noexcept { return atoms_; }

    /// Global index of relay k (k in 0..num_relay()-1).
    int relay_index(int k) const { return n_main_ + k; }

    /// Returns a copy with the given atoms removed (indices into this array).
    AtomArray without_atoms(const std::vector<int>& remove, double min_distance = 1.0) const;

private:
    AtomArray(std::vector<Atom> atoms, int n_main)
        : atoms_(std::move(atoms)), n_main_(n_main) {}

    std::vector<Atom> atoms_;
    int n_main_ = 0;
};

/// Distance and polar angle between atoms a and b of an array.
/// theta is the angle between (r_a - r_b) and the z axis, reported in [0, π];
/// only cos^2(theta) enters the couplings, so the representative under
/// a/b swap is irrelevant. Throws GeometryError for coincident positions.
PairGeometry pair_geometry(const AtomArray& array, int a, int b);
PairGeometry pair_geometry(const Position& a, const Position& b);

/// Two main atoms separated by r_ij along the magic-angle direction, plus a
/// relay at distance r_imu / polar angle theta_imu from the first main and a
/// second relay at the point reflection of the first through the pair
/// midpoint.
AtomArray build_pair_mirrored(double r_ij, double r_imu, double theta_imu,
                              double min_distance = 1.0);

/// N equally spaced main atoms on the magic-angle line; every adjacent pair
/// carries one mirrored relay pair placed exactly as in build_pair_mirrored,
/// so N_R = 2(N-1).
AtomArray build_chain_mirrored(int n_main, double spacing, double r_imu,
                               double theta_imu, double min_distance = 1.0);

/// JSON document {"atoms": [{"x":..., "z":..., "role": "main"|"relay"}, ...]}.
nlohmann::json to_json(const AtomArray& array);
AtomArray array_from_json(const nlohmann::json& j, double min_distance = 1.0);

} // namespace rydrelay

#endif
