#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "swimsim/geometry.hpp"
#include "swimsim/grid.hpp"
#include "swimsim/vec3.hpp"

namespace swimsim {

enum class RotationConstruction { CrossProduct, GramSchmidt };

/// Static description of an n-part swimmer. Link i joins bodies i and i+1 (0-based);
/// joint j is centred on body j+1 and owns control coefficient v[j].
struct SwimmerConfig {
    std::vector<BodyShape> shapes;
    std::vector<double> k;        ///< n-1 spring constants
    std::vector<double> l;        ///< n-1 rest lengths
    double r = 0.0;               ///< radius of the neighbourhood holding every shape
    std::vector<int> fold_sign;   ///< n-2 entries in {-1,+1}; +1 closes the joint angle
    RotationConstruction construction = RotationConstruction::CrossProduct;

    int n() const { return static_cast<int>(shapes.size()); }
    int joints() const { return n() - 2; }
    bool equal_measures(double rel_tol = 1e-12) const;

    /// Every violated invariant, one message each.
    std::vector<std::string> validate(bool require_equal_measure) const;
};

/// Rotation coefficients v_1..v_{n-2} at one instant.
struct ControlSample {
    std::vector<double> v;
};

/// Constant force density acting on each body part.
struct BodyForceSet {
    std::vector<Vec3> density;
};

/// Numerical guards for the configurations where the force term is undefined.
struct ForceGuards {
    double degenerate = 1e-9;  ///< minimum centre distance / arm length
    double collinear = 1e-9;   ///< minimum |arm1 x arm2| / (|arm1| |arm2|)

    static ForceGuards for_domain(const Domain& d) { return {1e-9 * d.diagonal(), 1e-9}; }
};

/// Hooke force of one link: the first entry acts on z_prev, the second (its negative) on z_cur.
std::pair<Vec3, Vec3> hooke_pair(const Vec3& z_prev, const Vec3& z_cur, double k, double l,
                                 const ForceGuards& guards = {});

struct RotationDirections {
    Vec3 a;  ///< perpendicular to z_prev - z_cen, same length
    Vec3 b;  ///< perpendicular to z_next - z_cen, same length
};

RotationDirections rotation_directions(const Vec3& z_prev, const Vec3& z_cen, const Vec3& z_next, int fold_sign,
                                       const ForceGuards& guards = {});
RotationDirections rotation_directions_gram_schmidt(const Vec3& z_prev, const Vec3& z_cen, const Vec3& z_next,
                                                    int fold_sign, const ForceGuards& guards = {});

struct RotationTriple {
    Vec3 f_prev;
    Vec3 f_next;
    Vec3 f_cen;
};

RotationTriple rotation_triple(const Vec3& z_prev, const Vec3& z_cen, const Vec3& z_next, double v_coeff,
                               int fold_sign, const ForceGuards& guards = {},
                               RotationConstruction construction = RotationConstruction::CrossProduct);

/// Which sums of the force term to include.
struct ForceTerms {
    bool elastic = true;
    bool rotation = true;
};

BodyForceSet assemble_body_forces(std::span<const Vec3> z, const ControlSample& v, const SwimmerConfig& cfg,
                                  const ForceGuards& guards = {}, ForceTerms terms = {});

/// Σ d_i mes(S_i).
Vec3 net_force(const BodyForceSet& f, const SwimmerConfig& cfg);
/// Σ |d_i| mes(S_i), the scale against which net_force is judged.
double force_scale(const BodyForceSet& f, const SwimmerConfig& cfg);
/// Σ (z_i - pivot) x d_i mes(S_i); each body's torque integral reduces to its centre by symmetry.
Vec3 net_torque(const BodyForceSet& f, std::span<const Vec3> z, const SwimmerConfig& cfg, const Vec3& pivot);
double torque_scale(const BodyForceSet& f, std::span<const Vec3> z, const SwimmerConfig& cfg, const Vec3& pivot);

/// Spread per-body densities onto cells whose centres lie in the body. Each body's density is
/// rescaled by mes(S_i) / (covered volume) so the grid integral of its force equals d_i mes(S_i).
ForceDensityField spread_to_grid(const BodyForceSet& forces, std::span<const Vec3> z, const SwimmerConfig& cfg,
                                 const GridSpec& grid);

/// Plain sampling d_i ξ_i(cell centre) without the discrete-measure rescaling.
ForceDensityField spread_to_grid_unscaled(const BodyForceSet& forces, std::span<const Vec3> z,
                                          const SwimmerConfig& cfg, const GridSpec& grid);

Vec3 grid_integral(const GridSpec& grid, const ForceDensityField& f);

}  // namespace swimsim
