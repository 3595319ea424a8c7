#include "swimsim/forces.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "swimsim/errors.hpp"

namespace swimsim {

namespace {

std::pair<Vec3, Vec3> hooke_pair_at(const Vec3& z_prev, const Vec3& z_cur, double k, double l,
                                    const ForceGuards& guards, int link) {
    const Vec3 d = z_cur - z_prev;
    const double len = norm(d);
    if (len < guards.degenerate) {
        std::ostringstream os;
        os << "link " << link + 1 << ": adjacent centres coincide (distance " << len << ")";
        throw DegenerateConfiguration(os.str(), link);
    }
    const Vec3 f = d * (k * (len - l) / len);
    return {f, -f};
}

void check_arms(const Vec3& arm1, const Vec3& arm2, const ForceGuards& guards, int joint) {
    if (norm(arm1) < guards.degenerate || norm(arm2) < guards.degenerate)
        throw DegenerateConfiguration("joint " + std::to_string(joint + 1) + ": vanishing arm", joint);
    const double s = norm(cross(arm1, arm2)) / (norm(arm1) * norm(arm2));
    if (s < guards.collinear) {
        std::ostringstream os;
        os << "joint " << joint + 1 << ": arms are collinear (sine " << s << ")";
        throw CollinearJoint(os.str(), joint);
    }
}

RotationDirections cross_product_directions(const Vec3& z_prev, const Vec3& z_cen, const Vec3& z_next, int fold_sign,
                                            const ForceGuards& guards, int joint) {
    const Vec3 arm1 = z_prev - z_cen;
    const Vec3 arm2 = z_next - z_cen;
    check_arms(arm1, arm2, guards, joint);
    const Vec3 normal = cross(arm1, arm2);
    // arm1 x (arm1 x arm2) points away from arm2; (arm1 x arm2) x arm2 points away from arm1.
    const Vec3 v1 = cross(arm1, normal);
    const Vec3 v2 = cross(normal, arm2);
    const double s = static_cast<double>(fold_sign);
    return {v1 * (-s * norm(arm1) / norm(v1)), v2 * (s * norm(arm2) / norm(v2))};
}

RotationDirections gram_schmidt_directions(const Vec3& z_prev, const Vec3& z_cen, const Vec3& z_next, int fold_sign,
                                           const ForceGuards& guards, int joint) {
    const Vec3 arm1 = z_prev - z_cen;
    const Vec3 arm2 = z_next - z_cen;
    check_arms(arm1, arm2, guards, joint);
    const Vec3 e1 = arm1 / norm(arm1);
    const Vec3 e2 = arm2 / norm(arm2);
    const Vec3 t1 = arm2 - e1 * dot(arm2, e1);
    const Vec3 t2 = arm1 - e2 * dot(arm1, e2);
    const double s = static_cast<double>(fold_sign);
    return {t1 * (s * norm(arm1) / norm(t1)), t2 * (-s * norm(arm2) / norm(t2))};
}

void check_fold_sign(int fold_sign) {
    if (fold_sign != 1 && fold_sign != -1) throw ConfigInvalid({"fold_sign must be +1 or -1"});
}

RotationTriple rotation_triple_at(const Vec3& z_prev, const Vec3& z_cen, const Vec3& z_next, double v_coeff,
                                  int fold_sign, const ForceGuards& guards, RotationConstruction construction,
                                  int joint) {
    check_fold_sign(fold_sign);
    const RotationDirections dir =
        construction == RotationConstruction::CrossProduct
            ? cross_product_directions(z_prev, z_cen, z_next, fold_sign, guards, joint)
            : gram_schmidt_directions(z_prev, z_cen, z_next, fold_sign, guards, joint);
    const Vec3 arm1 = z_prev - z_cen;
    const Vec3 arm2 = z_next - z_cen;
    const double ratio = dot(arm1, arm1) / dot(arm2, arm2);
    RotationTriple t;
    t.f_prev = dir.a * v_coeff;
    t.f_next = dir.b * (-v_coeff * ratio);
    t.f_cen = -(t.f_prev + t.f_next);
    return t;
}

}  // namespace

bool SwimmerConfig::equal_measures(double rel_tol) const {
    if (shapes.empty()) return true;
    const double m0 = measure(shapes.front());
    return std::all_of(shapes.begin(), shapes.end(),
                       [&](const BodyShape& s) { return std::fabs(measure(s) - m0) <= rel_tol * m0; });
}

std::vector<std::string> SwimmerConfig::validate(bool require_equal_measure) const {
    std::vector<std::string> errors;
    const int nb = n();
    if (nb <= 2) errors.push_back("swimmer needs n > 2 bodies, got " + std::to_string(nb));
    if (static_cast<int>(k.size()) != nb - 1)
        errors.push_back("expected " + std::to_string(std::max(nb - 1, 0)) + " spring constants, got " + std::to_string(k.size()));
    if (static_cast<int>(l.size()) != nb - 1)
        errors.push_back("expected " + std::to_string(std::max(nb - 1, 0)) + " rest lengths, got " + std::to_string(l.size()));
    if (static_cast<int>(fold_sign.size()) != std::max(nb - 2, 0))
        errors.push_back("expected " + std::to_string(std::max(nb - 2, 0)) + " fold signs, got " + std::to_string(fold_sign.size()));
    if (!(r > 0.0)) errors.push_back("r must be positive");
    for (std::size_t i = 0; i < k.size(); ++i)
        if (!(k[i] > 0.0) || !std::isfinite(k[i]))
            errors.push_back("spring constant k_" + std::to_string(i + 1) + " must be positive (k_i > 0)");
    for (std::size_t i = 0; i < l.size(); ++i)
        if (!(l[i] > 2.0 * r)) {
            std::ostringstream os;
            os << "rest length l_" << i + 1 << " = " << l[i] << " must satisfy the strict inequality l_{i-1} > 2r = " << 2.0 * r;
            errors.push_back(os.str());
        }
    for (std::size_t j = 0; j < fold_sign.size(); ++j)
        if (fold_sign[j] != 1 && fold_sign[j] != -1)
            errors.push_back("fold_sign[" + std::to_string(j) + "] must be +1 or -1");
    for (int i = 0; i < nb; ++i)
        if (shapes[i].circumradius() > r)
            errors.push_back("shape " + std::to_string(i + 1) + " does not fit in the ball of radius r");
    if (require_equal_measure && !equal_measures())
        errors.push_back("equal body measures are required for force balance but the shapes differ");
    return errors;
}

std::pair<Vec3, Vec3> hooke_pair(const Vec3& z_prev, const Vec3& z_cur, double k, double l, const ForceGuards& guards) {
    return hooke_pair_at(z_prev, z_cur, k, l, guards, 0);
}

RotationDirections rotation_directions(const Vec3& z_prev, const Vec3& z_cen, const Vec3& z_next, int fold_sign,
                                       const ForceGuards& guards) {
    check_fold_sign(fold_sign);
    return cross_product_directions(z_prev, z_cen, z_next, fold_sign, guards, 0);
}

RotationDirections rotation_directions_gram_schmidt(const Vec3& z_prev, const Vec3& z_cen, const Vec3& z_next,
                                                    int fold_sign, const ForceGuards& guards) {
    check_fold_sign(fold_sign);
    return gram_schmidt_directions(z_prev, z_cen, z_next, fold_sign, guards, 0);
}

RotationTriple rotation_triple(const Vec3& z_prev, const Vec3& z_cen, const Vec3& z_next, double v_coeff,
                               int fold_sign, const ForceGuards& guards, RotationConstruction construction) {
    return rotation_triple_at(z_prev, z_cen, z_next, v_coeff, fold_sign, guards, construction, 0);
}

BodyForceSet assemble_body_forces(std::span<const Vec3> z, const ControlSample& v, const SwimmerConfig& cfg,
                                  const ForceGuards& guards, ForceTerms terms) {
    const int n = cfg.n();
    if (static_cast<int>(z.size()) != n) throw ConfigInvalid({"state has " + std::to_string(z.size()) + " points, swimmer has " + std::to_string(n)});
    if (static_cast<int>(v.v.size()) != cfg.joints())
        throw ConfigInvalid({"control sample has " + std::to_string(v.v.size()) + " entries, expected " + std::to_string(cfg.joints())});
    BodyForceSet out{std::vector<Vec3>(static_cast<std::size_t>(n))};
    if (terms.elastic) {
        for (int i = 0; i + 1 < n; ++i) {
            const auto [f_prev, f_cur] = hooke_pair_at(z[i], z[i + 1], cfg.k[i], cfg.l[i], guards, i);
            out.density[i] += f_prev;
            out.density[i + 1] += f_cur;
        }
    }
    if (terms.rotation) {
        for (int j = 0; j < cfg.joints(); ++j) {
            const RotationTriple t =
                rotation_triple_at(z[j], z[j + 1], z[j + 2], v.v[j], cfg.fold_sign[j], guards, cfg.construction, j);
            out.density[j] += t.f_prev;
            out.density[j + 1] += t.f_cen;
            out.density[j + 2] += t.f_next;
        }
    }
    return out;
}

Vec3 net_force(const BodyForceSet& f, const SwimmerConfig& cfg) {
    Vec3 sum;
    for (int i = 0; i < cfg.n(); ++i) sum += f.density[i] * measure(cfg.shapes[i]);
    return sum;
}

double force_scale(const BodyForceSet& f, const SwimmerConfig& cfg) {
    double sum = 0.0;
    for (int i = 0; i < cfg.n(); ++i) sum += norm(f.density[i]) * measure(cfg.shapes[i]);
    return sum;
}

Vec3 net_torque(const BodyForceSet& f, std::span<const Vec3> z, const SwimmerConfig& cfg, const Vec3& pivot) {
    Vec3 sum;
    for (int i = 0; i < cfg.n(); ++i) sum += cross(z[i] - pivot, f.density[i] * measure(cfg.shapes[i]));
    return sum;
}

double torque_scale(const BodyForceSet& f, std::span<const Vec3> z, const SwimmerConfig& cfg, const Vec3& pivot) {
    double sum = 0.0;
    for (int i = 0; i < cfg.n(); ++i) sum += norm(z[i] - pivot) * norm(f.density[i]) * measure(cfg.shapes[i]);
    return sum;
}

namespace {

ForceDensityField spread_impl(const BodyForceSet& forces, std::span<const Vec3> z, const SwimmerConfig& cfg,
                              const GridSpec& grid, bool rescale) {
    ForceDensityField field(grid);
    for (int i = 0; i < cfg.n(); ++i) {
        if (!closure_inside(cfg.shapes[i], z[i], grid.domain))
            throw BodyOutsideDomain("body " + std::to_string(i + 1) + " leaves the domain", i);
        const BodyCoverage cov = covered_cells(grid, cfg.shapes[i], z[i]);
        if (cov.touches_boundary_layer)
            throw BodyOutsideDomain("body " + std::to_string(i + 1) + " covers a wall-adjacent cell", i);
        if (cov.cells.empty())
            throw ConfigInvalid({"body " + std::to_string(i + 1) + " covers no cell centre; refine the grid"});
        const double scale =
            rescale ? measure(cfg.shapes[i]) / (static_cast<double>(cov.cells.size()) * grid.cell_volume()) : 1.0;
        const Vec3 d = forces.density[i] * scale;
        for (std::size_t c : cov.cells) field.data[c] += d;
    }
    return field;
}

}  // namespace

ForceDensityField spread_to_grid(const BodyForceSet& forces, std::span<const Vec3> z, const SwimmerConfig& cfg,
                                 const GridSpec& grid) {
    return spread_impl(forces, z, cfg, grid, true);
}

ForceDensityField spread_to_grid_unscaled(const BodyForceSet& forces, std::span<const Vec3> z,
                                          const SwimmerConfig& cfg, const GridSpec& grid) {
    return spread_impl(forces, z, cfg, grid, false);
}

Vec3 grid_integral(const GridSpec& grid, const ForceDensityField& f) {
    Vec3 sum;
    for (const Vec3& c : f.data) sum += c;
    return sum * grid.cell_volume();
}

}  // namespace swimsim
