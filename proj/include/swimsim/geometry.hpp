#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "swimsim/vec3.hpp"

namespace swimsim {

struct Ball {
    double radius;
};

/// Axis-aligned box centred at the origin.
struct Box {
    Vec3 half_extents;
};

/// Reference shape S_i(0) of one body part: open, bounded, connected and
/// point-symmetric about the origin. Translated copies keep their orientation.
class BodyShape {
public:
    explicit BodyShape(Ball ball);
    explicit BodyShape(Box box);

    static BodyShape ball(double radius) { return BodyShape(Ball{radius}); }
    static BodyShape box(const Vec3& half_extents) { return BodyShape(Box{half_extents}); }

    bool is_ball() const { return std::holds_alternative<Ball>(kind_); }
    const std::variant<Ball, Box>& kind() const { return kind_; }

    /// Radius of the smallest origin-centred ball containing the shape.
    double circumradius() const;
    /// Half-width of the axis-aligned bounding box.
    Vec3 bounding_half_extents() const;

    friend bool operator==(const BodyShape& a, const BodyShape& b);

private:
    std::variant<Ball, Box> kind_;
};

/// Ω = (0, Lx) x (0, Ly) x (0, Lz).
struct Domain {
    Vec3 extents{1.0, 1.0, 1.0};

    double diagonal() const { return norm(extents); }
    double volume() const { return extents.x * extents.y * extents.z; }
};

double measure(const BodyShape& shape);

/// 1 iff x lies in the open shape translated to `center`; the boundary counts as outside.
int indicator(const BodyShape& shape, const Vec3& center, const Vec3& x);

/// Closed shape translated to `center` lies in Ω with at least `margin` to spare.
bool closure_inside(const BodyShape& shape, const Vec3& center, const Domain& domain, double margin = 0.0);

/// Smallest distance from the translated shape's bounding box to a wall (negative if it pokes out).
double boundary_margin(const BodyShape& shape, const Vec3& center, const Domain& domain);

/// Volume of (S ∪ S(h)) \ (S ∩ S(h)), exact for both built-in shapes.
double symmetric_difference_measure(const BodyShape& shape, const Vec3& shift);

struct MonteCarloEstimate {
    double value;
    double std_error;
    std::uint64_t samples;
    std::uint64_t seed;
};

MonteCarloEstimate symmetric_difference_measure_mc(const BodyShape& shape, const Vec3& shift,
                                                   std::uint64_t samples, std::uint64_t seed);
MonteCarloEstimate measure_mc(const BodyShape& shape, std::uint64_t samples, std::uint64_t seed);

struct ShiftBoundConstants {
    double h0;
    double C;
    std::uint64_t samples;
    std::uint64_t seed;
    Vec3 argmax;  ///< shift that realised C
};

/// C = max symdiff(h)/|h| over shifts drawn uniformly from the open ball of radius h0.
ShiftBoundConstants estimate_lipschitz_C(const BodyShape& shape, double h0, std::uint64_t n_samples,
                                         std::uint64_t seed = 20110901);
/// Same maximisation over an explicit list of shifts (zero shifts are skipped).
ShiftBoundConstants estimate_lipschitz_C(const BodyShape& shape, double h0, std::span<const Vec3> shifts);

enum class Assumption21Clause { BodyCount, ShapeRadius, RestLength, Containment, Separation };

struct Assumption21Violation {
    Assumption21Clause clause;
    std::vector<int> indices;
    std::string message;
};

struct Assumption21Report {
    std::vector<Assumption21Violation> violations;

    bool passed() const { return violations.empty(); }
    bool violates(Assumption21Clause clause) const;
};

/// Checks the admissibility of the initial configuration: n > 2, every shape inside the
/// r-ball, l_i > 2r, closures inside Ω, and pairwise centre distances > 2r.
Assumption21Report validate_assumption_21(std::span<const BodyShape> shapes, std::span<const Vec3> centers,
                                          std::span<const double> rest_lengths, double r, const Domain& domain);

std::string to_string(Assumption21Clause clause);

}  // namespace swimsim
