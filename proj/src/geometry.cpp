#include "swimsim/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "swimsim/errors.hpp"

namespace swimsim {

namespace {

constexpr double kPi = std::numbers::pi;

double ball_volume(double radius) { return 4.0 / 3.0 * kPi * radius * radius * radius; }

// Volume of the intersection of two balls of equal radius whose centres are d apart.
double lens_volume(double radius, double d) {
    if (d >= 2.0 * radius) return 0.0;
    const double gap = 2.0 * radius - d;
    return kPi * (4.0 * radius + d) * gap * gap / 12.0;
}

Vec3 uniform_in_ball(std::mt19937_64& rng, double radius) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Vec3 dir;
    double len = 0.0;
    do {
        dir = {gauss(rng), gauss(rng), gauss(rng)};
        len = norm(dir);
    } while (len == 0.0);
    return dir * (radius * std::cbrt(unit(rng)) / len);
}

}  // namespace

BodyShape::BodyShape(Ball ball) : kind_(ball) {
    if (!(ball.radius > 0.0) || !std::isfinite(ball.radius))
        throw ConfigInvalid({"ball radius must be positive and finite"});
}

BodyShape::BodyShape(Box box) : kind_(box) {
    const Vec3& e = box.half_extents;
    for (int a = 0; a < 3; ++a)
        if (!(e[a] > 0.0) || !std::isfinite(e[a]))
            throw ConfigInvalid({"box half extents must be positive and finite"});
}

double BodyShape::circumradius() const {
    if (const auto* b = std::get_if<Ball>(&kind_)) return b->radius;
    return norm(std::get<Box>(kind_).half_extents);
}

Vec3 BodyShape::bounding_half_extents() const {
    if (const auto* b = std::get_if<Ball>(&kind_)) return {b->radius, b->radius, b->radius};
    return std::get<Box>(kind_).half_extents;
}

bool operator==(const BodyShape& a, const BodyShape& b) {
    if (a.is_ball() != b.is_ball()) return false;
    if (a.is_ball()) return std::get<Ball>(a.kind_).radius == std::get<Ball>(b.kind_).radius;
    return std::get<Box>(a.kind_).half_extents == std::get<Box>(b.kind_).half_extents;
}

double measure(const BodyShape& shape) {
    if (const auto* b = std::get_if<Ball>(&shape.kind())) return ball_volume(b->radius);
    const Vec3& e = std::get<Box>(shape.kind()).half_extents;
    return 8.0 * e.x * e.y * e.z;
}

int indicator(const BodyShape& shape, const Vec3& center, const Vec3& x) {
    const Vec3 d = x - center;
    if (const auto* b = std::get_if<Ball>(&shape.kind())) return dot(d, d) < b->radius * b->radius ? 1 : 0;
    const Vec3& e = std::get<Box>(shape.kind()).half_extents;
    return (std::fabs(d.x) < e.x && std::fabs(d.y) < e.y && std::fabs(d.z) < e.z) ? 1 : 0;
}

double boundary_margin(const BodyShape& shape, const Vec3& center, const Domain& domain) {
    const Vec3 e = shape.bounding_half_extents();
    double margin = INFINITY;
    for (int a = 0; a < 3; ++a) {
        margin = std::min(margin, center[a] - e[a]);
        margin = std::min(margin, domain.extents[a] - (center[a] + e[a]));
    }
    return margin;
}

bool closure_inside(const BodyShape& shape, const Vec3& center, const Domain& domain, double margin) {
    return boundary_margin(shape, center, domain) > margin;
}

double symmetric_difference_measure(const BodyShape& shape, const Vec3& shift) {
    if (const auto* b = std::get_if<Ball>(&shape.kind())) {
        const double d = norm(shift);
        if (d == 0.0) return 0.0;
        return 2.0 * (ball_volume(b->radius) - lens_volume(b->radius, d));
    }
    // Translated axis-aligned boxes intersect in a box whose side along axis a is
    // max(0, 2 e_a - |h_a|), for any direction of h.
    const Vec3& e = std::get<Box>(shape.kind()).half_extents;
    double overlap = 1.0;
    for (int a = 0; a < 3; ++a) overlap *= std::max(0.0, 2.0 * e[a] - std::fabs(shift[a]));
    return 2.0 * (measure(shape) - overlap);
}

MonteCarloEstimate symmetric_difference_measure_mc(const BodyShape& shape, const Vec3& shift,
                                                   std::uint64_t samples, std::uint64_t seed) {
    const Vec3 e = shape.bounding_half_extents();
    Vec3 lo, hi;
    for (int a = 0; a < 3; ++a) {
        lo[a] = std::min(-e[a], shift[a] - e[a]);
        hi[a] = std::max(e[a], shift[a] + e[a]);
    }
    const double box_volume = (hi.x - lo.x) * (hi.y - lo.y) * (hi.z - lo.z);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(lo.x, hi.x), uy(lo.y, hi.y), uz(lo.z, hi.z);
    const Vec3 origin{};
    std::uint64_t hits = 0;
    for (std::uint64_t s = 0; s < samples; ++s) {
        const Vec3 x{ux(rng), uy(rng), uz(rng)};
        if (indicator(shape, origin, x) != indicator(shape, shift, x)) ++hits;
    }
    const double p = static_cast<double>(hits) / static_cast<double>(samples);
    return {box_volume * p, box_volume * std::sqrt(p * (1.0 - p) / static_cast<double>(samples)), samples, seed};
}

MonteCarloEstimate measure_mc(const BodyShape& shape, std::uint64_t samples, std::uint64_t seed) {
    const Vec3 e = shape.bounding_half_extents();
    const double box_volume = 8.0 * e.x * e.y * e.z;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(-e.x, e.x), uy(-e.y, e.y), uz(-e.z, e.z);
    std::uint64_t hits = 0;
    for (std::uint64_t s = 0; s < samples; ++s)
        hits += static_cast<std::uint64_t>(indicator(shape, Vec3{}, Vec3{ux(rng), uy(rng), uz(rng)}));
    const double p = static_cast<double>(hits) / static_cast<double>(samples);
    return {box_volume * p, box_volume * std::sqrt(p * (1.0 - p) / static_cast<double>(samples)), samples, seed};
}

ShiftBoundConstants estimate_lipschitz_C(const BodyShape& shape, double h0, std::span<const Vec3> shifts) {
    if (!(h0 > 0.0)) throw ConfigInvalid({"h0 must be positive"});
    ShiftBoundConstants out{h0, 0.0, 0, 0, Vec3{}};
    for (const Vec3& h : shifts) {
        const double len = norm(h);
        if (len == 0.0) continue;
        ++out.samples;
        const double ratio = symmetric_difference_measure(shape, h) / len;
        if (ratio > out.C) {
            out.C = ratio;
            out.argmax = h;
        }
    }
    return out;
}

ShiftBoundConstants estimate_lipschitz_C(const BodyShape& shape, double h0, std::uint64_t n_samples,
                                         std::uint64_t seed) {
    if (!(h0 > 0.0)) throw ConfigInvalid({"h0 must be positive"});
    if (n_samples < 1) throw ConfigInvalid({"n_samples must be at least 1"});
    std::mt19937_64 rng(seed);
    std::vector<Vec3> shifts;
    shifts.reserve(n_samples);
    while (shifts.size() < n_samples) {
        const Vec3 h = uniform_in_ball(rng, h0);
        if (norm(h) > 0.0) shifts.push_back(h);
    }
    ShiftBoundConstants out = estimate_lipschitz_C(shape, h0, std::span<const Vec3>(shifts));
    out.seed = seed;
    return out;
}

bool Assumption21Report::violates(Assumption21Clause clause) const {
    return std::any_of(violations.begin(), violations.end(),
                       [clause](const Assumption21Violation& v) { return v.clause == clause; });
}

std::string to_string(Assumption21Clause clause) {
    switch (clause) {
        case Assumption21Clause::BodyCount: return "body-count";
        case Assumption21Clause::ShapeRadius: return "shape-radius";
        case Assumption21Clause::RestLength: return "rest-length";
        case Assumption21Clause::Containment: return "containment";
        case Assumption21Clause::Separation: return "separation";
    }
    return "unknown";
}

Assumption21Report validate_assumption_21(std::span<const BodyShape> shapes, std::span<const Vec3> centers,
                                          std::span<const double> rest_lengths, double r, const Domain& domain) {
    Assumption21Report report;
    auto add = [&report](Assumption21Clause c, std::vector<int> idx, const std::string& msg) {
        report.violations.push_back({c, std::move(idx), msg});
    };
    const int n = static_cast<int>(centers.size());
    if (n <= 2) add(Assumption21Clause::BodyCount, {n}, "need n > 2 bodies, got " + std::to_string(n));
    if (static_cast<int>(shapes.size()) != n) {
        add(Assumption21Clause::BodyCount, {static_cast<int>(shapes.size())}, "one shape per centre required");
        return report;
    }
    for (int i = 0; i < n; ++i) {
        if (shapes[i].circumradius() > r) {
            std::ostringstream os;
            os << "shape " << i + 1 << " does not fit in the ball of radius r = " << r;
            add(Assumption21Clause::ShapeRadius, {i}, os.str());
        }
    }
    for (int i = 0; i < static_cast<int>(rest_lengths.size()); ++i) {
        if (!(rest_lengths[i] > 2.0 * r)) {
            std::ostringstream os;
            os << "rest length l_" << i + 1 << " = " << rest_lengths[i] << " violates l > 2r = " << 2.0 * r;
            add(Assumption21Clause::RestLength, {i}, os.str());
        }
    }
    for (int i = 0; i < n; ++i) {
        if (!closure_inside(shapes[i], centers[i], domain)) {
            std::ostringstream os;
            os << "closure of body " << i + 1 << " at " << centers[i] << " is not inside the domain";
            add(Assumption21Clause::Containment, {i}, os.str());
        }
    }
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double d = norm(centers[i] - centers[j]);
            if (!(d > 2.0 * r)) {
                std::ostringstream os;
                os << "bodies " << i + 1 << " and " << j + 1 << " are " << d << " apart, need > 2r = " << 2.0 * r;
                add(Assumption21Clause::Separation, {i, j}, os.str());
            }
        }
    }
    return report;
}

}  // namespace swimsim
