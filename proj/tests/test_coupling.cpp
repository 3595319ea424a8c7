#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "swimsim/coupling.hpp"
#include "swimsim/errors.hpp"

using namespace swimsim;

namespace {

// Symmetric V in the plane z = 1/2: the mirror x -> 1 - x swaps bodies 1 and 3.
ScenarioConfig v_scenario(double arm = 0.2) {
    ScenarioConfig cfg;
    cfg.cells = {16, 16, 16};
    cfg.nu = 1.0;
    cfg.dt = 1e-3;
    cfg.T = 5e-3;
    cfg.swimmer.r = 0.06;
    cfg.swimmer.shapes.assign(3, BodyShape::ball(0.06));
    cfg.swimmer.k = {5.0, 5.0};
    cfg.swimmer.l = {0.2, 0.2};
    cfg.swimmer.fold_sign = {1};
    const double s = arm / std::sqrt(2.0);
    cfg.centers = {{0.5 - s, 0.45, 0.5}, {0.5, 0.45 + s, 0.5}, {0.5 + s, 0.45, 0.5}};
    cfg.controls = ControlSchedule::constant({0.0});
    return cfg;
}

// L-shaped swimmer with every link exactly at its (dyadic) rest length.
ScenarioConfig rest_scenario() {
    ScenarioConfig cfg = v_scenario();
    cfg.swimmer.l = {0.25, 0.25};
    cfg.centers = {{0.25, 0.375, 0.5}, {0.5, 0.375, 0.5}, {0.5, 0.625, 0.5}};
    return cfg;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path scratch_dir(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("swimsim_test_coupling_" + name);
    std::filesystem::remove_all(p);
    return p;
}

}  // namespace

TEST_CASE("piecewise-constant controls") {
    const ControlSchedule c({0.0, 1.0, 2.0}, {{1.0}, {-3.0}, {2.0}});
    CHECK(c.at(0.0).v[0] == 1.0);
    CHECK(c.at(0.999).v[0] == 1.0);
    CHECK(c.at(1.0).v[0] == -3.0);
    CHECK(c.at(5.0).v[0] == 2.0);
    CHECK(c.v_inf() == 3.0);
    CHECK(c.validate(1, 3.0).empty());
    CHECK_FALSE(c.validate(2, 3.0).empty());
    CHECK_FALSE(ControlSchedule({0.0, 0.0}, {{1.0}, {1.0}}).validate(1, 1.0).empty());
    CHECK_FALSE(ControlSchedule({0.5}, {{1.0}}).validate(1, 1.0).empty());
}

TEST_CASE("rest state with zero controls is a fixed point of the coupled march") {
    const ScenarioConfig cfg = rest_scenario();
    const RunResult r = run_scenario(cfg, true);
    REQUIRE_FALSE(r.violation);
    REQUIRE(r.trajectory.size() == static_cast<std::size_t>(cfg.steps() + 1));
    for (const auto& s : r.trajectory)
        for (std::size_t i = 0; i < s.z.size(); ++i) CHECK(s.z[i] == cfg.centers[i]);
    for (const auto& u : r.velocity) CHECK(max_abs(u) == 0.0);
    for (const auto& d : r.diagnostics) CHECK(d.kinetic == 0.0);
}

TEST_CASE("stretched V contracts symmetrically about its mirror plane") {
    ScenarioConfig cfg = v_scenario(0.26);
    cfg.T = 0.01;
    const RunResult r = run_scenario(cfg);
    REQUIRE_FALSE(r.violation);
    const auto& z0 = r.trajectory.front().z;
    const auto& z1 = r.trajectory.back().z;
    const Vec3 d1 = z1[0] - z0[0], d3 = z1[2] - z0[2], d2 = z1[1] - z0[1];
    const double scale = norm(d1);
    REQUIRE(scale > 0.0);
    // Ends move towards the middle body along their links.
    const Vec3 link1 = z0[1] - z0[0];
    CHECK(dot(d1 - d2, link1) > 0.0);
    // Mirror x -> 1 - x maps body 1 onto body 3 and fixes body 2.
    CHECK(std::fabs(d1.x + d3.x) <= 1e-10 * scale);
    CHECK(std::fabs(d1.y - d3.y) <= 1e-10 * scale);
    CHECK(std::fabs(d2.x) <= 1e-10 * scale);
    // Mirror z -> 1 - z fixes the whole swimmer.
    for (int i = 0; i < 3; ++i) CHECK(std::fabs(z1[i].z - 0.5) <= 1e-10 * scale);
}

TEST_CASE("mirror image of a V run is the mirrored trajectory") {
    ScenarioConfig a = v_scenario(0.24);
    a.controls = ControlSchedule::constant({3.0});
    a.T = 0.008;
    ScenarioConfig b = a;
    for (auto& z : b.centers) z.y = 1.0 - z.y;
    const RunResult ra = run_scenario(a), rb = run_scenario(b);
    REQUIRE(ra.trajectory.size() == rb.trajectory.size());
    double motion = 0.0, mismatch = 0.0;
    for (std::size_t n = 0; n < ra.trajectory.size(); ++n)
        for (int i = 0; i < 3; ++i) {
            const Vec3 p = ra.trajectory[n].z[i];
            const Vec3 q = rb.trajectory[n].z[i];
            motion = std::max(motion, norm(p - a.centers[i]));
            mismatch = std::max(mismatch, norm(Vec3{p.x - q.x, p.y - (1.0 - q.y), p.z - q.z}));
        }
    REQUIRE(motion > 0.0);
    CHECK(mismatch <= 1e-10 * motion);
}

TEST_CASE("net internal force and torque stay at roundoff every step") {
    ScenarioConfig cfg = v_scenario(0.23);
    cfg.controls = ControlSchedule({0.0, 0.004}, {{4.0}, {-2.0}});
    cfg.T = 0.01;
    const RunResult r = run_scenario(cfg);
    REQUIRE_FALSE(r.violation);
    REQUIRE(r.diagnostics.size() == 10);
    for (const auto& d : r.diagnostics) {
        CHECK(d.force_scale > 0.0);
        CHECK(d.net_force <= 1e-12 * d.force_scale);
        CHECK(d.net_torque <= 1e-12 * d.torque_scale);
        CHECK(d.divergence <= 1e-10);
        CHECK(d.status == "ok");
    }
}

TEST_CASE("horizon shorter than one step yields the initial state plus one") {
    ScenarioConfig cfg = v_scenario(0.22);
    cfg.T = 0.4 * cfg.dt;
    const RunResult r = run_scenario(cfg);
    CHECK(r.trajectory.size() == 2);
    CHECK(r.diagnostics.size() == 1);
}

TEST_CASE("replays are bit-identical, including the CSV files") {
    ScenarioConfig cfg = v_scenario(0.25);
    cfg.controls = ControlSchedule::constant({5.0});
    cfg.T = 0.006;
    const auto d1 = scratch_dir("a"), d2 = scratch_dir("b");
    cfg.output.directory = d1.string();
    const RunResult r1 = run_scenario(cfg);
    cfg.output.directory = d2.string();
    const RunResult r2 = run_scenario(cfg);
    REQUIRE(r1.trajectory.size() == r2.trajectory.size());
    for (std::size_t n = 0; n < r1.trajectory.size(); ++n)
        for (int i = 0; i < 3; ++i) CHECK(r1.trajectory[n].z[i] == r2.trajectory[n].z[i]);
    CHECK(slurp(d1 / "trajectory.csv") == slurp(d2 / "trajectory.csv"));
    CHECK(slurp(d1 / "diagnostics.csv") == slurp(d2 / "diagnostics.csv"));
    CHECK(slurp(d1 / "trajectory.csv").rfind("t,z1x,z1y,z1z,z2x,z2y,z2z,z3x,z3y,z3z\n", 0) == 0);
    std::filesystem::remove_all(d1);
    std::filesystem::remove_all(d2);
}

TEST_CASE("monitor examples") {
    const ScenarioConfig cfg = v_scenario();
    const ResolvedMonitor th = resolve(cfg.monitor, cfg.swimmer, cfg.grid());
    CHECK(th.collision_threshold == 2 * cfg.swimmer.r);
    CHECK(th.boundary_margin == cfg.grid().max_spacing());
    CHECK_FALSE(monitor_wellposedness(cfg.centers, cfg.swimmer, cfg.domain, th));

    SUBCASE("collision just inside 2r") {
        // Body 3 sits 2r - 1e-6 from body 1; the joint stays bent.
        std::vector<Vec3> z = {{0.4, 0.55, 0.5}, {0.5, 0.7, 0.5}, {0.4, 0.55, 0.5}};
        z[2] = z[0] + Vec3{0.6, -0.8, 0.0} * (2 * cfg.swimmer.r - 1e-6);
        const auto v = monitor_wellposedness(z, cfg.swimmer, cfg.domain, th);
        REQUIRE(v);
        CHECK(v->kind == ViolationKind::Collision);
        CHECK(v->indices == std::vector<int>{0, 2});
        CHECK(v->value == doctest::Approx(2 * cfg.swimmer.r - 1e-6).epsilon(1e-12));
    }
    SUBCASE("straight joint") {
        const std::vector<Vec3> z = {{0.3, 0.5, 0.5}, {0.5, 0.5, 0.5}, {0.7, 0.5, 0.5}};
        const auto v = monitor_wellposedness(z, cfg.swimmer, cfg.domain, th);
        REQUIRE(v);
        CHECK(v->kind == ViolationKind::CollinearJoint);
        CHECK(v->indices == std::vector<int>{0});
    }
    SUBCASE("body touching the wall layer") {
        std::vector<Vec3> z = cfg.centers;
        for (auto& p : z) p.x -= 0.5 - 0.2 / std::sqrt(2.0) - cfg.swimmer.r - 0.01;
        const auto v = monitor_wellposedness(z, cfg.swimmer, cfg.domain, th);
        REQUIRE(v);
        CHECK(v->kind == ViolationKind::BoundaryContact);
        CHECK(v->indices == std::vector<int>{0});
    }
    SUBCASE("coincident neighbours") {
        const std::vector<Vec3> z = {{0.5, 0.5, 0.5}, {0.5, 0.5, 0.5}, {0.5, 0.7, 0.5}};
        const auto v = monitor_wellposedness(z, cfg.swimmer, cfg.domain, th);
        REQUIRE(v);
        CHECK(v->kind == ViolationKind::Degenerate);
    }
}

TEST_CASE("collision run stops at the first threshold crossing, earlier steps all ok") {
    ScenarioConfig cfg = v_scenario(0.25);
    cfg.nu = 0.05;
    cfg.dt = 2e-3;
    cfg.T = 2.0;
    cfg.swimmer.r = 0.06;
    cfg.controls = ControlSchedule::constant({150.0});
    const RunResult r = run_scenario(cfg);
    REQUIRE(r.violation);
    CHECK(r.violation->kind == ViolationKind::Collision);
    const double threshold = 2 * cfg.swimmer.r;
    int first = -1;
    for (const auto& d : r.diagnostics)
        if (first < 0 && d.min_pair_distance <= threshold) first = d.step;
    CHECK(first == r.violation->step);
    CHECK(r.diagnostics.back().status == "Collision");
    for (std::size_t k = 0; k + 1 < r.diagnostics.size(); ++k) CHECK(r.diagnostics[k].status == "ok");
    CHECK(r.trajectory.size() == r.diagnostics.size());
}

TEST_CASE("body map in frozen velocity fields") {
    const GridSpec grid(Domain{}, {32, 32, 32});
    SwimmerConfig sw;
    sw.r = 0.05;
    sw.shapes.assign(3, BodyShape::ball(0.05));
    sw.k = {1.0, 1.0};
    sw.l = {0.15, 0.15};
    sw.fold_sign = {1};
    const std::vector<Vec3> z0 = {{0.3, 0.4, 0.5}, {0.42, 0.49, 0.5}, {0.42, 0.64, 0.5}};
    const double dt = 1e-3;
    const int steps = 200;

    SUBCASE("zero field keeps every body in place") {
        const VelocitySeries u(steps + 1, FaceField(grid));
        const auto w = ode_map_A(grid, u, z0, sw, dt, 1);
        REQUIRE(w.size() == steps + 1);
        for (const auto& s : w)
            for (int i = 0; i < 3; ++i) CHECK(s.z[i] == z0[i]);
    }
    SUBCASE("uniform field translates rigidly") {
        const Vec3 c{0.4, 0.0, 0.0};
        const FaceField f = sample_faces(grid, [&](const Vec3&) { return c; });
        const VelocitySeries u(steps + 1, f);
        const auto w = ode_map_A(grid, u, z0, sw, dt, 2);
        for (int n = 0; n <= steps; ++n)
            for (int i = 0; i < 3; ++i) CHECK(norm(w[n].z[i] - (z0[i] + c * (n * dt))) <= 1e-12);
    }
    SUBCASE("linear field grows exponentially") {
        const FaceField f = sample_faces(grid, [](const Vec3& x) { return Vec3{x.x, 0.0, 0.0}; });
        const VelocitySeries u(steps + 1, f);
        const auto w = ode_map_A(grid, u, z0, sw, dt, 4);
        const double T = steps * dt;
        for (int i = 0; i < 3; ++i) {
            const double exact = z0[i].x * std::exp(T);
            // Euler error ~ dt T / 2 and a covered-cell centroid offset below one spacing.
            CHECK(std::fabs(w.back().z[i].x - exact) <= 0.02 * exact);
            CHECK(w.back().z[i].y == z0[i].y);
        }
    }
    SUBCASE("monitor stops the map at an inadmissible state") {
        const FaceField f = sample_faces(grid, [](const Vec3&) { return Vec3{-2.0, 0.0, 0.0}; });
        const VelocitySeries u(steps + 1, f);
        const ResolvedMonitor th{0.1, grid.max_spacing(), 1e-9, 1e-9};
        CHECK_THROWS_AS(ode_map_A(grid, u, z0, sw, dt, 1, th), WellposednessViolation);
    }
}

TEST_CASE("Picard iteration on the zero problem stops after one sweep") {
    const ScenarioConfig cfg = rest_scenario();
    const PicardResult p = picard_solve(cfg, 0.004, 10, 1e-12);
    CHECK(p.converged);
    CHECK(p.iterations == 1);
    REQUIRE(p.residuals.size() == 1);
    CHECK(p.residuals[0] == 0.0);
    for (const auto& u : p.fluid) CHECK(max_abs(u) == 0.0);
}

TEST_CASE("Picard fixed point agrees with the time march") {
    ScenarioConfig cfg = v_scenario(0.24);
    cfg.controls = ControlSchedule::constant({2.0});
    cfg.dt = 1e-4;
    const double window = 6e-4;
    const PicardResult p = picard_solve(cfg, window, 30, 1e-11);
    REQUIRE(p.converged);
    REQUIRE(p.residuals.size() >= 3);
    for (std::size_t k = 2; k < p.residuals.size(); ++k) CHECK(p.residuals[k] < p.residuals[k - 1]);
    cfg.T = window;
    const RunResult r = run_scenario(cfg);
    REQUIRE(r.trajectory.size() == p.bodies.size());
    double v_scale = 0.0, diff = 0.0;
    for (std::size_t n = 1; n < r.trajectory.size(); ++n)
        for (int i = 0; i < 3; ++i) {
            v_scale = std::max(v_scale, norm(r.trajectory[n].z[i] - r.trajectory[n - 1].z[i]) / cfg.dt);
            diff = std::max(diff, norm(r.trajectory[n].z[i] - p.bodies[n].z[i]));
        }
    REQUIRE(v_scale > 0.0);
    CHECK(diff <= 10 * cfg.dt * v_scale);
}

TEST_CASE("Picard gives up with the residual history") {
    ScenarioConfig cfg = v_scenario(0.24);
    cfg.controls = ControlSchedule::constant({2.0});
    cfg.dt = 1e-4;
    try {
        picard_solve(cfg, 6e-4, 1, 1e-14);
        FAIL("expected NoConvergence");
    } catch (const NoConvergence& e) {
        CHECK(e.history().size() == 1);
    }
}
