#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "doctest.h"
#include "swimsim/errors.hpp"
#include "swimsim/forces.hpp"

using namespace swimsim;

namespace {

void check_vec(const Vec3& got, const Vec3& want, double tol = 1e-14) {
    CHECK(std::fabs(got.x - want.x) <= tol);
    CHECK(std::fabs(got.y - want.y) <= tol);
    CHECK(std::fabs(got.z - want.z) <= tol);
}

// Random non-degenerate joint: arms of length in [0.2, 2] with the angle bounded away from 0 and pi.
struct Joint {
    Vec3 prev, cen, next;
};

Joint random_joint(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_real_distribution<double> len(0.2, 2.0);
    for (;;) {
        const Vec3 cen{u(rng) * 3, u(rng) * 3, u(rng) * 3};
        Vec3 d1{u(rng), u(rng), u(rng)}, d2{u(rng), u(rng), u(rng)};
        if (norm(d1) < 0.1 || norm(d2) < 0.1) continue;
        d1 = d1 / norm(d1);
        d2 = d2 / norm(d2);
        if (norm(cross(d1, d2)) < 0.05) continue;
        return {cen + d1 * len(rng), cen, cen + d2 * len(rng)};
    }
}

SwimmerConfig equal_ball_swimmer(int n, double radius = 0.05) {
    SwimmerConfig cfg;
    cfg.r = radius;
    cfg.shapes.assign(n, BodyShape::ball(radius));
    for (int i = 0; i + 1 < n; ++i) {
        cfg.k.push_back(1.0 + i);
        cfg.l.push_back(0.3 + 0.05 * i);
    }
    for (int j = 0; j + 2 < n; ++j) cfg.fold_sign.push_back(j % 2 == 0 ? 1 : -1);
    return cfg;
}

// Zig-zag chain with random perturbations; every joint keeps a visible bend.
std::vector<Vec3> random_chain(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Vec3> z;
    for (int i = 0; i < n; ++i)
        z.push_back(Vec3{0.2 + 0.25 * i, 0.5 + (i % 2 == 0 ? 0.0 : 0.15), 0.5} + Vec3{u(rng), u(rng), u(rng)} * 0.04);
    return z;
}

}  // namespace

TEST_CASE("Hooke link forces") {
    auto [a0, b0] = hooke_pair({0, 0, 0}, {1, 0, 0}, 3.0, 1.0);
    check_vec(a0, {0, 0, 0});
    check_vec(b0, {0, 0, 0});

    auto [a1, b1] = hooke_pair({0, 0, 0}, {2, 0, 0}, 1.0, 1.0);
    check_vec(a1, {1, 0, 0});
    check_vec(b1, {-1, 0, 0});

    auto [a2, b2] = hooke_pair({0, 0, 0}, {0.5, 0, 0}, 2.0, 1.0);
    check_vec(a2, {-1, 0, 0});
    check_vec(b2, {1, 0, 0});

    CHECK_THROWS_AS(hooke_pair({1, 1, 1}, {1, 1, 1}, 1.0, 1.0), DegenerateConfiguration);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int t = 0; t < 1000; ++t) {
        const Vec3 p{u(rng), u(rng), u(rng)}, q{u(rng), u(rng), u(rng)};
        const auto [fp, fq] = hooke_pair(p, q, 1.0 + std::fabs(u(rng)), 0.5);
        CHECK(max_abs(fp + fq) <= 1e-16);
    }
}

TEST_CASE("rotation directions") {
    CHECK_THROWS_AS(rotation_directions({-1, 0, 0}, {0, 0, 0}, {1, 0, 0}, 1), CollinearJoint);
    CHECK_THROWS_AS(rotation_directions({-1, 0, 0}, {0, 0, 0}, {2, 1e-12, 0}, 1), CollinearJoint);

    const auto d = rotation_directions({-1, 0, 0}, {0, 0, 0}, {0, 1, 0}, 1);
    check_vec(d.a, {0, 1, 0});
    check_vec(d.b, {1, 0, 0});
    const auto flipped = rotation_directions({-1, 0, 0}, {0, 0, 0}, {0, 1, 0}, -1);
    check_vec(flipped.a, {0, -1, 0});
    check_vec(flipped.b, {-1, 0, 0});

    std::mt19937_64 rng(17);
    for (int t = 0; t < 1000; ++t) {
        const Joint j = random_joint(rng);
        const Vec3 arm1 = j.prev - j.cen, arm2 = j.next - j.cen;
        const Vec3 n = cross(arm1, arm2) / norm(cross(arm1, arm2));
        const auto r = rotation_directions(j.prev, j.cen, j.next, 1);
        CHECK(std::fabs(dot(r.a, arm1)) <= 1e-14 * norm(arm1) * norm(arm1));
        CHECK(std::fabs(dot(r.b, arm2)) <= 1e-14 * norm(arm2) * norm(arm2));
        CHECK(std::fabs(norm(r.a) / norm(arm1) - 1.0) <= 1e-14);
        CHECK(std::fabs(norm(r.b) / norm(arm2) - 1.0) <= 1e-14);
        // in the plane of the two arms
        CHECK(std::fabs(dot(r.a, n)) <= 1e-13 * norm(arm1));
        CHECK(std::fabs(dot(r.b, n)) <= 1e-13 * norm(arm2));
        // fold_sign = +1 closes the angle: arm1 turns towards arm2, and the force -b on
        // the far end turns arm2 towards arm1
        CHECK(dot(r.a, arm2) > 0.0);
        CHECK(dot(-r.b, arm1) > 0.0);

        const auto gs = rotation_directions_gram_schmidt(j.prev, j.cen, j.next, 1);
        CHECK(max_abs(gs.a - r.a) <= 1e-13 * norm(arm1));
        CHECK(max_abs(gs.b - r.b) <= 1e-13 * norm(arm2));
    }
}

TEST_CASE("rotation triples balance force and torque") {
    const auto zero = rotation_triple({-1, 0, 0}, {0, 0, 0}, {0, 1, 0}, 0.0, 1);
    check_vec(zero.f_prev, {});
    check_vec(zero.f_next, {});
    check_vec(zero.f_cen, {});

    const double s = 1.0 / std::sqrt(2.0);
    const Vec3 zp{-s, s, 0}, zn{s, s, 0};
    const auto sym = rotation_triple(zp, {}, zn, 1.0, 1);
    CHECK(norm(sym.f_prev) == doctest::Approx(norm(sym.f_next)).epsilon(1e-15));
    CHECK(norm(cross(zp, sym.f_prev) + cross(zn, sym.f_next)) <= 1e-14);

    const auto uneq = rotation_triple({-2, 0, 0}, {}, {0, 1, 0}, 1.0, 1);
    CHECK(norm(uneq.f_prev) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(norm(uneq.f_next) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(norm(cross(Vec3{-2, 0, 0}, uneq.f_prev)) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(norm(cross(Vec3{0, 1, 0}, uneq.f_next)) == doctest::Approx(4.0).epsilon(1e-15));

    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> uv(-5.0, 5.0);
    for (int t = 0; t < 2000; ++t) {
        const Joint j = random_joint(rng);
        const double v = uv(rng);
        for (auto construction : {RotationConstruction::CrossProduct, RotationConstruction::GramSchmidt}) {
            const auto tr = rotation_triple(j.prev, j.cen, j.next, v, t % 2 ? 1 : -1, {}, construction);
            const Vec3 sum = tr.f_prev + tr.f_next + tr.f_cen;
            const double mag = norm(tr.f_prev) + norm(tr.f_next) + norm(tr.f_cen);
            CHECK(norm(sum) <= 1e-14 * mag);
            const Vec3 arm1 = j.prev - j.cen, arm2 = j.next - j.cen;
            const Vec3 torque = cross(arm1, tr.f_prev) + cross(arm2, tr.f_next);
            CHECK(norm(torque) <= 1e-12 * norm(tr.f_prev) * norm(arm1));
        }
    }
}

TEST_CASE("assembled body forces") {
    SwimmerConfig cfg = equal_ball_swimmer(3);
    const ForceGuards guards;

    SUBCASE("rest configuration with zero control is force free") {
        const std::vector<Vec3> z{{0.2, 0.5, 0.5}, {0.2 + cfg.l[0], 0.5, 0.5}, {0.2 + cfg.l[0], 0.5 + cfg.l[1], 0.5}};
        const auto f = assemble_body_forces(z, ControlSample{{0.0}}, cfg, guards);
        for (const Vec3& d : f.density) CHECK(norm(d) <= 1e-15);
    }
    SUBCASE("only link 1 stretched") {
        const std::vector<Vec3> z{{0.1, 0.5, 0.5}, {0.1 + cfg.l[0] + 0.1, 0.5, 0.5}, {0.1 + cfg.l[0] + 0.1, 0.5 + cfg.l[1], 0.5}};
        const auto f = assemble_body_forces(z, ControlSample{{0.0}}, cfg, guards);
        const auto [hp, hc] = hooke_pair(z[0], z[1], cfg.k[0], cfg.l[0]);
        check_vec(f.density[0], hp, 1e-15);
        check_vec(f.density[1], hc, 1e-15);
        check_vec(f.density[2], {0, 0, 0}, 1e-15);
    }
    SUBCASE("collinear joint is reported with its index") {
        cfg = equal_ball_swimmer(4);
        const std::vector<Vec3> z{{0.1, 0.5, 0.5}, {0.4, 0.5, 0.5}, {0.4, 0.8, 0.5}, {0.4, 1.1, 0.5}};
        try {
            assemble_body_forces(z, ControlSample{{0.5, 0.5}}, cfg, guards);
            FAIL("expected CollinearJoint");
        } catch (const CollinearJoint& e) {
            CHECK(e.joint() == 1);
        }
    }
    SUBCASE("wrong control length") {
        const std::vector<Vec3> z{{0.1, 0.5, 0.5}, {0.4, 0.5, 0.5}, {0.4, 0.8, 0.5}};
        CHECK_THROWS_AS(assemble_body_forces(z, ControlSample{{0.5, 0.5}}, cfg, guards), ConfigInvalid);
    }
}

TEST_CASE("internal forces have zero resultant and zero moment for equal measures") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> uv(-3.0, 3.0);
    for (int t = 0; t < 400; ++t) {
        const int n = 3 + t % 4;
        SwimmerConfig cfg = equal_ball_swimmer(n);
        const auto z = random_chain(rng, n);
        ControlSample v;
        for (int j = 0; j < n - 2; ++j) v.v.push_back(uv(rng));
        const auto f = assemble_body_forces(z, v, cfg);

        // oracle: direct summation of the paired terms, independent of assemble_body_forces
        Vec3 paired;
        for (int i = 0; i + 1 < n; ++i) {
            const auto [a, b] = hooke_pair(z[i], z[i + 1], cfg.k[i], cfg.l[i]);
            paired += a + b;
        }
        for (int j = 0; j + 2 < n; ++j) {
            const auto tr = rotation_triple(z[j], z[j + 1], z[j + 2], v.v[j], cfg.fold_sign[j]);
            paired += tr.f_prev + tr.f_next + tr.f_cen;
        }
        const double scale = force_scale(f, cfg);
        CHECK(norm(paired) * measure(cfg.shapes[0]) <= 1e-12 * scale);
        CHECK(norm(net_force(f, cfg)) <= 1e-12 * scale);

        const Vec3 pivot{uv(rng), uv(rng), uv(rng)};
        CHECK(norm(net_torque(f, z, cfg, pivot)) <= 1e-12 * torque_scale(f, z, cfg, pivot));
    }
}

TEST_CASE("spreading onto the grid") {
    const GridSpec grid(Domain{{1, 1, 1}}, {24, 24, 24});
    SwimmerConfig cfg = equal_ball_swimmer(3, 0.12);
    cfg.l = {0.3, 0.3};
    const std::vector<Vec3> z{{0.3, 0.5, 0.5}, {0.55, 0.5, 0.5}, {0.55, 0.75, 0.5}};

    SUBCASE("zero densities give a zero field") {
        const auto field = spread_to_grid(BodyForceSet{std::vector<Vec3>(3)}, z, cfg, grid);
        for (const Vec3& c : field.data) CHECK(norm(c) == 0.0);
    }
    SUBCASE("grid integral reproduces the body force") {
        BodyForceSet f{{{1, 0, 0}, {0, 0, 0}, {0, 0, 0}}};
        const auto field = spread_to_grid(f, z, cfg, grid);
        const double mes = measure(cfg.shapes[0]);
        const Vec3 total = grid_integral(grid, field);
        CHECK(total.x == doctest::Approx(mes).epsilon(1e-13));
        CHECK(std::fabs(total.y) + std::fabs(total.z) == 0.0);
        // plain point sampling is within one cell volume per surface cell of the analytic volume
        const Vec3 raw = grid_integral(grid, spread_to_grid_unscaled(f, z, cfg, grid));
        CHECK(std::fabs(raw.x - mes) <= 0.1 * mes);
    }
    SUBCASE("disjoint bodies have disjoint supports") {
        BodyForceSet f{{{1, 0, 0}, {0, 0, 0}, {0, 1, 0}}};
        const auto field = spread_to_grid(f, z, cfg, grid);
        for (const Vec3& c : field.data) CHECK((c.x == 0.0 || c.y == 0.0));
    }
    SUBCASE("a body in the wall layer is rejected") {
        std::vector<Vec3> bad = z;
        bad[0] = {0.125, 0.5, 0.5};
        CHECK_THROWS_AS(spread_to_grid(BodyForceSet{std::vector<Vec3>(3)}, bad, cfg, grid), BodyOutsideDomain);
    }
}

TEST_CASE("swimmer configuration validation") {
    SwimmerConfig cfg = equal_ball_swimmer(3, 0.1);
    CHECK(cfg.validate(true).empty());
    cfg.l[0] = 0.2;
    CHECK(cfg.validate(true).size() == 1);
    cfg.k[1] = 0.0;
    CHECK(cfg.validate(true).size() == 2);
    cfg = equal_ball_swimmer(3, 0.1);
    cfg.shapes[1] = BodyShape::ball(0.09);
    CHECK(cfg.validate(false).empty());
    CHECK(cfg.validate(true).size() == 1);
}
