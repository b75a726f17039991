#include "isoflex/errors.hpp"
#include "isoflex/koenigs.hpp"

#include <doctest.h>

#include "test_helpers.hpp"

#include <array>
#include <cmath>
#include <random>

using namespace isoflex;
using namespace isoflex::testing;

TEST_CASE("dual quad of the unit square") {
    const std::array<Point3, 4> sq{Point3{0, 0, 0}, Point3{1, 0, 0}, Point3{1, 1, 0},
                                   Point3{0, 1, 0}};
    const DualQuadResult d = dual_quad(sq);
    CHECK(d.residual <= 1e-14);
    CHECK((d.quad[0] - Point3{0, 0, 0}).norm() <= 1e-14);
    CHECK((d.quad[1] - Point3{1, 0, 0}).norm() <= 1e-14);
    CHECK((d.quad[2] - Point3{1, -1, 0}).norm() <= 1e-14);
    CHECK((d.quad[3] - Point3{0, -1, 0}).norm() <= 1e-14);
}

TEST_CASE("dual quad of a parallelogram swaps a side sign") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> c(-2.0, 2.0);
    for (int trial = 0; trial < 30; ++trial) {
        const Point3 a{c(rng), c(rng), c(rng)};
        Vec3 u{c(rng), c(rng), c(rng)}, v{c(rng), c(rng), c(rng)};
        if (u.cross(v).norm() < 0.3) continue;
        const std::array<Point3, 4> par{a, a + u, a + u + v, a + v};
        const DualQuadResult d = dual_quad(par);
        const Vec3 side1 = d.quad[1] - d.quad[0];
        const Vec3 side2 = d.quad[2] - d.quad[1];
        CHECK(sin_angle(side1, u) <= 1e-10);
        CHECK(sin_angle(side2, v) <= 1e-10);
        CHECK(side2.dot(v) < 0.0);  // reversed relative to the primal side
    }
}

TEST_CASE("dual quad constraints hold for random planar quads") {
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> c(-1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        // Convex planar quad in a random plane.
        const Vec2 q0{0, 0}, q1{2 + c(rng), c(rng) * 0.3}, q2{2.4, 2 + c(rng) * 0.5},
            q3{c(rng) * 0.3, 1.8};
        const Vec3 origin{c(rng), c(rng), c(rng)};
        Vec3 eu{1, 0, c(rng)}, ev{0, 1, c(rng)};
        auto lift = [&](const Vec2& p) { return origin + p.x * eu + p.y * ev; };
        const std::array<Point3, 4> quad{lift(q0), lift(q1), lift(q2), lift(q3)};
        if (!strictly_convex_top(quad, 1e-3)) continue;
        const DualQuadResult d = dual_quad(quad);
        CHECK(d.residual <= 1e-12);
        for (int r = 0; r < 4; ++r) {
            const Vec3 ps = quad[(r + 1) % 4] - quad[r];
            const Vec3 ds = d.quad[(r + 1) % 4] - d.quad[r];
            CHECK(sin_angle(ps, ds) <= 1e-10);  // corresponding sides parallel
        }
        CHECK(sin_angle(d.quad[2] - d.quad[0], quad[3] - quad[1]) <= 1e-10);
        CHECK(sin_angle(d.quad[3] - d.quad[1], quad[2] - quad[0]) <= 1e-10);
        // Reversed orientation of the top view.
        CHECK(oriented_area_top(quad) * oriented_area_top(d.quad) < 0.0);
    }
}

TEST_CASE("dual quad rejects collinear vertices") {
    const std::array<Point3, 4> bad{Point3{0, 0, 0}, Point3{1, 0, 0}, Point3{2, 0, 0},
                                    Point3{0, 1, 0}};
    CHECK_THROWS_AS(dual_quad(bad), DegenerateError);
}

TEST_CASE("christoffel dual of a translational net") {
    // p_kl = alpha_k + beta_l: the metric dual of the paraboloid net.
    const QuadNet pstar = metric_dual_net(paraboloid_net(3, 3));
    const ChristoffelResult ch = christoffel_dual_net(pstar);
    CHECK(ch.residual <= 1e-12);
    for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
            const Vec3 expect{2.0 * k, -2.0 * l, double(k * k + k - l * l - l)};
            CHECK((ch.dual.at(k, l) - expect).norm() <= 1e-10);
        }
    CHECK(is_koenigs(pstar));
}

TEST_CASE("christoffel dual of the flat square grid") {
    std::vector<Point3> pts;
    for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) pts.push_back({2.0 * k + 1.0, 2.0 * l + 1.0, 0.0});
    const QuadNet grid(2, 2, pts);
    const ChristoffelResult ch = christoffel_dual_net(grid);
    CHECK(ch.residual <= 1e-13);
    for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l)
            CHECK((ch.dual.at(k, l) - Vec3{2.0 * k, -2.0 * l, 0.0}).norm() <= 1e-12);
}

TEST_CASE("generic planar-faced nets are not Koenigs") {
    std::mt19937 rng(13);
    for (int trial = 0; trial < 100; ++trial) {
        const QuadNet net = random_perturbed_net(2, 2, rng, 0.08);
        const ChristoffelResult ch = christoffel_dual_net(net);
        CHECK(ch.residual > 1e-5);  // margin over the default tolerance
    }
}

TEST_CASE("height grid of the worked Christoffel pair") {
    // pstar = (2k+1, 2l+1, *), cstar = (2k+1, -(2l+1), *): h = 2k + 2l + 4kl.
    VertexGrid pstar(4, 4), cstar(4, 4);
    for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l) {
            pstar.at(k, l) = {2.0 * k + 1.0, 2.0 * l + 1.0, double(k + l)};
            cstar.at(k, l) = {2.0 * k + 1.0, -(2.0 * l + 1.0), double(k - l)};
        }
    const HeightGrid hg = height_grid(pstar, cstar);
    CHECK(hg.loop_defect <= 1e-12);
    for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l)
            CHECK(hg.h.at(k, l) == doctest::Approx(2.0 * k + 2.0 * l + 4.0 * k * l));
}

TEST_CASE("height grid of a trivial dual is zero") {
    VertexGrid pstar(3, 3), cstar(3, 3);
    for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
            pstar.at(k, l) = {double(k), double(l), 0.0};
            cstar.at(k, l) = {5.0, -2.0, 1.0};
        }
    const HeightGrid hg = height_grid(pstar, cstar);
    for (double h : hg.h.flat()) CHECK(h == 0.0);
}

TEST_CASE("height grid flags non-Christoffel pairs via the loop defect") {
    VertexGrid pstar(3, 3), cstar(3, 3);
    for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
            pstar.at(k, l) = {2.0 * k, 2.0 * l, 0.0};
            // Axis-aligned edges stay parallel, but the pair is not Christoffel.
            cstar.at(k, l) = {2.0 * k + 0.3 * k * k, 2.0 * l - 0.2 * l * l, 0.0};
        }
    const HeightGrid hg = height_grid(pstar, cstar);
    CHECK(hg.loop_defect > 1e-3);
}

TEST_CASE("reciprocal-parallel net of the paraboloid") {
    const QuadNet net = paraboloid_net(3, 3);
    const ReciprocalResult rec = reciprocal_parallel(net);
    CHECK(rec.residual <= 1e-12);
    CHECK(rec.parallelism_defect <= 1e-9);
    for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
            const Vec3 expect{2.0 * l, 2.0 * k, 2.0 * k + 2.0 * l + 4.0 * k * l};
            CHECK((rec.c.at(k, l) - expect).norm() <= 1e-10);
        }
}

TEST_CASE("reciprocal top view is the rotated Christoffel dual") {
    std::mt19937 rng(29);
    const ConeCylinderData d = random_t_data(3, 3, rng);
    const QuadNet net = gen_generalized_T(d);
    REQUIRE(validate(net).dual_convex);
    const ReciprocalResult rec = reciprocal_parallel(net, 1e-7);

    const QuadNet dual = metric_dual_net(net);
    const ChristoffelResult ch = christoffel_dual_net(dual);
    // C = (-c2, c1, h): the top view is the Christoffel dual rotated by pi/2.
    for (int k = 0; k < net.m(); ++k)
        for (int l = 0; l < net.n(); ++l) {
            const Vec3 c = ch.dual.at(k, l);
            CHECK(rec.c.at(k, l).x == doctest::Approx(-c.y).epsilon(1e-9));
            CHECK(rec.c.at(k, l).y == doctest::Approx(c.x).epsilon(1e-9));
        }
}

TEST_CASE("reciprocal-parallel rejects non-flexible nets") {
    std::mt19937 rng(31);
    const QuadNet net = random_perturbed_net(3, 3, rng, 0.08);
    CHECK_THROWS_AS(reciprocal_parallel(net), NotInfinitesimallyFlexibleError);
}

TEST_CASE("velocity diagram of the paraboloid net") {
    const QuadNet net = paraboloid_net(3, 3);
    const VelocityResult vd = velocity_diagram(net);
    CHECK(vd.residual <= 1e-12);
    CHECK(are_v_parallel(net, vd.diagram));
    const ValidationReport rep = validate(vd.diagram, 1e-10);
    CHECK(rep.all_faces_planar);
    for (int i = 1; i < 3; ++i)
        for (int j = 1; j < 3; ++j)
            CHECK(std::abs(mixed_curvature(net, vd.diagram, i, j)) <= 1e-9);
    // Non-planar whenever the dual is nontrivial.
    double zspread = 0.0;
    for (const Point3& p : vd.diagram.vertices())
        zspread = std::max(zspread, std::abs(p.z - vd.diagram.at(0, 0).z));
    CHECK(zspread > 1e-6);
}

TEST_CASE("velocity diagram rejects non-flexible nets") {
    std::mt19937 rng(37);
    const QuadNet net = random_perturbed_net(3, 3, rng, 0.08);
    CHECK_THROWS_AS(velocity_diagram(net), NotInfinitesimallyFlexibleError);
}

TEST_CASE("motion space of a single face is the congruence group") {
    std::vector<Point3> pts{{0, 0, 0}, {0, 1, 1}, {1, 0, 1}, {1, 1, 2}};
    // i-major order: (0,0), (0,1), (1,0), (1,1)
    const QuadNet net(1, 1, pts);
    const MotionSpace ms = motion_space(net);
    CHECK(ms.dimension == 6);
    CHECK(ms.trivial_dimension == 6);
    CHECK_FALSE(is_infinitesimally_flexible(ms));
}

TEST_CASE("motion space detects the flexible paraboloid net") {
    const MotionSpace ms = motion_space(paraboloid_net(3, 3));
    CHECK(ms.trivial_dimension == 6);
    CHECK(ms.dimension > ms.trivial_dimension);

    // Basis is orthonormal in the flattened velocity coordinates.
    REQUIRE(static_cast<int>(ms.basis.size()) == ms.dimension);
    for (std::size_t a = 0; a < ms.basis.size(); ++a)
        for (std::size_t b = a; b < ms.basis.size(); ++b) {
            double dot = 0.0;
            for (std::size_t k = 0; k < ms.basis[a].flat().size(); ++k)
                dot += ms.basis[a].flat()[k].dot(ms.basis[b].flat()[k]);
            CHECK(dot == doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-10));
        }
}

TEST_CASE("nullspace velocities generate curvature-preserving flexes") {
    const QuadNet net = paraboloid_net(3, 3);
    const MotionSpace ms = motion_space(net);
    REQUIRE(is_infinitesimally_flexible(ms));

    // Numerical differentiation of Omega along each basis velocity field;
    // the vertex condition says the derivative vanishes.
    for (const VertexGrid& v : ms.basis) {
        for (double t : {1e-5, -1e-5}) {
            std::vector<Point3> moved;
            for (int i = 0; i <= 3; ++i)
                for (int j = 0; j <= 3; ++j) moved.push_back(net.at(i, j) + t * v.at(i, j));
            const QuadNet deformed(3, 3, moved);
            const ValidationReport rep = validate(deformed, 1e-6);
            CHECK(rep.all_faces_planar);  // face condition keeps faces planar
            for (int i = 1; i < 3; ++i)
                for (int j = 1; j < 3; ++j) {
                    const double d_omega =
                        (curvature(deformed, i, j) - curvature(net, i, j)) / t;
                    CHECK(std::abs(d_omega) <= 1e-4);  // first order vanishes
                }
        }
    }
}

TEST_CASE("oracle agreement between motion space and the Koenigs criterion") {
    std::mt19937 rng(43);
    int flexible_seen = 0, rigid_seen = 0;
    for (int trial = 0; trial < 30; ++trial) {
        QuadNet net;
        if (trial % 2 == 0) {
            const ConeCylinderData d = random_t_data(3, 3, rng);
            net = gen_generalized_T(d);
            if (!validate(net).dual_convex) continue;
        } else {
            net = random_perturbed_net(3, 3, rng, 0.08);
        }
        const MotionSpace ms = motion_space(net);
        const bool oracle = is_infinitesimally_flexible(ms);
        const bool koenigs = is_koenigs(metric_dual_net(net), 1e-7);
        CHECK(oracle == koenigs);
        (oracle ? flexible_seen : rigid_seen)++;
    }
    CHECK(flexible_seen >= 10);
    CHECK(rigid_seen >= 10);
}
