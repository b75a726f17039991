#include "isoflex/core.hpp"
#include "isoflex/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace isoflex;

TEST_CASE("top view drops z") {
    CHECK(top_view({1, 2, 3}).x == 1.0);
    CHECK(top_view({1, 2, 3}).y == 2.0);
    CHECK(top_view({0, 0, 5}).norm() == 0.0);
    CHECK(top_view({-1.5, 2.5, 0}).x == -1.5);
}

TEST_CASE("isotropic and replacing distances") {
    CHECK(iso_distance({0, 0, 0}, {3, 4, 7}) == doctest::Approx(5.0));
    CHECK(iso_distance({1, 1, 0}, {1, 1, 9}) == 0.0);
    CHECK(replacing_distance({1, 1, 2}, {1, 1, -3}) == doctest::Approx(5.0));
    CHECK_THROWS_AS(replacing_distance({0, 0, 0}, {1, 0, 0}), PreconditionError);
}

TEST_CASE("metric duality point <-> plane") {
    const NonIsotropicPlane p = dual_point_to_plane({2, 3, 5});
    CHECK(p.g1 == 2.0);
    CHECK(p.g2 == 3.0);
    CHECK(p.h == 5.0);
    CHECK(p.height_at(1.0, 1.0) == doctest::Approx(0.0));

    const NonIsotropicPlane base = dual_point_to_plane({0, 0, 0});
    CHECK(base.height_at(7.0, -2.0) == 0.0);

    const Point3 q{-1, 4, 0.5};
    const Point3 back = dual_plane_to_point(dual_point_to_plane(q));
    CHECK((back - q).norm() == 0.0);
}

TEST_CASE("duality involution on random points") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> coord(-100.0, 100.0);
    double worst = 0.0;
    for (int k = 0; k < 10000; ++k) {
        const Point3 p{coord(rng), coord(rng), coord(rng)};
        const Point3 back = dual_plane_to_point(dual_point_to_plane(p));
        worst = std::max(worst, (back - p).norm());
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("plane through three points") {
    const NonIsotropicPlane p = plane_through({0, 0, 0}, {1, 0, 1}, {0, 1, 1});
    CHECK(p.g1 == doctest::Approx(1.0));
    CHECK(p.g2 == doctest::Approx(1.0));
    CHECK(p.h == doctest::Approx(0.0));
    CHECK_THROWS_AS(plane_through({0, 0, 0}, {1, 0, 0}, {2, 0, 0}), DegenerateError);
    CHECK_THROWS_AS(plane_through({0, 0, 0}, {0, 0, 1}, {1, 0, 0}), IsotropicPlaneError);
}

TEST_CASE("isotropic angle equals dual distance") {
    const NonIsotropicPlane a{1, 0, 0};   // z = x
    const NonIsotropicPlane b{-1, 0, 0};  // z = -x
    CHECK(iso_angle(a, b) == doctest::Approx(2.0));
    CHECK(iso_angle(a, a) == 0.0);
    CHECK(iso_angle({0, 0, 0}, {3, 4, -7}) == doctest::Approx(5.0));

    std::mt19937 rng(11);
    std::uniform_real_distribution<double> coord(-10.0, 10.0);
    for (int k = 0; k < 100; ++k) {
        const NonIsotropicPlane p{coord(rng), coord(rng), coord(rng)};
        const NonIsotropicPlane q{coord(rng), coord(rng), coord(rng)};
        CHECK(iso_angle(p, q) ==
              doctest::Approx(iso_distance(dual_plane_to_point(p), dual_plane_to_point(q))));
    }
}

TEST_CASE("congruences act and compose") {
    CHECK((apply_congruence(IsotropicCongruence::identity(), {1, 2, 3}) - Point3{1, 2, 3}).norm() ==
          0.0);

    IsotropicCongruence rot;
    rot.phi = M_PI / 2.0;
    const Point3 r = apply_congruence(rot, {1, 0, 0});
    CHECK(r.x == doctest::Approx(0.0));
    CHECK(r.y == doctest::Approx(1.0));
    CHECK(r.z == doctest::Approx(0.0));

    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int k = 0; k < 50; ++k) {
        IsotropicCongruence c1{u(rng), u(rng), u(rng), {u(rng), u(rng), u(rng)}};
        IsotropicCongruence c2{u(rng), u(rng), u(rng), {u(rng), u(rng), u(rng)}};
        const Point3 p{u(rng), u(rng), u(rng)};
        const Point3 lhs = apply_congruence(compose(c1, c2), p);
        const Point3 rhs = apply_congruence(c1, apply_congruence(c2, p));
        CHECK((lhs - rhs).norm() <= 1e-12);
    }
}

TEST_CASE("congruences preserve the isotropic metric") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int k = 0; k < 50; ++k) {
        IsotropicCongruence c{u(rng), u(rng), u(rng), {u(rng), u(rng), u(rng)}};
        const Point3 p{u(rng), u(rng), u(rng)}, q{u(rng), u(rng), u(rng)};
        CHECK(iso_distance(apply_congruence(c, p), apply_congruence(c, q)) ==
              doctest::Approx(iso_distance(p, q)).epsilon(1e-10));
        const Point3 par{p.x, p.y, u(rng)};
        CHECK(replacing_distance(apply_congruence(c, p), apply_congruence(c, par)) ==
              doctest::Approx(replacing_distance(p, par)).epsilon(1e-10));
    }
}

TEST_CASE("infinitesimal congruence field") {
    InfinitesimalCongruence v;
    v.c1 = 1.0;
    const Vec3 w = field_at(v, {2, 5, 9});
    CHECK(w.x == 0.0);
    CHECK(w.y == 0.0);
    CHECK(w.z == doctest::Approx(2.0));

    InfinitesimalCongruence rotv;
    rotv.phi = 2.0;
    const Vec3 r = field_at(rotv, {1, 0, 0});
    CHECK(r.x == doctest::Approx(0.0));
    CHECK(r.y == doctest::Approx(2.0));
}
