#pragma once

#include "isoflex/vec.hpp"

namespace isoflex {

// Default tolerance for coplanarity/parallelism predicates. Coordinates are
// assumed to be desk-scale (order 1..100); callers can override per call.
inline constexpr double kDefaultTol = 1e-9;

// The plane z = g1*x + g2*y - h. Isotropic planes (parallel to the z-axis)
// are not representable in this chart, which is exactly the set of planes
// the metric duality acts on.
struct NonIsotropicPlane {
    double g1 = 0.0, g2 = 0.0, h = 0.0;

    double height_at(double x, double y) const { return g1 * x + g2 * y - h; }
    double height_at(const Vec2& p) const { return height_at(p.x, p.y); }
};

// x -> A x + b with A the isotropic rotation/shear block; phi is kept
// unreduced so that compositions stay exact.
struct IsotropicCongruence {
    double phi = 0.0, c1 = 0.0, c2 = 0.0;
    Vec3 b{};

    static IsotropicCongruence identity() { return {}; }
};

// Vector field V(x) = a x + b spanning the Lie algebra of the congruence group.
struct InfinitesimalCongruence {
    double phi = 0.0, c1 = 0.0, c2 = 0.0;
    Vec3 b{};
};

TopView2 top_view(const Point3& p);

double iso_distance(const Point3& p, const Point3& q);

// |z_p - z_q| for points sharing a top view; PreconditionError otherwise.
double replacing_distance(const Point3& p, const Point3& q, double tol = kDefaultTol);

NonIsotropicPlane dual_point_to_plane(const Point3& p);
Point3 dual_plane_to_point(const NonIsotropicPlane& pl);

// Unique plane through three points. Throws DegenerateError for collinear
// input and IsotropicPlaneError when the spanned plane contains the z-direction.
NonIsotropicPlane plane_through(const Point3& a, const Point3& b, const Point3& c,
                                double tol = kDefaultTol);

double iso_angle(const NonIsotropicPlane& p, const NonIsotropicPlane& q);

Point3 apply_congruence(const IsotropicCongruence& c, const Point3& p);

// compose(c1, c2) acts as c1 after c2.
IsotropicCongruence compose(const IsotropicCongruence& c1, const IsotropicCongruence& c2);

// Value of the congruence vector field at p.
Vec3 field_at(const InfinitesimalCongruence& v, const Point3& p);

}  // namespace isoflex
