#include "isoflex/core.hpp"

#include "isoflex/errors.hpp"

#include <cmath>

namespace isoflex {

TopView2 top_view(const Point3& p) { return {p.x, p.y}; }

double iso_distance(const Point3& p, const Point3& q) {
    return std::hypot(p.x - q.x, p.y - q.y);
}

double replacing_distance(const Point3& p, const Point3& q, double tol) {
    double scale = 1.0 + std::max(top_view(p).norm(), top_view(q).norm());
    if (iso_distance(p, q) > tol * scale)
        throw PreconditionError("replacing_distance: points are not parallel");
    return std::abs(p.z - q.z);
}

NonIsotropicPlane dual_point_to_plane(const Point3& p) { return {p.x, p.y, p.z}; }

Point3 dual_plane_to_point(const NonIsotropicPlane& pl) { return {pl.g1, pl.g2, pl.h}; }

NonIsotropicPlane plane_through(const Point3& a, const Point3& b, const Point3& c, double tol) {
    const Vec3 u = b - a, v = c - a;
    const Vec3 n = u.cross(v);
    const double nn = n.norm();
    const double scale = std::max({u.norm(), v.norm(), 1e-30});
    if (nn <= tol * scale * scale)
        throw DegenerateError("plane_through: collinear points");
    if (std::abs(n.z) <= tol * nn)
        throw IsotropicPlaneError("plane_through: plane contains the isotropic direction");
    // n . (x - a) = 0  =>  z = -(nx/nz) x - (ny/nz) y + (n.a)/nz
    return {-n.x / n.z, -n.y / n.z, -n.dot(a) / n.z};
}

double iso_angle(const NonIsotropicPlane& p, const NonIsotropicPlane& q) {
    return std::hypot(p.g1 - q.g1, p.g2 - q.g2);
}

Point3 apply_congruence(const IsotropicCongruence& c, const Point3& p) {
    const double cs = std::cos(c.phi), sn = std::sin(c.phi);
    return {cs * p.x - sn * p.y + c.b.x,
            sn * p.x + cs * p.y + c.b.y,
            c.c1 * p.x + c.c2 * p.y + p.z + c.b.z};
}

IsotropicCongruence compose(const IsotropicCongruence& c1, const IsotropicCongruence& c2) {
    const double cs = std::cos(c2.phi), sn = std::sin(c2.phi);
    IsotropicCongruence r;
    r.phi = c1.phi + c2.phi;
    // Third row of A1 * A2.
    r.c1 = c2.c1 + c1.c1 * cs + c1.c2 * sn;
    r.c2 = c2.c2 - c1.c1 * sn + c1.c2 * cs;
    r.b = apply_congruence(c1, c2.b);
    return r;
}

Vec3 field_at(const InfinitesimalCongruence& v, const Point3& p) {
    return {-v.phi * p.y + v.b.x,
            v.phi * p.x + v.b.y,
            v.c1 * p.x + v.c2 * p.y + v.b.z};
}

}  // namespace isoflex
