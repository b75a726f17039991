#include "isoflex/quadnet.hpp"

#include "isoflex/errors.hpp"
#include "isoflex/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace isoflex {

QuadNet::QuadNet(int m, int n, std::vector<Point3> vertices)
    : m_(m), n_(n), verts_(std::move(vertices)) {
    if (m_ < 1 || n_ < 1)
        throw PreconditionError("QuadNet: m and n must be at least 1");
    if (verts_.size() != static_cast<std::size_t>((m_ + 1) * (n_ + 1)))
        throw PreconditionError("QuadNet: vertex count must be (m+1)(n+1)");
    for (const Point3& p : verts_)
        if (!p.finite()) throw PreconditionError("QuadNet: non-finite vertex");
}

std::array<Point3, 4> QuadNet::face(int k, int l) const {
    return {at(k, l), at(k + 1, l), at(k + 1, l + 1), at(k, l + 1)};
}

double QuadNet::diameter() const {
    Vec3 lo = verts_.front(), hi = verts_.front();
    for (const Point3& p : verts_) {
        lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
        hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
    }
    return (hi - lo).norm();
}

double oriented_area_top(const std::array<Vec2, 4>& q) {
    double s = 0.0;
    for (int r = 0; r < 4; ++r) s += det2(q[r], q[(r + 1) % 4]);
    return 0.5 * s;
}

double oriented_area_top(const std::array<Point3, 4>& q) {
    return oriented_area_top(std::array<Vec2, 4>{q[0].xy(), q[1].xy(), q[2].xy(), q[3].xy()});
}

double face_area_euclidean(const std::array<Point3, 4>& q) {
    Vec3 s{};
    for (int r = 0; r < 4; ++r) s += q[r].cross(q[(r + 1) % 4]);
    return 0.5 * s.norm();
}

bool strictly_convex_top(const std::array<Vec2, 4>& q, double tol) {
    double scale = 0.0;
    for (int r = 0; r < 4; ++r) scale = std::max(scale, (q[(r + 1) % 4] - q[r]).norm());
    double sign = 0.0;
    for (int r = 0; r < 4; ++r) {
        const Vec2 e0 = q[(r + 1) % 4] - q[r];
        const Vec2 e1 = q[(r + 2) % 4] - q[(r + 1) % 4];
        const double c = det2(e0, e1);
        if (std::abs(c) <= tol * scale * scale) return false;
        if (sign == 0.0)
            sign = c;
        else if (sign * c < 0.0)
            return false;
    }
    return true;
}

bool strictly_convex_top(const std::array<Point3, 4>& q, double tol) {
    return strictly_convex_top(std::array<Vec2, 4>{q[0].xy(), q[1].xy(), q[2].xy(), q[3].xy()},
                               tol);
}

namespace {

struct PlaneFit {
    NonIsotropicPlane plane;
    double residual = 0.0;  // max corner deviation, absolute
};

// Least-squares plane z = g1 x + g2 y - h through four corners.
PlaneFit fit_plane_ls(const std::array<Point3, 4>& f, double tol) {
    double ata[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
    double atb[3] = {0, 0, 0};
    for (const Point3& p : f) {
        const double row[3] = {p.x, p.y, -1.0};
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) ata[a][b] += row[a] * row[b];
            atb[a] += row[a] * p.z;
        }
    }
    double sol[3];
    if (!solve3(ata, atb, sol))
        throw DegenerateError("face_plane: degenerate corner configuration");
    PlaneFit out;
    out.plane = {sol[0], sol[1], sol[2]};
    for (const Point3& p : f)
        out.residual = std::max(out.residual, std::abs(out.plane.height_at(p.x, p.y) - p.z));
    // Reject nearly isotropic planes: gradient magnitude bounded by the same
    // threshold plane_through uses, |n_z| > tol * |n| with n = (-g1, -g2, 1).
    const double grad = std::hypot(sol[0], sol[1]);
    if (1.0 <= tol * std::sqrt(1.0 + grad * grad))
        throw IsotropicPlaneError("face_plane: nearly isotropic plane");
    return out;
}

double face_scale(const std::array<Point3, 4>& f) {
    double s = 0.0;
    for (int r = 0; r < 4; ++r) s = std::max(s, (f[(r + 1) % 4] - f[r]).norm());
    return s;
}

}  // namespace

NonIsotropicPlane face_plane(const QuadNet& net, int k, int l, double* residual, double tol) {
    if (k < 0 || k >= net.m() || l < 0 || l >= net.n())
        throw PreconditionError("face_plane: face index out of range");
    const std::array<Point3, 4> f = net.face(k, l);
    const double scale = face_scale(f);

    // Exact solve through three corners, fourth as residual check.
    bool exact_ok = true;
    NonIsotropicPlane plane{};
    try {
        plane = plane_through(f[0], f[1], f[2], tol);
    } catch (const DegenerateError&) {
        exact_ok = false;
    }
    if (exact_ok) {
        const double defect = std::abs(plane.height_at(f[3].x, f[3].y) - f[3].z);
        if (defect <= tol * std::max(scale, 1.0)) {
            if (residual) *residual = defect;
            return plane;
        }
    }
    PlaneFit ls = fit_plane_ls(f, tol);
    if (residual) *residual = ls.residual;
    return ls.plane;
}

std::array<Vec2, 4> gauss_image_top(const QuadNet& net, int i, int j, double tol) {
    if (i <= 0 || i >= net.m() || j <= 0 || j >= net.n())
        throw BoundaryVertexError("gauss_image_top: interior vertex required");
    const NonIsotropicPlane p1 = face_plane(net, i - 1, j - 1, nullptr, tol);
    const NonIsotropicPlane p2 = face_plane(net, i, j - 1, nullptr, tol);
    const NonIsotropicPlane p3 = face_plane(net, i, j, nullptr, tol);
    const NonIsotropicPlane p4 = face_plane(net, i - 1, j, nullptr, tol);
    return {Vec2{p1.g1, p1.g2}, Vec2{p2.g1, p2.g2}, Vec2{p3.g1, p3.g2}, Vec2{p4.g1, p4.g2}};
}

ValidationReport validate(const QuadNet& net, double tol) {
    ValidationReport rep;
    const int m = net.m(), n = net.n();
    rep.face_planarity = Grid<double>(m, n, 0.0);
    rep.face_convex = Grid<bool>(m, n, false);
    rep.face_non_isotropic = Grid<bool>(m, n, false);
    rep.all_faces_planar = rep.all_faces_convex = rep.all_faces_non_isotropic = true;

    const double diam = std::max(net.diameter(), 1e-30);
    for (int k = 0; k < m; ++k) {
        for (int l = 0; l < n; ++l) {
            const std::array<Point3, 4> f = net.face(k, l);
            double res = 0.0;
            bool non_iso = true;
            try {
                res = fit_plane_ls(f, tol).residual;
            } catch (const IsotropicPlaneError&) {
                non_iso = false;
            } catch (const DegenerateError&) {
                non_iso = false;
            }
            rep.face_planarity.at(k, l) = res / diam;
            rep.face_non_isotropic.at(k, l) = non_iso;
            const bool planar = non_iso && res <= tol * diam;
            const bool convex = strictly_convex_top(f, tol);
            rep.face_convex.at(k, l) = convex;
            rep.all_faces_planar &= planar;
            rep.all_faces_convex &= convex;
            rep.all_faces_non_isotropic &= non_iso;
        }
    }

    if (m >= 2 && n >= 2 && rep.all_faces_non_isotropic) {
        rep.vertex_dual_convex = Grid<bool>(m - 1, n - 1, false);
        rep.dual_convex = true;
        for (int i = 1; i < m; ++i) {
            for (int j = 1; j < n; ++j) {
                bool ok = true;
                try {
                    ok = strictly_convex_top(gauss_image_top(net, i, j, tol), tol);
                } catch (const Error&) {
                    ok = false;
                }
                rep.vertex_dual_convex.at(i - 1, j - 1) = ok;
                rep.dual_convex &= ok;
            }
        }
    } else {
        rep.dual_convex = false;
    }
    return rep;
}

QuadNet metric_dual_net(const QuadNet& net, double tol) {
    const int m = net.m(), n = net.n();
    if (m < 2 || n < 2)
        throw PreconditionError("metric_dual_net: m, n >= 2 required");
    ValidationReport rep = validate(net, tol);
    if (!rep.dual_convex)
        throw NotDualConvexError("metric_dual_net: net is not dual-convex");
    std::vector<Point3> duals;
    duals.reserve(static_cast<std::size_t>(m) * n);
    for (int k = 0; k < m; ++k)
        for (int l = 0; l < n; ++l)
            duals.push_back(dual_plane_to_point(face_plane(net, k, l, nullptr, tol)));
    return QuadNet(m - 1, n - 1, std::move(duals));
}

double curvature(const QuadNet& net, int i, int j, double tol) {
    const std::array<Vec2, 4> q = gauss_image_top(net, i, j, tol);
    if (!strictly_convex_top(q, tol))
        throw NotDualConvexError("curvature: dual quadrilateral not strictly convex");
    return oriented_area_top(q);
}

CurvatureGrid curvature_grid(const QuadNet& net, double tol) {
    CurvatureGrid g;
    g.omega = Grid<double>(std::max(net.m() - 1, 0), std::max(net.n() - 1, 0), 0.0);
    for (int i = 1; i < net.m(); ++i)
        for (int j = 1; j < net.n(); ++j) g.omega.at(i - 1, j - 1) = curvature(net, i, j, tol);
    return g;
}

double mixed_area(const std::array<Vec2, 4>& p, const std::array<Vec2, 4>& q, double tol) {
    double scale = 0.0;
    for (int r = 0; r < 4; ++r)
        scale = std::max({scale, (p[(r + 1) % 4] - p[r]).norm(), (q[(r + 1) % 4] - q[r]).norm()});
    for (int r = 0; r < 4; ++r) {
        const Vec2 ep = p[(r + 1) % 4] - p[r];
        const Vec2 eq = q[(r + 1) % 4] - q[r];
        if (std::abs(det2(ep, eq)) > tol * scale * scale)
            throw NotParallelSidesError("mixed_area: corresponding sides are not parallel");
    }
    double s = 0.0;
    for (int r = 0; r < 4; ++r) {
        const int rn = (r + 1) % 4;
        s += det2(q[r], p[rn]) + det2(p[r], q[rn]);
    }
    return 0.5 * s;
}

bool are_combescure(const QuadNet& a, const QuadNet& b, double tol) {
    if (a.m() != b.m() || a.n() != b.n())
        throw DimensionMismatchError("are_combescure: dimension mismatch");
    auto parallel = [&](const Vec3& u, const Vec3& v) {
        return u.cross(v).norm() <= tol * std::max(u.norm() * v.norm(), 1e-30);
    };
    for (int i = 0; i <= a.m(); ++i)
        for (int j = 0; j <= a.n(); ++j) {
            if (i < a.m() &&
                !parallel(a.at(i + 1, j) - a.at(i, j), b.at(i + 1, j) - b.at(i, j)))
                return false;
            if (j < a.n() &&
                !parallel(a.at(i, j + 1) - a.at(i, j), b.at(i, j + 1) - b.at(i, j)))
                return false;
        }
    return true;
}

bool are_v_parallel(const QuadNet& a, const QuadNet& b, double tol) {
    if (a.m() != b.m() || a.n() != b.n())
        throw DimensionMismatchError("are_v_parallel: dimension mismatch");
    const double scale = std::max({a.diameter(), b.diameter(), 1.0});
    for (int i = 0; i <= a.m(); ++i)
        for (int j = 0; j <= a.n(); ++j)
            if (iso_distance(a.at(i, j), b.at(i, j)) > tol * scale) return false;
    return true;
}

double mixed_curvature(const QuadNet& a, const QuadNet& b, int i, int j, double tol) {
    if (a.m() != b.m() || a.n() != b.n())
        throw DimensionMismatchError("mixed_curvature: dimension mismatch");
    if (!are_v_parallel(a, b, std::max(tol, 1e-7)))
        throw NotVParallelError("mixed_curvature: nets are not v-parallel");
    if (i <= 0 || i >= a.m() || j <= 0 || j >= a.n()) return 0.0;
    const std::array<Vec2, 4> qa = gauss_image_top(a, i, j, tol);
    const std::array<Vec2, 4> qb = gauss_image_top(b, i, j, tol);
    // Sides of the two Gauss images are parallel for v-parallel nets; pass a
    // relaxed tolerance so numerically tiny defects do not spuriously throw.
    return mixed_area(qa, qb, std::max(tol, 1e-6));
}

}  // namespace isoflex
