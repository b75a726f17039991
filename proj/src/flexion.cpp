#include "isoflex/flexion.hpp"

#include "isoflex/errors.hpp"
#include "isoflex/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace isoflex {

void ConeCylinderData::check() const {
    if (a.size() < 2 || b.size() < 2)
        throw PreconditionError("ConeCylinderData: a and b need at least 2 entries each");
    if (sigma.size() != a.size())
        throw PreconditionError("ConeCylinderData: sigma must have the same length as a");
    for (double s : sigma)
        if (!(s > 0.0)) throw PreconditionError("ConeCylinderData: sigma must be positive");
    for (const Vec3& v : a)
        if (!v.finite()) throw PreconditionError("ConeCylinderData: non-finite a entry");
    for (const Vec3& v : b)
        if (!v.finite()) throw PreconditionError("ConeCylinderData: non-finite b entry");
}

double opposite_ratio_of_quad(const std::array<Vec2, 4>& q, int side, double tol) {
    const int s = ((side % 4) + 4) % 4;
    const Vec2 a = q[s], b = q[(s + 1) % 4], c = q[(s + 2) % 4], d = q[(s + 3) % 4];
    // Diagonals a-c and b-d, intersection P = a + x (c - a) = b + y (d - b).
    const Vec2 u = c - a, w = d - b;
    const double scale = std::max(u.norm(), w.norm());
    const double den = det2(u, w);
    if (std::abs(den) <= tol * scale * scale)
        throw DegenerateDiagonalsError("opposite_ratio: diagonals are parallel");
    const Vec2 rhs = b - a;
    const double x = det2(rhs, w) / den;
    const Vec2 p = a + x * u;
    const double area_near = 0.5 * std::abs(det2(a - p, b - p));
    const double area_far = 0.5 * std::abs(det2(c - p, d - p));
    if (area_far <= tol * scale * scale)
        throw DegenerateDiagonalsError("opposite_ratio: degenerate far triangle");
    return area_near / area_far;
}

namespace {

// Four consecutive faces around interior vertex (i,j), rotated so that
// p1 and p4 share the requested edge.
std::array<std::pair<int, int>, 4> faces_for_edge(int i, int j, EdgeDir dir) {
    const std::pair<int, int> a{i - 1, j - 1}, b{i, j - 1}, c{i, j}, d{i - 1, j};
    switch (dir) {
        case EdgeDir::PlusI: return {c, d, a, b};
        case EdgeDir::PlusJ: return {d, a, b, c};
        case EdgeDir::MinusI: return {a, b, c, d};
        case EdgeDir::MinusJ: return {b, c, d, a};
    }
    return {a, b, c, d};
}

}  // namespace

double opposite_ratio(const QuadNet& net, int i, int j, EdgeDir dir, double tol) {
    if (i <= 0 || i >= net.m() || j <= 0 || j >= net.n())
        throw BoundaryVertexError("opposite_ratio: interior vertex required");
    const auto faces = faces_for_edge(i, j, dir);
    std::array<Vec2, 4> q;
    for (int r = 0; r < 4; ++r) {
        const NonIsotropicPlane pl = face_plane(net, faces[r].first, faces[r].second, nullptr, tol);
        q[r] = {pl.g1, pl.g2};
    }
    if (!strictly_convex_top(q, tol))
        throw NotDualConvexError("opposite_ratio: dual quadrilateral not strictly convex");
    // Ratio of the triangle at side p4*p1* to the triangle at side p2*p3*.
    return opposite_ratio_of_quad(q, 3, tol);
}

Classification classify(const QuadNet& net, double tol) {
    const int m = net.m(), n = net.n();
    const ValidationReport rep = validate(net, tol);
    if (!rep.dual_convex)
        throw NotDualConvexError("classify: net is not dual-convex");

    Grid<Vec3> dual(m, n);
    for (int k = 0; k < m; ++k)
        for (int l = 0; l < n; ++l)
            dual.at(k, l) = dual_plane_to_point(face_plane(net, k, l, nullptr, tol));

    Classification out;

    out.class_i_rows_vacuous = (m < 3);
    if (!out.class_i_rows_vacuous) {
        for (int k = 0; k + 2 < m; ++k) {
            double worst = 0.0;
            for (int l1 = 0; l1 < n; ++l1)
                for (int l2 = l1 + 1; l2 < n; ++l2)
                    worst = std::max(worst, sin_angle(dual.at(k + 2, l1) - dual.at(k, l1),
                                                      dual.at(k + 2, l2) - dual.at(k, l2)));
            out.residuals_i_rows.push_back(worst);
            out.residual_i_rows = std::max(out.residual_i_rows, worst);
        }
    }
    out.class_i_rows = out.class_i_rows_vacuous || out.residual_i_rows <= tol;

    out.class_i_cols_vacuous = (n < 3);
    if (!out.class_i_cols_vacuous) {
        for (int l = 0; l + 2 < n; ++l) {
            double worst = 0.0;
            for (int k1 = 0; k1 < m; ++k1)
                for (int k2 = k1 + 1; k2 < m; ++k2)
                    worst = std::max(worst, sin_angle(dual.at(k1, l + 2) - dual.at(k1, l),
                                                      dual.at(k2, l + 2) - dual.at(k2, l)));
            out.residuals_i_cols.push_back(worst);
            out.residual_i_cols = std::max(out.residual_i_cols, worst);
        }
    }
    out.class_i_cols = out.class_i_cols_vacuous || out.residual_i_cols <= tol;

    out.class_ii_vacuous = (m < 3 && n < 3);
    if (!out.class_ii_vacuous) {
        for (int i = 1; i < m; ++i)
            for (int j = 1; j < n; ++j) {
                if (i + 1 < m) {
                    const double r1 = opposite_ratio(net, i, j, EdgeDir::PlusI, tol);
                    const double r2 = opposite_ratio(net, i + 1, j, EdgeDir::MinusI, tol);
                    out.residuals_ii.push_back(std::abs(std::log(r1) - std::log(r2)));
                }
                if (j + 1 < n) {
                    const double r1 = opposite_ratio(net, i, j, EdgeDir::PlusJ, tol);
                    const double r2 = opposite_ratio(net, i, j + 1, EdgeDir::MinusJ, tol);
                    out.residuals_ii.push_back(std::abs(std::log(r1) - std::log(r2)));
                }
            }
        for (double r : out.residuals_ii) out.residual_ii = std::max(out.residual_ii, r);
    }
    out.class_ii = out.class_ii_vacuous || out.residual_ii <= tol;

    // Diagnostic: count pairs of faces with parallel planes. The dual segment
    // test above still covers such nets (parallel planes dualize to points on
    // one isotropic line, and the connecting segments stay comparable).
    for (int f1 = 0; f1 < m * n; ++f1)
        for (int f2 = f1 + 1; f2 < m * n; ++f2) {
            const Vec3 d1 = dual.at(f1 / n, f1 % n), d2 = dual.at(f2 / n, f2 % n);
            if (std::hypot(d1.x - d2.x, d1.y - d2.y) <= tol * (1.0 + std::abs(d1.x) + std::abs(d1.y)))
                ++out.parallel_face_pairs;
        }
    return out;
}

QuadNet gen_cone_cylinder(const ConeCylinderData& d, double tol) {
    d.check();
    const int rows = static_cast<int>(d.a.size());  // m + 2 vertices per column
    const int cols = static_cast<int>(d.b.size());
    std::vector<Point3> pts;
    pts.reserve(static_cast<std::size_t>(rows) * cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) pts.push_back(d.a[i] + d.sigma[i] * d.b[j]);
    QuadNet net(rows - 1, cols - 1, std::move(pts));
    for (int k = 0; k < net.m(); ++k)
        for (int l = 0; l < net.n(); ++l)
            if (!strictly_convex_top(net.face(k, l), tol))
                throw NonConvexFaceError("gen_cone_cylinder: non-convex face");
    return net;
}

namespace {

// Vertex row offsets of the deformed cone-cylinder net: a_0 + telescoping sum
// whose t = 0 value collapses to a_i - a_0.
std::vector<Vec3> deformed_offsets(const ConeCylinderData& d, double t) {
    const int rows = static_cast<int>(d.a.size());
    std::vector<Vec3> off(rows);
    off[0] = d.a[0];
    for (int k = 1; k < rows; ++k) {
        const double den = std::sqrt(t + d.sigma[k] * d.sigma[k]) +
                           std::sqrt(t + d.sigma[k - 1] * d.sigma[k - 1]);
        off[k] = off[k - 1] + (d.a[k] - d.a[k - 1]) * ((d.sigma[k] + d.sigma[k - 1]) / den);
    }
    return off;
}

}  // namespace

QuadNet deform_cone_cylinder(const ConeCylinderData& d, double t, double tol) {
    d.check();
    if (t < 0.0) throw PreconditionError("deform_cone_cylinder: t must be nonnegative");
    const int rows = static_cast<int>(d.a.size());
    const int cols = static_cast<int>(d.b.size());
    const std::vector<Vec3> off = deformed_offsets(d, t);
    std::vector<Point3> pts;
    pts.reserve(static_cast<std::size_t>(rows) * cols);
    for (int i = 0; i < rows; ++i) {
        const double st = std::sqrt(t + d.sigma[i] * d.sigma[i]);
        for (int j = 0; j < cols; ++j) pts.push_back(off[i] + st * d.b[j]);
    }
    QuadNet net(rows - 1, cols - 1, std::move(pts));
    for (int k = 0; k < net.m(); ++k)
        for (int l = 0; l < net.n(); ++l)
            if (!strictly_convex_top(net.face(k, l), tol))
                throw NonConvexFaceError("deform_cone_cylinder: non-convex face at given t");
    return net;
}

namespace {

QuadNet generalized_t_net(const ConeCylinderData& d, const std::vector<Vec3>& p_third,
                          double tol) {
    // p_third supplies the points whose determinant forms the third component;
    // for the undeformed net these are P_ij themselves.
    const int m = d.m(), n = d.n();
    if (m < 1 || n < 1)
        throw PreconditionError("gen_generalized_T: a needs >= 3 entries and b needs >= 3");
    std::vector<Point3> pts;
    pts.reserve(static_cast<std::size_t>(m + 1) * (n + 1));
    for (int i = 0; i <= m; ++i) {
        for (int j = 0; j <= n; ++j) {
            const Vec3 db = d.b[j + 1] - d.b[j];
            const Vec3 delta = d.a[i + 1] - d.a[i] + d.b[j] * (d.sigma[i + 1] - d.sigma[i]);
            const double den = det3(kE3, db, delta);
            const double scale = std::max(db.norm() * delta.norm(), 1e-30);
            if (std::abs(den) <= tol * scale)
                throw DegenerateDeterminantError("gen_generalized_T: det(e3, b', Delta) vanishes");
            const Vec3 p = p_third[static_cast<std::size_t>(i) * (n + 2) + j];
            pts.push_back({-det3(kE1, db, delta) / den, -det3(kE2, db, delta) / den,
                           -det3(p, db, delta) / den});
        }
    }
    return QuadNet(m, n, std::move(pts));
}

std::vector<Vec3> cone_cylinder_points(const ConeCylinderData& d, double t) {
    const int rows = static_cast<int>(d.a.size());
    const int cols = static_cast<int>(d.b.size());
    const std::vector<Vec3> off = deformed_offsets(d, t);
    std::vector<Vec3> pts(static_cast<std::size_t>(rows) * cols);
    for (int i = 0; i < rows; ++i) {
        const double st = std::sqrt(t + d.sigma[i] * d.sigma[i]);
        for (int j = 0; j < cols; ++j)
            pts[static_cast<std::size_t>(i) * cols + j] = off[i] + st * d.b[j];
    }
    return pts;
}

}  // namespace

QuadNet gen_generalized_T(const ConeCylinderData& d, double tol) {
    d.check();
    const int rows = static_cast<int>(d.a.size());
    const int cols = static_cast<int>(d.b.size());
    std::vector<Vec3> p(static_cast<std::size_t>(rows) * cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
            p[static_cast<std::size_t>(i) * cols + j] = d.a[i] + d.sigma[i] * d.b[j];
    return generalized_t_net(d, p, tol);
}

QuadNet deform_generalized_T(const ConeCylinderData& d, double t, double tol) {
    d.check();
    if (t < 0.0) throw PreconditionError("deform_generalized_T: t must be nonnegative");
    return generalized_t_net(d, cone_cylinder_points(d, t), tol);
}

QuadNet gen_example_2x2(double t) {
    if (t < 0.0 || t > 1.0)
        throw PreconditionError("gen_example_2x2: t must lie in [0, 1]");
    std::vector<Point3> pts;
    pts.reserve(9);
    for (int i = 0; i <= 2; ++i)
        for (int j = 0; j <= 2; ++j)
            pts.push_back({static_cast<double>(i), static_cast<double>(j),
                           (i % 2) / (t + 1.0) + (j % 2) * (t + 1.0)});
    return QuadNet(2, 2, std::move(pts));
}

QuadNet DeformationFamily::frame(double t, double tol) const {
    switch (kind) {
        case FamilyKind::ConeCylinder: return deform_cone_cylinder(data, t, tol);
        case FamilyKind::GeneralizedT: return deform_generalized_T(data, t, tol);
        case FamilyKind::Example2x2: return gen_example_2x2(t);
    }
    throw PreconditionError("DeformationFamily: unknown kind");
}

std::string family_kind_name(FamilyKind k) {
    switch (k) {
        case FamilyKind::ConeCylinder: return "cone-cylinder";
        case FamilyKind::GeneralizedT: return "generalized-t";
        case FamilyKind::Example2x2: return "example2x2";
    }
    return "unknown";
}

AffineSymmetryResult is_affine_symmetric_pair(const std::array<Point3, 4>& q1,
                                              const std::array<Point3, 4>& q2, double tol) {
    double scale = 0.0;
    for (int r = 0; r < 4; ++r)
        scale = std::max({scale, (q1[(r + 1) % 4] - q1[r]).norm(),
                          (q2[(r + 1) % 4] - q2[r]).norm()});

    int match1[2] = {-1, -1}, match2[2] = {-1, -1};
    int found = 0;
    for (int s = 0; s < 4 && found < 3; ++s)
        for (int r = 0; r < 4; ++r)
            if ((q1[s] - q2[r]).norm() <= 1e-7 * scale) {
                if (found < 2) {
                    match1[found] = s;
                    match2[found] = r;
                }
                ++found;
                break;
            }
    if (found != 2)
        throw PreconditionError("is_affine_symmetric_pair: quads must share exactly one edge");
    const bool adjacent1 = (match1[1] - match1[0] == 1) || (match1[0] == 0 && match1[1] == 3);
    if (!adjacent1)
        throw PreconditionError("is_affine_symmetric_pair: shared vertices are not an edge");

    // Coplanar pairs are outside the proposition's hypothesis.
    const Vec3 n1 = (q1[1] - q1[0]).cross(q1[2] - q1[0]);
    bool coplanar = true;
    for (const Point3& p : q2)
        if (std::abs(n1.dot(p - q1[0])) > 1e-7 * scale * n1.norm()) coplanar = false;
    if (coplanar) throw CoplanarPairError("is_affine_symmetric_pair: quads are coplanar");

    const int a1 = match1[0], b1 = match1[1];
    const int a2 = match2[0], b2 = match2[1];
    // Non-shared vertices adjacent to B resp. A in each quad.
    auto partner = [](const std::array<Point3, 4>& q, int shared_a, int shared_b, bool next_to_b) {
        for (int r = 0; r < 4; ++r) {
            if (r == shared_a || r == shared_b) continue;
            const int prev = (r + 3) % 4, next = (r + 1) % 4;
            const bool touches_b = (prev == shared_b || next == shared_b);
            if (touches_b == next_to_b) return q[r];
        }
        return q[(shared_a + 2) % 4];
    };
    const Vec3 c1 = partner(q1, a1, b1, true), d1 = partner(q1, a1, b1, false);
    const Vec3 c2 = partner(q2, a2, b2, true), d2 = partner(q2, a2, b2, false);

    AffineSymmetryResult out;
    out.residual = sin_angle(c2 - c1, d2 - d1);
    out.symmetric = out.residual <= tol;
    return out;
}

WideLShapedNet extract_wide_L(const QuadNet& net) {
    WideLShapedNet l;
    l.m = net.m();
    l.n = net.n();
    l.verts = VertexGrid(net.m() + 1, net.n() + 1);
    for (int i = 0; i <= net.m(); ++i)
        for (int j = 0; j <= net.n(); ++j)
            if (WideLShapedNet::covered(i, j)) l.verts.at(i, j) = net.at(i, j);
    return l;
}

Grid<bool> covered_face_convexity(const WideLShapedNet& l, double tol) {
    Grid<bool> flags(l.m, l.n, false);
    for (int k = 0; k < l.m; ++k)
        for (int ll = 0; ll < l.n; ++ll) {
            if (!WideLShapedNet::face_covered(k, ll)) continue;
            const std::array<Point3, 4> f = {l.verts.at(k, ll), l.verts.at(k + 1, ll),
                                             l.verts.at(k + 1, ll + 1),
                                             l.verts.at(k, ll + 1)};
            flags.at(k, ll) = strictly_convex_top(f, tol);
        }
    return flags;
}

namespace {

std::array<Vec3, 4> dual_face_corners(const Grid<Vec3>& p, int a, int b) {
    return {p.at(a, b), p.at(a + 1, b), p.at(a + 1, b + 1), p.at(a, b + 1)};
}

double ratio3d(const std::array<Vec3, 4>& q, int side, double tol) {
    return opposite_ratio_of_quad({q[0].xy(), q[1].xy(), q[2].xy(), q[3].xy()}, side, tol);
}

struct GeneralPlane {
    Vec3 normal;
    double offset;  // normal . x = offset
};

GeneralPlane plane_from_points(const Vec3& p0, const Vec3& p1, const Vec3& p2, double tol) {
    Vec3 n = (p1 - p0).cross(p2 - p0);
    const double scale = std::max((p1 - p0).norm(), (p2 - p0).norm());
    if (n.norm() <= tol * scale * scale) {
        // Collinear boundary points: take the isotropic plane through the line.
        n = (p2 - p0).cross(kE3);
        if (n.norm() <= tol * scale)
            throw PropagationFailedError("extend_L_shaped: degenerate boundary parameter line",
                                         -1);
    }
    return {n, n.dot(p0)};
}

Vec3 intersect_three_planes(const NonIsotropicPlane& f1, const NonIsotropicPlane& f2,
                            const GeneralPlane& g, int step) {
    const double mtx[3][3] = {{f1.g1, f1.g2, -1.0},
                              {f2.g1, f2.g2, -1.0},
                              {g.normal.x, g.normal.y, g.normal.z}};
    const double rhs[3] = {f1.h, f2.h, g.offset};
    double sol[3];
    if (!solve3(mtx, rhs, sol))
        throw PropagationFailedError("extend_L_shaped: singular boundary intersection", step);
    return {sol[0], sol[1], sol[2]};
}

Vec3 intersect_two_planes_line(const NonIsotropicPlane& f1, const GeneralPlane& g1,
                               const GeneralPlane& g2, int step) {
    const double mtx[3][3] = {{f1.g1, f1.g2, -1.0},
                              {g1.normal.x, g1.normal.y, g1.normal.z},
                              {g2.normal.x, g2.normal.y, g2.normal.z}};
    const double rhs[3] = {f1.h, g1.offset, g2.offset};
    double sol[3];
    if (!solve3(mtx, rhs, sol))
        throw PropagationFailedError("extend_L_shaped: singular corner intersection", step);
    return {sol[0], sol[1], sol[2]};
}

}  // namespace

LExtensionResult extend_L_shaped(const WideLShapedNet& l, LClass which, double tol) {
    const int m = l.m, n = l.n;
    if (m < 2 || n < 2)
        throw PreconditionError("extend_L_shaped: m, n >= 2 required");

    // Dual points of the covered faces.
    Grid<Vec3> p(m, n);
    Grid<bool> known(m, n, false);
    for (int k = 0; k < m; ++k)
        for (int ll = 0; ll < n; ++ll) {
            if (!WideLShapedNet::face_covered(k, ll)) continue;
            const std::array<Point3, 4> f = {l.verts.at(k, ll), l.verts.at(k + 1, ll),
                                             l.verts.at(k + 1, ll + 1), l.verts.at(k, ll + 1)};
            if (!strictly_convex_top(f, tol))
                throw PropagationFailedError("extend_L_shaped: covered face not convex", -1);
            const NonIsotropicPlane pl = plane_through(f[0], f[1], f[2], tol);
            const double defect = std::abs(pl.height_at(f[3].x, f[3].y) - f[3].z);
            if (defect > 1e-7 * std::max(1.0, (f[2] - f[0]).norm()))
                throw PropagationFailedError("extend_L_shaped: covered face not planar", -1);
            p.at(k, ll) = dual_plane_to_point(pl);
            known.at(k, ll) = true;
        }

    LExtensionResult out;

    // Hypothesis check on the covered dual data.
    bool rows_orientation = true;
    if (which == LClass::ClassI) {
        double rows_res = 0.0, cols_res = 0.0;
        for (int k = 0; k + 2 < m; ++k)
            rows_res = std::max(rows_res, sin_angle(p.at(k + 2, 0) - p.at(k, 0),
                                                    p.at(k + 2, 1) - p.at(k, 1)));
        for (int ll = 0; ll + 2 < n; ++ll)
            cols_res = std::max(cols_res, sin_angle(p.at(0, ll + 2) - p.at(0, ll),
                                                    p.at(1, ll + 2) - p.at(1, ll)));
        rows_orientation = rows_res <= cols_res;
        if (std::min(rows_res, cols_res) > std::max(tol, 1e-7))
            throw PropagationFailedError("extend_L_shaped: class (i) hypothesis violated", -1);
    } else {
        double res = 0.0;
        auto pair_residual = [&](int a1, int b1, int s1, int a2, int b2, int s2) {
            const double r1 = ratio3d(dual_face_corners(p, a1, b1), s1, tol);
            const double r2 = ratio3d(dual_face_corners(p, a2, b2), s2, tol);
            res = std::max(res, std::abs(std::log(r1) - std::log(r2)));
        };
        for (int a = 0; a + 2 < m; ++a) pair_residual(a, 0, 1, a + 1, 0, 3);
        for (int b = 0; b + 2 < n; ++b) pair_residual(0, b, 2, 0, b + 1, 0);
        if (res > std::max(tol, 1e-7))
            throw PropagationFailedError("extend_L_shaped: class (ii) hypothesis violated", -1);
    }

    // Complete the dual net vertex by vertex.
    int step = 0;

    for (int k = 2; k < m; ++k) {
        for (int ll = 2; ll < n; ++ll, ++step) {
            Vec3 x;
            double step_residual = 0.0;
            if (which == LClass::ClassI) {
                const Vec3 base = rows_orientation ? p.at(k - 2, ll) : p.at(k, ll - 2);
                const Vec3 dir = rows_orientation
                                     ? p.at(k, ll - 1) - p.at(k - 2, ll - 1)
                                     : p.at(k - 1, ll) - p.at(k - 1, ll - 2);
                const Vec3 o = p.at(k - 1, ll - 1);
                const Vec3 nrm = (p.at(k, ll - 1) - o).cross(p.at(k - 1, ll) - o);
                const double den = nrm.dot(dir);
                if (std::abs(den) <= 1e-12 * nrm.norm() * dir.norm())
                    throw PropagationFailedError("extend_L_shaped: line parallel to face plane",
                                                 step);
                const double s = nrm.dot(o - base) / den;
                x = base + s * dir;
            } else {
                // Damped Newton for planarity + two opposite-ratio equalities.
                const Vec3 o = p.at(k - 1, ll - 1);
                const Vec3 e1v = p.at(k, ll - 1) - o;
                const Vec3 e2v = p.at(k - 1, ll) - o;
                const double scale = std::max(e1v.norm(), e2v.norm());
                const double r_left = ratio3d(dual_face_corners(p, k - 2, ll - 1), 1, tol);
                const double r_down = ratio3d(dual_face_corners(p, k - 1, ll - 2), 2, tol);

                auto residual_fn = [&](const Vec3& cand, double f[3]) {
                    f[0] = det3(e1v, e2v, cand - o) / (scale * scale * scale);
                    const std::array<Vec3, 4> face = {o, p.at(k, ll - 1), cand, p.at(k - 1, ll)};
                    f[1] = std::log(ratio3d(face, 3, tol)) - std::log(r_left);
                    f[2] = std::log(ratio3d(face, 0, tol)) - std::log(r_down);
                };

                x = p.at(k, ll - 1) + p.at(k - 1, ll) - o;  // parallelogram start
                double f[3];
                residual_fn(x, f);
                double fnorm = std::sqrt(f[0] * f[0] + f[1] * f[1] + f[2] * f[2]);
                bool converged = false;
                int iter = 0;
                for (; iter < 50; ++iter) {
                    const double h = 1e-6 * scale;
                    double jac[3][3];
                    for (int c = 0; c < 3; ++c) {
                        Vec3 xp = x, xm = x;
                        (c == 0 ? xp.x : c == 1 ? xp.y : xp.z) += h;
                        (c == 0 ? xm.x : c == 1 ? xm.y : xm.z) -= h;
                        double fp[3], fm[3];
                        residual_fn(xp, fp);
                        residual_fn(xm, fm);
                        for (int r = 0; r < 3; ++r) jac[r][c] = (fp[r] - fm[r]) / (2.0 * h);
                    }
                    const double rhs[3] = {-f[0], -f[1], -f[2]};
                    double delta[3];
                    if (!solve3(jac, rhs, delta))
                        throw PropagationFailedError("extend_L_shaped: singular Newton system",
                                                     step);
                    double lambda = 1.0;
                    Vec3 xn;
                    double fn[3], fnn = 0.0;
                    while (true) {
                        xn = x + Vec3{lambda * delta[0], lambda * delta[1], lambda * delta[2]};
                        residual_fn(xn, fn);
                        fnn = std::sqrt(fn[0] * fn[0] + fn[1] * fn[1] + fn[2] * fn[2]);
                        if (fnn <= fnorm || lambda < 1e-4) break;
                        lambda *= 0.5;
                    }
                    const double stepnorm =
                        lambda * std::sqrt(delta[0] * delta[0] + delta[1] * delta[1] +
                                           delta[2] * delta[2]);
                    x = xn;
                    for (int r = 0; r < 3; ++r) f[r] = fn[r];
                    fnorm = fnn;
                    if (stepnorm <= 1e-12 * scale) {
                        converged = true;
                        ++iter;
                        break;
                    }
                }
                if (!converged)
                    throw PropagationFailedError("extend_L_shaped: Newton did not converge", step);
                out.newton_iterations_max = std::max(out.newton_iterations_max, iter);
                step_residual = fnorm;
            }
            p.at(k, ll) = x;
            known.at(k, ll) = true;
            if (!strictly_convex_top(std::array<Vec2, 4>{p.at(k - 1, ll - 1).xy(),
                                                         p.at(k, ll - 1).xy(), x.xy(),
                                                         p.at(k - 1, ll).xy()},
                                     tol))
                throw PropagationFailedError("extend_L_shaped: completed dual face not convex",
                                             step);
            out.step_residuals.push_back(step_residual);
        }
    }

    // Undualize. Covered vertices are taken from the input; interior vertices
    // come from the plane through their four dual points; far boundary
    // vertices from the face planes plus the parameter-line plane.
    std::vector<Point3> verts(static_cast<std::size_t>(m + 1) * (n + 1));
    auto vid = [&](int i, int j) { return static_cast<std::size_t>(i) * (n + 1) + j; };
    for (int i = 0; i <= m; ++i)
        for (int j = 0; j <= n; ++j)
            if (WideLShapedNet::covered(i, j)) verts[vid(i, j)] = l.verts.at(i, j);

    for (int i = 1; i < m; ++i) {
        for (int j = 1; j < n; ++j) {
            if (WideLShapedNet::covered(i, j)) continue;
            const Vec3 q[4] = {p.at(i - 1, j - 1), p.at(i, j - 1), p.at(i, j), p.at(i - 1, j)};
            double ata[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
            double atb[3] = {0, 0, 0};
            for (const Vec3& pt : q) {
                const double row[3] = {pt.x, pt.y, -1.0};
                for (int a2 = 0; a2 < 3; ++a2) {
                    for (int b2 = 0; b2 < 3; ++b2) ata[a2][b2] += row[a2] * row[b2];
                    atb[a2] += row[a2] * pt.z;
                }
            }
            double sol[3];
            if (!solve3(ata, atb, sol))
                throw PropagationFailedError("extend_L_shaped: degenerate interior dual plane",
                                             step);
            verts[vid(i, j)] = {sol[0], sol[1], sol[2]};
        }
    }

    if (m >= 3 && n >= 3) {
        const GeneralPlane row_plane =
            plane_from_points(l.verts.at(m, 0), l.verts.at(m, 1), l.verts.at(m, 2), tol);
        const GeneralPlane col_plane =
            plane_from_points(l.verts.at(0, n), l.verts.at(1, n), l.verts.at(2, n), tol);
        for (int j = 3; j < n; ++j)
            if (!WideLShapedNet::covered(m, j))
                verts[vid(m, j)] = intersect_three_planes(
                    dual_point_to_plane(p.at(m - 1, j - 1)),
                    dual_point_to_plane(p.at(m - 1, j)), row_plane, step);
        for (int i = 3; i < m; ++i)
            if (!WideLShapedNet::covered(i, n))
                verts[vid(i, n)] = intersect_three_planes(
                    dual_point_to_plane(p.at(i - 1, n - 1)),
                    dual_point_to_plane(p.at(i, n - 1)), col_plane, step);
        if (!WideLShapedNet::covered(m, n))
            verts[vid(m, n)] = intersect_two_planes_line(dual_point_to_plane(p.at(m - 1, n - 1)),
                                                         row_plane, col_plane, step);
    }

    out.net = QuadNet(m, n, std::move(verts));
    const ValidationReport rep = validate(out.net, std::max(tol, 1e-7));
    if (!rep.all_faces_convex)
        throw PropagationFailedError("extend_L_shaped: completed net has non-convex faces", step);
    return out;
}

DeformationCheckReport check_isometric_deformation(const DeformationFamily& fam,
                                                   const std::vector<double>& t_samples,
                                                   double tol) {
    return check_isometric_deformation(
        [&fam, tol](double t) { return fam.frame(t, tol); }, t_samples, tol);
}

DeformationCheckReport check_isometric_deformation(
    const std::function<QuadNet(double)>& frame_at, const std::vector<double>& t_samples,
    double tol) {
    DeformationCheckReport rep;
    if (t_samples.empty()) return rep;

    QuadNet base = frame_at(t_samples.front());
    const double diam = std::max(base.diameter(), 1e-30);
    const CurvatureGrid base_omega = curvature_grid(base, tol);
    rep.frames_valid = true;

    for (double t : t_samples) {
        QuadNet f;
        try {
            f = frame_at(t);
            if (!validate(f, std::max(tol, 1e-7)).valid())
                throw NonConvexFaceError("invalid frame");
        } catch (const Error&) {
            rep.frames_valid = false;
            rep.truncated = true;
            rep.first_invalid_t = t;
            break;
        }
        for (int i = 0; i <= f.m(); ++i)
            for (int j = 0; j <= f.n(); ++j)
                rep.top_view_defect = std::max(
                    rep.top_view_defect, iso_distance(f.at(i, j), base.at(i, j)));
        const CurvatureGrid om = curvature_grid(f, tol);
        for (std::size_t r = 0; r < om.omega.rows(); ++r)
            for (std::size_t c = 0; c < om.omega.cols(); ++c)
                rep.curvature_defect = std::max(
                    rep.curvature_defect,
                    std::abs(om.omega.at(r, c) - base_omega.omega.at(r, c)));

        // Congruence fit: top-view rotation/translation by Procrustes, then the
        // z-shear parameters by least squares; a trivial family fits exactly.
        const int nv = (f.m() + 1) * (f.n() + 1);
        Vec2 cen_b{0, 0}, cen_f{0, 0};
        for (int i = 0; i <= f.m(); ++i)
            for (int j = 0; j <= f.n(); ++j) {
                cen_b = cen_b + top_view(base.at(i, j));
                cen_f = cen_f + top_view(f.at(i, j));
            }
        cen_b = cen_b / nv;
        cen_f = cen_f / nv;
        double sc = 0.0, ss = 0.0;
        for (int i = 0; i <= f.m(); ++i)
            for (int j = 0; j <= f.n(); ++j) {
                const Vec2 pb = top_view(base.at(i, j)) - cen_b;
                const Vec2 pf = top_view(f.at(i, j)) - cen_f;
                sc += pb.dot(pf);
                ss += det2(pb, pf);
            }
        const double phi = std::atan2(ss, sc);
        IsotropicCongruence cong;
        cong.phi = phi;
        cong.b = {cen_f.x - (std::cos(phi) * cen_b.x - std::sin(phi) * cen_b.y),
                  cen_f.y - (std::sin(phi) * cen_b.x + std::cos(phi) * cen_b.y), 0.0};
        Matrix a(nv, 3);
        std::vector<double> rhs(nv);
        double top_fit = 0.0;
        int row = 0;
        for (int i = 0; i <= f.m(); ++i)
            for (int j = 0; j <= f.n(); ++j, ++row) {
                const Point3 mapped = apply_congruence(cong, base.at(i, j));
                top_fit = std::max(top_fit, iso_distance(mapped, f.at(i, j)));
                a(row, 0) = base.at(i, j).x;
                a(row, 1) = base.at(i, j).y;
                a(row, 2) = 1.0;
                rhs[row] = f.at(i, j).z - mapped.z;
            }
        const std::vector<double> shear = solve_least_squares(a, rhs);
        double z_fit = 0.0;
        row = 0;
        for (int i = 0; i <= f.m(); ++i)
            for (int j = 0; j <= f.n(); ++j, ++row) {
                const double pred = shear[0] * base.at(i, j).x + shear[1] * base.at(i, j).y +
                                    shear[2];
                z_fit = std::max(z_fit, std::abs(rhs[row] - pred));
            }
        const double fit_residual = std::max(top_fit, z_fit) / diam;
        rep.nontriviality_residual = std::max(rep.nontriviality_residual, fit_residual);
    }

    rep.top_views_fixed = rep.top_view_defect <= std::max(tol, 1e-9) * diam;
    rep.curvature_constant = rep.curvature_defect <= std::max(tol, 1e-8);
    rep.nontrivial = rep.nontriviality_residual > std::max(tol, 1e-9);
    return rep;
}

}  // namespace isoflex
