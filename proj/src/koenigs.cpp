#include "isoflex/koenigs.hpp"

#include "isoflex/errors.hpp"
#include "isoflex/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace isoflex {

namespace {

double quad_diameter(const std::array<Point3, 4>& q) {
    double d = 0.0;
    for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b) d = std::max(d, (q[a] - q[b]).norm());
    return d;
}

double grid_diameter(const VertexGrid& g) {
    double d = 0.0;
    for (const Vec3& a : g.flat())
        for (const Vec3& b : g.flat()) d = std::max(d, (a - b).norm());
    return d;
}

}  // namespace

DualQuadResult dual_quad(const std::array<Point3, 4>& q, double tol) {
    const Vec3 u = q[2] - q[0];  // diagonal AC
    const Vec3 w = q[3] - q[1];  // diagonal BD
    const double scale = std::max(quad_diameter(q), 1e-30);

    // Intersection parameters of the diagonals: A + p u = B + q w (least squares).
    const Vec3 rhs = q[1] - q[0];
    const double uu = u.dot(u), ww = w.dot(w), uw = u.dot(w);
    const double gram = uu * ww - uw * uw;
    if (gram <= tol * tol * scale * scale * scale * scale || uu == 0.0 || ww == 0.0)
        throw DegenerateError("dual_quad: diagonals are parallel or degenerate");
    const double bu = rhs.dot(u), bw = rhs.dot(w);
    const double p = (bu * ww - bw * uw) / gram;
    const double qq = (bu * uw - bw * uu) / gram;

    const Vec3 closest_on_ac = q[0] + p * u;
    const Vec3 closest_on_bd = q[1] + qq * w;
    const double skew = (closest_on_ac - closest_on_bd).norm();

    if (std::min({std::abs(p), std::abs(qq), std::abs(1.0 - p), std::abs(1.0 - qq)}) <= tol)
        throw DegenerateError("dual_quad: three vertices are collinear");

    DualQuadResult out;
    out.residual = skew / scale;
    const Vec3 a_rel{0.0, 0.0, 0.0};
    const Vec3 b_rel = p * u - qq * w;
    const Vec3 c_rel = -(qq / (1.0 - p)) * w;
    const Vec3 d_rel = -(p * qq / (1.0 - qq)) * u - qq * w;
    out.quad = {a_rel, b_rel, c_rel, d_rel};
    return out;
}

ChristoffelResult christoffel_dual_net(const QuadNet& net, double tol) {
    const int m = net.m(), n = net.n();
    ChristoffelResult out;
    out.dual = VertexGrid(m + 1, n + 1, Vec3{});
    Grid<bool> known(m + 1, n + 1, false);
    const double diam = std::max(net.diameter(), 1e-30);
    double max_defect = 0.0;

    for (int k = 0; k < m; ++k) {
        for (int l = 0; l < n; ++l) {
            const std::array<Point3, 4> f = net.face(k, l);
            const DualQuadResult dq = dual_quad(f, tol);
            max_defect = std::max(max_defect, dq.residual * quad_diameter(f));

            const int ii[4] = {k, k + 1, k + 1, k};
            const int jj[4] = {l, l, l + 1, l + 1};
            int n_known = 0;
            for (int s = 0; s < 4; ++s) n_known += known.at(ii[s], jj[s]) ? 1 : 0;

            double sc = 1.0;
            Vec3 t{};
            if (n_known > 0) {
                // Fit scale and translation to the already-placed corners.
                Matrix a(3 * n_known, 4);
                std::vector<double> b(3 * n_known);
                int r = 0;
                for (int s = 0; s < 4; ++s) {
                    if (!known.at(ii[s], jj[s])) continue;
                    const Vec3 shape = dq.quad[s];
                    const Vec3 target = out.dual.at(ii[s], jj[s]);
                    const double shp[3] = {shape.x, shape.y, shape.z};
                    const double tgt[3] = {target.x, target.y, target.z};
                    for (int c = 0; c < 3; ++c) {
                        a(r, 0) = shp[c];
                        a(r, 1 + c) = 1.0;
                        b[r] = tgt[c];
                        ++r;
                    }
                }
                std::vector<double> x = solve_least_squares(a, b);
                sc = x[0];
                t = {x[1], x[2], x[3]};
            }
            for (int s = 0; s < 4; ++s) {
                const Vec3 placed = sc * dq.quad[s] + t;
                if (known.at(ii[s], jj[s])) {
                    max_defect =
                        std::max(max_defect, (placed - out.dual.at(ii[s], jj[s])).norm());
                } else {
                    out.dual.at(ii[s], jj[s]) = placed;
                    known.at(ii[s], jj[s]) = true;
                }
            }
        }
    }
    out.residual = max_defect / diam;
    out.anchor_position = out.dual.at(0, 0);
    const double primal_edge = (net.at(1, 0) - net.at(0, 0)).norm();
    if (primal_edge > 0.0)
        out.first_edge_scale = (out.dual.at(1, 0) - out.dual.at(0, 0)).norm() / primal_edge;
    return out;
}

bool is_koenigs(const QuadNet& net, double tol) {
    return christoffel_dual_net(net, tol).residual <= tol;
}

HeightGrid height_grid(const VertexGrid& pstar, const VertexGrid& cstar, double tol) {
    if (pstar.rows() != cstar.rows() || pstar.cols() != cstar.cols())
        throw DimensionMismatchError("height_grid: grid dimensions differ");
    const std::size_t rows = pstar.rows(), cols = pstar.cols();

    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) {
            if (i + 1 < rows) {
                const Vec3 ep = pstar.at(i + 1, j) - pstar.at(i, j);
                const Vec3 ec = cstar.at(i + 1, j) - cstar.at(i, j);
                if (sin_angle(ep, ec) > std::max(tol, 1e-8))
                    throw NotParallelError("height_grid: nets are not Combescure-parallel");
            }
            if (j + 1 < cols) {
                const Vec3 ep = pstar.at(i, j + 1) - pstar.at(i, j);
                const Vec3 ec = cstar.at(i, j + 1) - cstar.at(i, j);
                if (sin_angle(ep, ec) > std::max(tol, 1e-8))
                    throw NotParallelError("height_grid: nets are not Combescure-parallel");
            }
        }

    auto increment = [&](std::size_t i0, std::size_t j0, std::size_t i1, std::size_t j1) {
        const Vec2 dc = cstar.at(i1, j1).xy() - cstar.at(i0, j0).xy();
        const Vec2 pm = (pstar.at(i1, j1).xy() + pstar.at(i0, j0).xy()) * 0.5;
        return det2(dc, pm);
    };

    HeightGrid out;
    out.h = Grid<double>(rows, cols, 0.0);
    for (std::size_t j = 1; j < cols; ++j)
        out.h.at(0, j) = out.h.at(0, j - 1) + increment(0, j - 1, 0, j);
    for (std::size_t i = 1; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j)
            out.h.at(i, j) = out.h.at(i - 1, j) + increment(i - 1, j, i, j);

    double defect = 0.0;
    for (std::size_t i = 0; i + 1 < rows; ++i)
        for (std::size_t j = 0; j + 1 < cols; ++j) {
            const double loop = increment(i, j, i + 1, j) + increment(i + 1, j, i + 1, j + 1) -
                                increment(i, j + 1, i + 1, j + 1) - increment(i, j, i, j + 1);
            defect = std::max(defect, std::abs(loop));
        }
    out.loop_defect = defect;
    return out;
}

namespace {

VertexGrid net_grid(const QuadNet& net) {
    VertexGrid g(net.m() + 1, net.n() + 1);
    for (int i = 0; i <= net.m(); ++i)
        for (int j = 0; j <= net.n(); ++j) g.at(i, j) = net.at(i, j);
    return g;
}

}  // namespace

ReciprocalResult reciprocal_parallel(const QuadNet& net, double tol) {
    const QuadNet dual = metric_dual_net(net, tol);
    const ChristoffelResult ch = christoffel_dual_net(dual, tol);
    if (ch.residual > tol)
        throw NotInfinitesimallyFlexibleError(
            "reciprocal_parallel: metric dual has no Christoffel dual (not Koenigs)");
    const HeightGrid hg = height_grid(net_grid(dual), ch.dual, tol);

    const int m = net.m(), n = net.n();
    ReciprocalResult out;
    out.residual = ch.residual;
    out.c = VertexGrid(m, n);
    for (int k = 0; k < m; ++k)
        for (int l = 0; l < n; ++l) {
            const Vec3 cs = ch.dual.at(k, l);
            out.c.at(k, l) = {-cs.y, cs.x, hg.h.at(k, l)};
        }

    double defect = 0.0;
    for (int i = 0; i < m; ++i)
        for (int j = 1; j < n; ++j)
            defect = std::max(defect, sin_angle(out.c.at(i, j) - out.c.at(i, j - 1),
                                                net.at(i, j) - net.at(i + 1, j)));
    for (int i = 1; i < m; ++i)
        for (int j = 0; j < n; ++j)
            defect = std::max(defect, sin_angle(out.c.at(i, j) - out.c.at(i - 1, j),
                                                net.at(i, j) - net.at(i, j + 1)));
    out.parallelism_defect = defect;
    return out;
}

VelocityResult velocity_diagram(const QuadNet& net, double tol) {
    const QuadNet dual = metric_dual_net(net, tol);
    const ChristoffelResult ch = christoffel_dual_net(dual, tol);
    if (ch.residual > tol)
        throw NotInfinitesimallyFlexibleError("velocity_diagram: net is not infinitesimally flexible");

    const int m = net.m(), n = net.n();
    const double diam = std::max(net.diameter(), 1e-30);
    const double spread = grid_diameter(ch.dual);
    if (spread <= tol * diam)
        throw NotInfinitesimallyFlexibleError("velocity_diagram: Christoffel dual is trivial");

    std::vector<Point3> verts;
    verts.reserve(static_cast<std::size_t>(m + 1) * (n + 1));
    double residual = 0.0;
    for (int i = 0; i <= m; ++i) {
        for (int j = 0; j <= n; ++j) {
            const Point3 f = net.at(i, j);
            double z = 0.0;
            bool first = true;
            double zmin = 0.0, zmax = 0.0;
            for (int k = std::max(i - 1, 0); k <= std::min(i, m - 1); ++k) {
                for (int l = std::max(j - 1, 0); l <= std::min(j, n - 1); ++l) {
                    const Vec3 c = ch.dual.at(k, l);
                    const double zc = c.x * f.x + c.y * f.y - c.z;
                    if (first) {
                        z = zmin = zmax = zc;
                        first = false;
                    } else {
                        zmin = std::min(zmin, zc);
                        zmax = std::max(zmax, zc);
                    }
                }
            }
            residual = std::max(residual, zmax - zmin);
            verts.push_back({f.x, f.y, z});
        }
    }
    return {QuadNet(m, n, std::move(verts)), residual / diam};
}

MotionSpace motion_space(const QuadNet& net, double tol) {
    const int m = net.m(), n = net.n();
    const int nf = m * n;
    const int nv = (m + 1) * (n + 1);
    const int cols = 6 * nf + 3 * nv;
    const int rows = 12 * nf + std::max(m - 1, 0) * std::max(n - 1, 0);

    auto face_col = [&](int k, int l) { return 6 * (k * n + l); };
    auto vert_col = [&](int i, int j) { return 6 * nf + 3 * (i * (n + 1) + j); };

    Matrix a(rows, cols);
    int row = 0;
    for (int k = 0; k < m; ++k) {
        for (int l = 0; l < n; ++l) {
            const int fc = face_col(k, l);
            const int ii[4] = {k, k + 1, k + 1, k};
            const int jj[4] = {l, l, l + 1, l + 1};
            for (int s = 0; s < 4; ++s) {
                const Point3 f = net.at(ii[s], jj[s]);
                const int vc = vert_col(ii[s], jj[s]);
                // V = a x + b with a = [[0,-phi,0],[phi,0,0],[c1,c2,0]].
                a(row, vc + 0) = 1.0;
                a(row, fc + 0) = f.y;
                a(row, fc + 3) = -1.0;
                ++row;
                a(row, vc + 1) = 1.0;
                a(row, fc + 0) = -f.x;
                a(row, fc + 4) = -1.0;
                ++row;
                a(row, vc + 2) = 1.0;
                a(row, fc + 1) = -f.x;
                a(row, fc + 2) = -f.y;
                a(row, fc + 5) = -1.0;
                ++row;
            }
        }
    }

    // Vertex condition: d/dt Omega = 0, linear in the per-face parameters via
    // the first-order motion of each dual point (c1 - phi g2, c2 + phi g1).
    for (int i = 1; i < m; ++i) {
        for (int j = 1; j < n; ++j) {
            const int fk[4] = {i - 1, i, i, i - 1};
            const int fl[4] = {j - 1, j - 1, j, j};
            Vec2 g[4];
            for (int r = 0; r < 4; ++r) {
                const NonIsotropicPlane pl = face_plane(net, fk[r], fl[r], nullptr, tol);
                g[r] = {pl.g1, pl.g2};
            }
            for (int r = 0; r < 4; ++r) {
                const Vec2 d = g[(r + 1) % 4] - g[(r + 3) % 4];
                const int fc = face_col(fk[r], fl[r]);
                a(row, fc + 1) += 0.5 * d.y;
                a(row, fc + 2) += -0.5 * d.x;
                a(row, fc + 0) += -0.5 * (g[r].x * d.x + g[r].y * d.y);
            }
            ++row;
        }
    }

    MotionSpace out;
    Matrix ns = nullspace(a, tol, &out.singular_values);
    out.dimension = static_cast<int>(ns.cols());

    // Rank of the global congruence action on the vertices.
    Matrix g(3 * nv, 6);
    for (int i = 0; i <= m; ++i) {
        for (int j = 0; j <= n; ++j) {
            const Point3 f = net.at(i, j);
            const int r = 3 * (i * (n + 1) + j);
            g(r + 0, 0) = -f.y;
            g(r + 0, 3) = 1.0;
            g(r + 1, 0) = f.x;
            g(r + 1, 4) = 1.0;
            g(r + 2, 1) = f.x;
            g(r + 2, 2) = f.y;
            g(r + 2, 5) = 1.0;
        }
    }
    out.trivial_dimension = static_cast<int>(numeric_rank(g, 1e-12));

    // Project nullspace vectors onto the vertex-velocity coordinates and
    // orthonormalize (the velocities determine the face parameters uniquely).
    std::vector<std::vector<double>> basis;
    for (std::size_t c = 0; c < ns.cols(); ++c) {
        std::vector<double> v(3 * nv);
        for (int r = 0; r < 3 * nv; ++r) v[r] = ns(6 * nf + r, c);
        for (const auto& prev : basis) {
            double dot = 0.0;
            for (int r = 0; r < 3 * nv; ++r) dot += v[r] * prev[r];
            for (int r = 0; r < 3 * nv; ++r) v[r] -= dot * prev[r];
        }
        double norm = 0.0;
        for (double x : v) norm += x * x;
        norm = std::sqrt(norm);
        if (norm <= 1e-12) continue;
        for (double& x : v) x /= norm;
        basis.push_back(std::move(v));
    }
    for (const auto& v : basis) {
        VertexGrid bg(m + 1, n + 1);
        for (int i = 0; i <= m; ++i)
            for (int j = 0; j <= n; ++j) {
                const int r = 3 * (i * (n + 1) + j);
                bg.at(i, j) = {v[r], v[r + 1], v[r + 2]};
            }
        out.basis.push_back(std::move(bg));
    }
    return out;
}

bool is_infinitesimally_flexible(const MotionSpace& ms) {
    return ms.dimension > ms.trivial_dimension;
}

}  // namespace isoflex
