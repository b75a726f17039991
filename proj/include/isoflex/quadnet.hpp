#pragma once

#include "isoflex/core.hpp"
#include "isoflex/vec.hpp"

#include <array>
#include <cstddef>
#include <vector>

namespace isoflex {

// Rectangular grid of values indexed (i, j), i-major.
template <typename T>
class Grid {
public:
    Grid() = default;
    Grid(std::size_t rows, std::size_t cols, const T& init = T{})
        : rows_(rows), cols_(cols), data_(rows * cols, init) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    // decltype(auto) so Grid<bool> works through the vector<bool> proxy.
    decltype(auto) at(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    decltype(auto) at(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    const std::vector<T>& flat() const { return data_; }
    std::vector<T>& flat() { return data_; }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<T> data_;
};

using VertexGrid = Grid<Vec3>;

// An m x n net: (m+1)(n+1) vertices, m*n quadrilateral faces. m and n count
// faces. Construction only checks sizes; validate() reports the geometric
// invariants (planar, convex, non-isotropic faces; dual-convex vertices).
class QuadNet {
public:
    QuadNet() = default;
    QuadNet(int m, int n, std::vector<Point3> vertices);

    int m() const { return m_; }
    int n() const { return n_; }

    const Point3& at(int i, int j) const { return verts_[idx(i, j)]; }
    Point3& at(int i, int j) { return verts_[idx(i, j)]; }
    const std::vector<Point3>& vertices() const { return verts_; }

    // Face corners in cyclic order F(k,l), F(k+1,l), F(k+1,l+1), F(k,l+1).
    std::array<Point3, 4> face(int k, int l) const;

    double diameter() const;

private:
    std::size_t idx(int i, int j) const { return static_cast<std::size_t>(i) * (n_ + 1) + j; }
    int m_ = 0, n_ = 0;
    std::vector<Point3> verts_;
};

struct ValidationReport {
    Grid<double> face_planarity;      // max vertex-to-plane deviation / diameter
    Grid<bool> face_convex;
    Grid<bool> face_non_isotropic;
    Grid<bool> vertex_dual_convex;    // interior vertices only, (m-1) x (n-1)
    bool all_faces_planar = false;
    bool all_faces_convex = false;
    bool all_faces_non_isotropic = false;
    bool dual_convex = false;
    bool valid() const {
        return all_faces_planar && all_faces_convex && all_faces_non_isotropic;
    }
};

struct CurvatureGrid {
    Grid<double> omega;  // indexed by interior vertex (i-1, j-1), 0 < i < m, 0 < j < n
};

ValidationReport validate(const QuadNet& net, double tol = kDefaultTol);

// Plane of face (k, l): exact three-point solve checked against the fourth
// vertex, falling back to a least-squares fit over all four corners.
// residual (optional out) is the max deviation of the corners from the plane.
NonIsotropicPlane face_plane(const QuadNet& net, int k, int l, double* residual = nullptr,
                             double tol = kDefaultTol);

// The (m-1) x (n-1) net of points metric dual to the face planes.
QuadNet metric_dual_net(const QuadNet& net, double tol = kDefaultTol);

// Total isotropic Gaussian curvature concentrated at interior vertex (i, j):
// oriented top-view area of the dual of the four consecutive faces around it.
double curvature(const QuadNet& net, int i, int j, double tol = kDefaultTol);
CurvatureGrid curvature_grid(const QuadNet& net, double tol = kDefaultTol);

// Dual top views of the four consecutive faces around (i, j), in the order
// p(i-1,j-1), p(i,j-1), p(i,j), p(i-1,j).
std::array<Vec2, 4> gauss_image_top(const QuadNet& net, int i, int j, double tol = kDefaultTol);

double oriented_area_top(const std::array<Vec2, 4>& q);
double oriented_area_top(const std::array<Point3, 4>& q);

// d/dt Area(P + tQ) at t = 0 for quadrilaterals with parallel corresponding
// sides; throws NotParallelSidesError otherwise.
double mixed_area(const std::array<Vec2, 4>& p, const std::array<Vec2, 4>& q,
                  double tol = kDefaultTol);

// Mixed area of the dual top views at corresponding vertices of two
// v-parallel nets; 0 at boundary vertices by convention.
double mixed_curvature(const QuadNet& a, const QuadNet& b, int i, int j,
                       double tol = kDefaultTol);

bool are_combescure(const QuadNet& a, const QuadNet& b, double tol = kDefaultTol);
bool are_v_parallel(const QuadNet& a, const QuadNet& b, double tol = kDefaultTol);

// Euclidean area of a planar quadrilateral in space (norm of the vector area).
double face_area_euclidean(const std::array<Point3, 4>& q);

// Strict convexity of a quadrilateral's top view in the listed cyclic order.
bool strictly_convex_top(const std::array<Vec2, 4>& q, double tol = kDefaultTol);
bool strictly_convex_top(const std::array<Point3, 4>& q, double tol = kDefaultTol);

}  // namespace isoflex
