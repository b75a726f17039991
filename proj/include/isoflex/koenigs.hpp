#pragma once

#include "isoflex/quadnet.hpp"

#include <array>
#include <vector>

namespace isoflex {

struct DualQuadResult {
    std::array<Point3, 4> quad;  // anchored at the origin, first side equal to the input's
    double residual = 0.0;       // diagonal skew of the input, relative to its diameter
};

// Dual of a planar quadrilateral: corresponding sides parallel,
// non-corresponding diagonals parallel. Vertex i corresponds to input vertex i.
DualQuadResult dual_quad(const std::array<Point3, 4>& q, double tol = kDefaultTol);

struct ChristoffelResult {
    VertexGrid dual;        // same grid dimensions as the input net
    double residual = 0.0;  // max propagation closure defect / net diameter
    // Normalization convention: the dual is determined up to translation and
    // scale only; these record the choice made.
    int anchor_i = 0, anchor_j = 0;
    Vec3 anchor_position{};         // dual value at the anchor vertex
    double first_edge_scale = 1.0;  // |dual edge| / |primal edge| at the anchor
};

// Christoffel dual candidate by face-by-face propagation in row-major order,
// anchored at the origin with the first dual edge matching the primal edge
// length. The residual is the Koenigs test: it vanishes exactly for Koenigs nets.
ChristoffelResult christoffel_dual_net(const QuadNet& net, double tol = kDefaultTol);

bool is_koenigs(const QuadNet& net, double tol = kDefaultTol);

struct HeightGrid {
    Grid<double> h;
    double loop_defect = 0.0;  // max defect over independent grid loops, absolute
};

// Integrates the Christoffel height relation over a spanning tree of the grid
// graph, anchor value 0 at (0,0). Inputs must be parallel vertex grids.
HeightGrid height_grid(const VertexGrid& pstar, const VertexGrid& cstar,
                       double tol = kDefaultTol);

struct ReciprocalResult {
    VertexGrid c;                     // m x n points, anchored at the origin
    double residual = 0.0;            // Christoffel closure defect of the dual
    double parallelism_defect = 0.0;  // max sine of angle over both edge families
};

// Reciprocal-parallel net of an infinitesimally flexible dual-convex net,
// assembled as C_kl = (-c2, c1, h) from the Christoffel dual of the metric dual.
ReciprocalResult reciprocal_parallel(const QuadNet& net, double tol = kDefaultTol);

struct VelocityResult {
    QuadNet diagram;
    double residual = 0.0;  // max cross-face disagreement of vertex heights / diameter
};

// Velocity diagram: the v-parallel net whose face planes are the duals of the
// Christoffel dual vertices; encodes an infinitesimal isotropic deformation.
VelocityResult velocity_diagram(const QuadNet& net, double tol = kDefaultTol);

struct MotionSpace {
    int dimension = 0;          // nullspace dimension of the face+vertex system
    int trivial_dimension = 0;  // rank of the global congruence action
    std::vector<VertexGrid> basis;       // vertex-velocity grids, orthonormal
    std::vector<double> singular_values; // full spectrum of the constraint matrix
};

// Direct linear-system oracle for infinitesimal isotropic flexibility:
// unknowns are one infinitesimal congruence per face plus one velocity per
// vertex; equations are the face incidences and the curvature derivative at
// each interior vertex.
MotionSpace motion_space(const QuadNet& net, double tol = kDefaultTol);

bool is_infinitesimally_flexible(const MotionSpace& ms);

}  // namespace isoflex
