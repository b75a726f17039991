#pragma once

#include "isoflex/quadnet.hpp"

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace isoflex {

// Generator data for a cone-cylinder net P_ij = a_i + sigma_i * b_j,
// 0 <= i <= m+1, 0 <= j <= n+1 (so a and sigma carry m+2 entries, b carries n+2).
struct ConeCylinderData {
    std::vector<Vec3> a;
    std::vector<Vec3> b;
    std::vector<double> sigma;

    int m() const { return static_cast<int>(a.size()) - 2; }
    int n() const { return static_cast<int>(b.size()) - 2; }
    void check() const;  // sizes consistent, sigma > 0
};

enum class EdgeDir { PlusI, MinusI, PlusJ, MinusJ };

// Opposite ratio of interior vertex (i, j) with respect to the edge in the
// given direction, read off the dual quadrilateral as the ratio of the two
// triangle areas cut by its diagonals.
double opposite_ratio(const QuadNet& net, int i, int j, EdgeDir dir, double tol = kDefaultTol);

// Opposite ratio of a quadrilateral (cyclic vertex order) with respect to the
// side between vertices `side` and `side+1`: area(P v_s v_{s+1}) / area(P v_{s+2} v_{s+3})
// where P is the diagonal intersection.
double opposite_ratio_of_quad(const std::array<Vec2, 4>& q, int side, double tol = kDefaultTol);

struct Classification {
    bool class_i_rows = false;
    bool class_i_cols = false;
    bool class_ii = false;
    bool class_i_rows_vacuous = false;  // m < 3: no row constraints exist
    bool class_i_cols_vacuous = false;
    bool class_ii_vacuous = false;
    double residual_i_rows = 0.0;  // max sine of angle between dual segments
    double residual_i_cols = 0.0;
    double residual_ii = 0.0;      // max |log r1 - log r2| over interior edges
    std::vector<double> residuals_i_rows;  // one per k
    std::vector<double> residuals_i_cols;  // one per l
    std::vector<double> residuals_ii;      // one per interior edge
    int parallel_face_pairs = 0;   // pairs of faces with equal gradients

    bool class_i() const { return class_i_rows || class_i_cols; }
};

// Finite-flexibility classifier: condition (i) is tested in the dual as mutual
// parallelism of the segments connecting every other face dual, condition (ii)
// as equality of opposite ratios across interior edges.
Classification classify(const QuadNet& net, double tol = kDefaultTol);

QuadNet gen_cone_cylinder(const ConeCylinderData& d, double tol = kDefaultTol);
QuadNet deform_cone_cylinder(const ConeCylinderData& d, double t, double tol = kDefaultTol);

QuadNet gen_generalized_T(const ConeCylinderData& d, double tol = kDefaultTol);
QuadNet deform_generalized_T(const ConeCylinderData& d, double t, double tol = kDefaultTol);

// The flexible 2x2 net (i, j, i mod 2 + j mod 2) at deformation parameter t.
QuadNet gen_example_2x2(double t);

enum class FamilyKind { ConeCylinder, GeneralizedT, Example2x2 };

struct DeformationFamily {
    FamilyKind kind = FamilyKind::Example2x2;
    ConeCylinderData data;  // unused for Example2x2
    double t0 = 0.0, t1 = 1.0;

    QuadNet frame(double t, double tol = kDefaultTol) const;
};

std::string family_kind_name(FamilyKind k);

struct AffineSymmetryResult {
    bool symmetric = false;
    double residual = 0.0;  // sine of the angle between the connecting segments
};

// Two quadrilaterals sharing exactly one edge are affine symmetric with
// respect to it iff the segments joining their non-shared vertices are parallel.
AffineSymmetryResult is_affine_symmetric_pair(const std::array<Point3, 4>& q1,
                                              const std::array<Point3, 4>& q2,
                                              double tol = kDefaultTol);

// Vertices F_ij known for min(i, j) <= 2; faces covered for i or j in {0, 1}.
struct WideLShapedNet {
    int m = 0, n = 0;
    VertexGrid verts;  // (m+1) x (n+1); only covered entries are meaningful

    static bool covered(int i, int j) { return std::min(i, j) <= 2; }
    static bool face_covered(int k, int l) { return k <= 1 || l <= 1; }
};

WideLShapedNet extract_wide_L(const QuadNet& net);

// Strict-convexity flags of the covered faces (rows 0..1 full, columns 0..1
// full); uncovered slots read false.
Grid<bool> covered_face_convexity(const WideLShapedNet& l, double tol = kDefaultTol);

enum class LClass { ClassI, ClassII };

struct LExtensionResult {
    QuadNet net;
    std::vector<double> step_residuals;
    int newton_iterations_max = 0;
};

// Completes a wide L-shaped net to the unique flexible net extending it.
// Class I propagates dual vertices by plane/line intersection from the
// affine-symmetry condition; class II solves planarity plus two opposite-ratio
// equalities per vertex with a damped Newton iteration. Far boundary vertices
// are pinned by the planes of the parameter lines through the three known
// boundary vertices of each family.
LExtensionResult extend_L_shaped(const WideLShapedNet& l, LClass which,
                                 double tol = kDefaultTol);

struct DeformationCheckReport {
    bool top_views_fixed = false;
    bool curvature_constant = false;
    bool nontrivial = false;
    bool frames_valid = false;
    double top_view_defect = 0.0;
    double curvature_defect = 0.0;
    double nontriviality_residual = 0.0;  // max congruence-fit residual over t
    double first_invalid_t = 0.0;
    bool truncated = false;

    bool passed() const {
        return top_views_fixed && curvature_constant && nontrivial && frames_valid;
    }
};

// Verifies the two conditions of an isotropic isometric deformation on sampled
// frames (fixed top views, constant interior curvatures) plus nontriviality
// (no single congruence relates the frames).
DeformationCheckReport check_isometric_deformation(const DeformationFamily& fam,
                                                   const std::vector<double>& t_samples,
                                                   double tol = kDefaultTol);
DeformationCheckReport check_isometric_deformation(
    const std::function<QuadNet(double)>& frame_at, const std::vector<double>& t_samples,
    double tol = kDefaultTol);

}  // namespace isoflex
