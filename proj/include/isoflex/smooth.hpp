#pragma once

#include "isoflex/quadnet.hpp"

#include <functional>
#include <vector>

namespace isoflex {

// Natural cubic spline through (param, value) samples with analytic derivatives.
class CubicSpline {
public:
    CubicSpline() = default;
    CubicSpline(std::vector<double> params, std::vector<double> values);

    double value(double u) const;
    double d1(double u) const;
    double d2(double u) const;
    double lo() const { return x_.empty() ? 0.0 : x_.front(); }
    double hi() const { return x_.empty() ? 0.0 : x_.back(); }

private:
    std::size_t segment(double u) const;
    std::vector<double> x_, y_, m_;  // knots, values, second derivatives
};

// Scalar function with two derivatives on an interval, analytic or spline-backed.
class ScalarCurve {
public:
    ScalarCurve() = default;
    static ScalarCurve analytic(std::function<double(double)> f, std::function<double(double)> df,
                                std::function<double(double)> ddf, double lo, double hi);
    static ScalarCurve spline(const std::vector<double>& params,
                              const std::vector<double>& values);

    double value(double u) const { return f_(u); }
    double d1(double u) const { return df_(u); }
    double d2(double u) const { return ddf_(u); }
    double lo() const { return lo_; }
    double hi() const { return hi_; }

private:
    void check_consistency() const;
    std::function<double(double)> f_, df_, ddf_;
    double lo_ = 0.0, hi_ = 1.0;
};

// Vector-valued curve with the same contract.
class SpaceCurve {
public:
    SpaceCurve() = default;
    static SpaceCurve analytic(std::function<Vec3(double)> f, std::function<Vec3(double)> df,
                               std::function<Vec3(double)> ddf, double lo, double hi);
    static SpaceCurve spline(const std::vector<double>& params, const std::vector<Vec3>& points);

    Vec3 value(double u) const { return f_(u); }
    Vec3 d1(double u) const { return df_(u); }
    Vec3 d2(double u) const { return ddf_(u); }
    double lo() const { return lo_; }
    double hi() const { return hi_; }

private:
    void check_consistency() const;
    std::function<Vec3(double)> f_, df_, ddf_;
    double lo_ = 0.0, hi_ = 1.0;
};

struct Domain2 {
    double u0 = 0.0, u1 = 1.0, v0 = 0.0, v1 = 1.0;
    bool contains(double u, double v) const {
        return u >= u0 - 1e-12 && u <= u1 + 1e-12 && v >= v0 - 1e-12 && v <= v1 + 1e-12;
    }
};

// Scale-translational patch f*(u,v) = a(u) + sigma(u) b(v) with sigma > 0.
struct SurfacePatch {
    SpaceCurve a;
    SpaceCurve b;
    ScalarCurve sigma;
    Domain2 domain;
    double regularity_residual = 0.0;  // min sine of angle between f*_u and f*_v on the grid

    SurfacePatch(SpaceCurve a_, SpaceCurve b_, ScalarCurve sigma_, Domain2 dom);
};

// Value and first/second derivatives of a parametric surface at (u, v).
struct SurfaceJet {
    Vec3 f, fu, fv, fuu, fuv, fvv;
};
using SurfaceEvalFn = std::function<SurfaceJet(double, double)>;

// Graph surface z = z(x, y) parameterized by (x, y).
SurfaceEvalFn graph_surface(std::function<double(double, double)> z,
                            std::function<double(double, double)> zx,
                            std::function<double(double, double)> zy,
                            std::function<double(double, double)> zxx,
                            std::function<double(double, double)> zxy,
                            std::function<double(double, double)> zyy);

Vec3 eval_scale_translational(const SurfacePatch& s, double u, double v);

// Deformed patch a(u0) + int a' sigma / sqrt(t + sigma^2) + sqrt(t + sigma^2) b(v),
// with adaptive Simpson quadrature for the offset integral.
Vec3 deform_scale_translational(const SurfacePatch& s, double u, double v, double t,
                                double quad_tol = 1e-10);

// Full jets of the (deformed) patch; derivatives are analytic, only the value
// of the deformed patch needs quadrature.
SurfaceEvalFn scale_translational_eval(const SurfacePatch& s);
SurfaceEvalFn scale_translational_deformed_eval(const SurfacePatch& s, double t,
                                                double quad_tol = 1e-10);

Vec3 eval_T_surface(const SurfacePatch& s, double u, double v, double tol = kDefaultTol);
Vec3 deform_T_surface(const SurfacePatch& s, double u, double v, double t,
                      double quad_tol = 1e-10, double tol = kDefaultTol);

// Jet of the generalized T-surface; first derivatives analytic, second
// derivatives by central differences of the analytic first derivatives.
SurfaceEvalFn t_surface_eval(const SurfacePatch& s, double t = 0.0, double quad_tol = 1e-10);

// Isotropic Gaussian curvature from the determinant formula over the top-view
// first fundamental form.
double iso_gauss_curvature(const SurfaceEvalFn& f, double u, double v);

// Metric dual of the tangent plane at (u, v).
Vec3 dual_of_surface_point(const SurfaceEvalFn& f, double u, double v,
                           double tol = kDefaultTol);

struct SampleResult {
    QuadNet net;
    double max_displacement = 0.0;  // max corner distance to the per-face plane
};

// Samples an evaluator on a uniform (mu x nv)-face grid. Faces are only
// approximately planar; the report carries the worst planarization displacement.
SampleResult sample_to_quadnet(const std::function<Vec3(double, double)>& f, const Domain2& dom,
                               int mu, int nv);

// integral of K dx dy over the domain (top-view area element), by composite
// Simpson refinement to the requested absolute tolerance.
double integrate_gauss_curvature(const SurfaceEvalFn& f, const Domain2& dom,
                                 double tol = 1e-8);

// Adaptive Simpson quadrature of a vector-valued integrand.
Vec3 adaptive_simpson(const std::function<Vec3(double)>& f, double lo, double hi, double tol);

}  // namespace isoflex
