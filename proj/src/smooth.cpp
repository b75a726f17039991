#include "isoflex/smooth.hpp"

#include "isoflex/errors.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace isoflex {

CubicSpline::CubicSpline(std::vector<double> params, std::vector<double> values)
    : x_(std::move(params)), y_(std::move(values)) {
    const std::size_t n = x_.size();
    if (n < 3 || y_.size() != n)
        throw PreconditionError("CubicSpline: need at least 3 samples");
    for (std::size_t i = 1; i < n; ++i)
        if (!(x_[i] > x_[i - 1]))
            throw PreconditionError("CubicSpline: parameters must be strictly increasing");

    // Natural spline: tridiagonal system for the second derivatives.
    m_.assign(n, 0.0);
    std::vector<double> diag(n, 0.0), rhs(n, 0.0), sub(n, 0.0), sup(n, 0.0);
    diag[0] = diag[n - 1] = 1.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double h0 = x_[i] - x_[i - 1], h1 = x_[i + 1] - x_[i];
        sub[i] = h0 / 6.0;
        diag[i] = (h0 + h1) / 3.0;
        sup[i] = h1 / 6.0;
        rhs[i] = (y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0;
    }
    for (std::size_t i = 1; i < n; ++i) {
        const double w = sub[i] / diag[i - 1];
        diag[i] -= w * sup[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    m_[n - 1] = rhs[n - 1] / diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) m_[i] = (rhs[i] - sup[i] * m_[i + 1]) / diag[i];
}

std::size_t CubicSpline::segment(double u) const {
    if (u < x_.front() - 1e-12 || u > x_.back() + 1e-12)
        throw OutOfDomainError("CubicSpline: parameter outside the sample range");
    std::size_t i = std::upper_bound(x_.begin(), x_.end(), u) - x_.begin();
    if (i == 0) return 0;
    if (i >= x_.size()) return x_.size() - 2;
    return i - 1;
}

double CubicSpline::value(double u) const {
    const std::size_t i = segment(u);
    const double h = x_[i + 1] - x_[i], t0 = (x_[i + 1] - u) / h, t1 = (u - x_[i]) / h;
    return t0 * y_[i] + t1 * y_[i + 1] +
           ((t0 * t0 * t0 - t0) * m_[i] + (t1 * t1 * t1 - t1) * m_[i + 1]) * h * h / 6.0;
}

double CubicSpline::d1(double u) const {
    const std::size_t i = segment(u);
    const double h = x_[i + 1] - x_[i], t0 = (x_[i + 1] - u) / h, t1 = (u - x_[i]) / h;
    return (y_[i + 1] - y_[i]) / h +
           ((1.0 - 3.0 * t0 * t0) * m_[i] + (3.0 * t1 * t1 - 1.0) * m_[i + 1]) * h / 6.0;
}

double CubicSpline::d2(double u) const {
    const std::size_t i = segment(u);
    const double h = x_[i + 1] - x_[i], t0 = (x_[i + 1] - u) / h, t1 = (u - x_[i]) / h;
    return t0 * m_[i] + t1 * m_[i + 1];
}

namespace {

void probe_consistency(const std::function<double(double)>& f,
                       const std::function<double(double)>& df, double lo, double hi) {
    const double h = 1e-5 * std::max(hi - lo, 1e-6);
    for (int k = 1; k <= 5; ++k) {
        const double u = lo + (hi - lo) * k / 6.0;
        const double fd = (f(u + h) - f(u - h)) / (2.0 * h);
        const double an = df(u);
        const double scale = std::max({std::abs(fd), std::abs(an), 1.0});
        if (std::abs(fd - an) > 1e-5 * scale * 10.0)
            throw PreconditionError("curve derivative inconsistent with finite differences");
    }
}

}  // namespace

ScalarCurve ScalarCurve::analytic(std::function<double(double)> f, std::function<double(double)> df,
                                  std::function<double(double)> ddf, double lo, double hi) {
    ScalarCurve c;
    c.f_ = std::move(f);
    c.df_ = std::move(df);
    c.ddf_ = std::move(ddf);
    c.lo_ = lo;
    c.hi_ = hi;
    c.check_consistency();
    return c;
}

ScalarCurve ScalarCurve::spline(const std::vector<double>& params,
                                const std::vector<double>& values) {
    auto sp = std::make_shared<CubicSpline>(params, values);
    ScalarCurve c;
    c.f_ = [sp](double u) { return sp->value(u); };
    c.df_ = [sp](double u) { return sp->d1(u); };
    c.ddf_ = [sp](double u) { return sp->d2(u); };
    c.lo_ = sp->lo();
    c.hi_ = sp->hi();
    return c;
}

void ScalarCurve::check_consistency() const {
    probe_consistency(f_, df_, lo_, hi_);
    probe_consistency(df_, ddf_, lo_, hi_);
}

SpaceCurve SpaceCurve::analytic(std::function<Vec3(double)> f, std::function<Vec3(double)> df,
                                std::function<Vec3(double)> ddf, double lo, double hi) {
    SpaceCurve c;
    c.f_ = std::move(f);
    c.df_ = std::move(df);
    c.ddf_ = std::move(ddf);
    c.lo_ = lo;
    c.hi_ = hi;
    c.check_consistency();
    return c;
}

SpaceCurve SpaceCurve::spline(const std::vector<double>& params, const std::vector<Vec3>& points) {
    if (points.size() != params.size())
        throw PreconditionError("SpaceCurve::spline: size mismatch");
    std::vector<double> xs(points.size()), ys(points.size()), zs(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        xs[i] = points[i].x;
        ys[i] = points[i].y;
        zs[i] = points[i].z;
    }
    auto sx = std::make_shared<CubicSpline>(params, xs);
    auto sy = std::make_shared<CubicSpline>(params, ys);
    auto sz = std::make_shared<CubicSpline>(params, zs);
    SpaceCurve c;
    c.f_ = [sx, sy, sz](double u) { return Vec3{sx->value(u), sy->value(u), sz->value(u)}; };
    c.df_ = [sx, sy, sz](double u) { return Vec3{sx->d1(u), sy->d1(u), sz->d1(u)}; };
    c.ddf_ = [sx, sy, sz](double u) { return Vec3{sx->d2(u), sy->d2(u), sz->d2(u)}; };
    c.lo_ = params.front();
    c.hi_ = params.back();
    return c;
}

void SpaceCurve::check_consistency() const {
    auto comp = [this](int c) {
        return std::pair{
            std::function<double(double)>([this, c](double u) {
                const Vec3 v = f_(u);
                return c == 0 ? v.x : c == 1 ? v.y : v.z;
            }),
            std::function<double(double)>([this, c](double u) {
                const Vec3 v = df_(u);
                return c == 0 ? v.x : c == 1 ? v.y : v.z;
            })};
    };
    for (int c = 0; c < 3; ++c) {
        auto [f, df] = comp(c);
        probe_consistency(f, df, lo_, hi_);
    }
}

SurfacePatch::SurfacePatch(SpaceCurve a_, SpaceCurve b_, ScalarCurve sigma_, Domain2 dom)
    : a(std::move(a_)), b(std::move(b_)), sigma(std::move(sigma_)), domain(dom) {
    double min_angle = 1.0;
    for (int i = 0; i < 33; ++i) {
        const double u = domain.u0 + (domain.u1 - domain.u0) * i / 32.0;
        if (!(sigma.value(u) > 0.0))
            throw PreconditionError("SurfacePatch: sigma must be positive on the domain");
        for (int j = 0; j < 33; ++j) {
            const double v = domain.v0 + (domain.v1 - domain.v0) * j / 32.0;
            const Vec3 fu = a.d1(u) + sigma.d1(u) * b.value(v);
            const Vec3 fv = sigma.value(u) * b.d1(v);
            min_angle = std::min(min_angle, sin_angle(fu, fv));
        }
    }
    regularity_residual = min_angle;
    if (min_angle <= 1e-10)
        throw PreconditionError("SurfacePatch: f*_u parallel to f*_v on the validation grid");
}

SurfaceEvalFn graph_surface(std::function<double(double, double)> z,
                            std::function<double(double, double)> zx,
                            std::function<double(double, double)> zy,
                            std::function<double(double, double)> zxx,
                            std::function<double(double, double)> zxy,
                            std::function<double(double, double)> zyy) {
    return [=](double u, double v) {
        SurfaceJet j;
        j.f = {u, v, z(u, v)};
        j.fu = {1.0, 0.0, zx(u, v)};
        j.fv = {0.0, 1.0, zy(u, v)};
        j.fuu = {0.0, 0.0, zxx(u, v)};
        j.fuv = {0.0, 0.0, zxy(u, v)};
        j.fvv = {0.0, 0.0, zyy(u, v)};
        return j;
    };
}

Vec3 eval_scale_translational(const SurfacePatch& s, double u, double v) {
    if (!s.domain.contains(u, v))
        throw OutOfDomainError("eval_scale_translational: (u, v) outside the domain");
    return s.a.value(u) + s.sigma.value(u) * s.b.value(v);
}

namespace {

Vec3 simpson_rec(const std::function<Vec3(double)>& f, double lo, double hi, const Vec3& flo,
                 const Vec3& fmid, const Vec3& fhi, const Vec3& whole, double tol, int depth) {
    const double mid = 0.5 * (lo + hi);
    const double lm = 0.5 * (lo + mid), rm = 0.5 * (mid + hi);
    const Vec3 flm = f(lm), frm = f(rm);
    const Vec3 left = (flo + 4.0 * flm + fmid) * ((mid - lo) / 6.0);
    const Vec3 right = (fmid + 4.0 * frm + fhi) * ((hi - mid) / 6.0);
    const Vec3 diff = left + right - whole;
    if (diff.norm() <= 15.0 * tol || (hi - lo) < 1e-14) return left + right + diff / 15.0;
    if (depth >= 40)
        throw QuadratureFailureError("adaptive_simpson: recursion depth exceeded");
    return simpson_rec(f, lo, mid, flo, flm, fmid, left, 0.5 * tol, depth + 1) +
           simpson_rec(f, mid, hi, fmid, frm, fhi, right, 0.5 * tol, depth + 1);
}

}  // namespace

Vec3 adaptive_simpson(const std::function<Vec3(double)>& f, double lo, double hi, double tol) {
    if (lo == hi) return {};
    const Vec3 flo = f(lo), fhi = f(hi), fmid = f(0.5 * (lo + hi));
    const Vec3 whole = (flo + 4.0 * fmid + fhi) * ((hi - lo) / 6.0);
    return simpson_rec(f, lo, hi, flo, fmid, fhi, whole, tol, 0);
}

Vec3 deform_scale_translational(const SurfacePatch& s, double u, double v, double t,
                                double quad_tol) {
    if (!s.domain.contains(u, v))
        throw OutOfDomainError("deform_scale_translational: (u, v) outside the domain");
    if (t < 0.0) throw PreconditionError("deform_scale_translational: t must be nonnegative");
    const auto integrand = [&](double w) {
        const double sg = s.sigma.value(w);
        return s.a.d1(w) * (sg / std::sqrt(t + sg * sg));
    };
    const Vec3 offset = adaptive_simpson(integrand, s.domain.u0, u, quad_tol);
    const double su = s.sigma.value(u);
    return s.a.value(s.domain.u0) + offset + std::sqrt(t + su * su) * s.b.value(v);
}

namespace {

SurfaceJet patch_jet(const SurfacePatch& s, double u, double v, double t, double quad_tol) {
    const double sg = s.sigma.value(u), sg1 = s.sigma.d1(u), sg2 = s.sigma.d2(u);
    const double root = std::sqrt(t + sg * sg);
    const double lambda = sg / root;                          // scales f*_u
    const double lambda1 = sg1 * t / (root * root * root);    // d(lambda)/du
    const Vec3 bv = s.b.value(v), bv1 = s.b.d1(v), bv2 = s.b.d2(v);
    const Vec3 au1 = s.a.d1(u), au2 = s.a.d2(u);

    SurfaceJet j;
    if (t == 0.0) {
        j.f = s.a.value(u) + sg * bv;
    } else {
        const auto integrand = [&](double w) {
            const double sw = s.sigma.value(w);
            return s.a.d1(w) * (sw / std::sqrt(t + sw * sw));
        };
        j.f = s.a.value(s.domain.u0) + adaptive_simpson(integrand, s.domain.u0, u, quad_tol) +
              root * bv;
    }
    const Vec3 base_fu = au1 + sg1 * bv;   // f*_u at t = 0
    const Vec3 base_fuu = au2 + sg2 * bv;
    j.fu = lambda * base_fu;
    j.fv = root * bv1;
    j.fuu = lambda1 * base_fu + lambda * base_fuu;
    j.fuv = lambda * sg1 * bv1;
    j.fvv = root * bv2;
    return j;
}

}  // namespace

SurfaceEvalFn scale_translational_eval(const SurfacePatch& s) {
    return [&s](double u, double v) { return patch_jet(s, u, v, 0.0, 1e-10); };
}

SurfaceEvalFn scale_translational_deformed_eval(const SurfacePatch& s, double t,
                                                double quad_tol) {
    return [&s, t, quad_tol](double u, double v) { return patch_jet(s, u, v, t, quad_tol); };
}

namespace {

Vec3 t_surface_point(const SurfacePatch& s, double u, double v, double t, double quad_tol,
                     double tol) {
    const Vec3 delta = s.a.d1(u) + s.sigma.d1(u) * s.b.value(v);
    const Vec3 bprime = s.b.d1(v);
    const double den = det3(kE3, delta, bprime);
    if (std::abs(den) <= tol * std::max(delta.norm() * bprime.norm(), 1e-30))
        throw DegenerateDeterminantError("T-surface: det(e3, a'+s'b, b') vanishes");
    Vec3 fstar;
    if (t == 0.0) {
        fstar = s.a.value(u) + s.sigma.value(u) * s.b.value(v);
    } else {
        fstar = deform_scale_translational(s, u, v, t, quad_tol);
    }
    return {-det3(kE1, delta, bprime) / den, -det3(kE2, delta, bprime) / den,
            -det3(fstar, delta, bprime) / den};
}

}  // namespace

Vec3 eval_T_surface(const SurfacePatch& s, double u, double v, double tol) {
    if (!s.domain.contains(u, v))
        throw OutOfDomainError("eval_T_surface: (u, v) outside the domain");
    return t_surface_point(s, u, v, 0.0, 1e-10, tol);
}

Vec3 deform_T_surface(const SurfacePatch& s, double u, double v, double t, double quad_tol,
                      double tol) {
    if (!s.domain.contains(u, v))
        throw OutOfDomainError("deform_T_surface: (u, v) outside the domain");
    if (t < 0.0) throw PreconditionError("deform_T_surface: t must be nonnegative");
    return t_surface_point(s, u, v, t, quad_tol, tol);
}

SurfaceEvalFn t_surface_eval(const SurfacePatch& s, double t, double quad_tol) {
    // Analytic first derivatives of the determinant-ratio formula; second
    // derivatives by central differences of the first.
    auto value_and_d1 = [&s, t, quad_tol](double u, double v, Vec3& f, Vec3& fu, Vec3& fv) {
        const Vec3 bv = s.b.value(v), bv1 = s.b.d1(v), bv2 = s.b.d2(v);
        const Vec3 delta = s.a.d1(u) + s.sigma.d1(u) * bv;
        const Vec3 delta_u = s.a.d2(u) + s.sigma.d2(u) * bv;
        const double den = det3(kE3, delta, bv1);
        if (std::abs(den) <= 1e-12 * std::max(delta.norm() * bv1.norm(), 1e-30))
            throw DegenerateDeterminantError("t_surface_eval: denominator vanishes");

        SurfaceJet base = patch_jet(s, u, v, t, quad_tol);
        const Vec3 fstar = base.f;

        const double n1 = det3(kE1, delta, bv1), n2 = det3(kE2, delta, bv1);
        const double np = det3(fstar, delta, bv1);
        f = {-n1 / den, -n2 / den, -np / den};

        // u-derivatives: only delta varies (and f* with derivative parallel to delta).
        const double n1u = det3(kE1, delta_u, bv1), n2u = det3(kE2, delta_u, bv1);
        const double n3u = det3(kE3, delta_u, bv1);
        const double npu = det3(fstar, delta_u, bv1) + det3(base.fu, delta, bv1);
        // v-derivatives: delta_v = sigma' b', parallel to b' in the pair slot.
        const Vec3 delta_v = s.sigma.d1(u) * bv1;
        const double n1v = det3(kE1, delta_v, bv1) + det3(kE1, delta, bv2);
        const double n2v = det3(kE2, delta_v, bv1) + det3(kE2, delta, bv2);
        const double n3v = det3(kE3, delta_v, bv1) + det3(kE3, delta, bv2);
        const double npv =
            det3(base.fv, delta, bv1) + det3(fstar, delta_v, bv1) + det3(fstar, delta, bv2);

        auto quot = [&](double n, double nu) { return -(nu * den - n * n3u) / (den * den); };
        fu = {quot(n1, n1u), quot(n2, n2u), quot(np, npu)};
        auto quotv = [&](double n, double nv) { return -(nv * den - n * n3v) / (den * den); };
        fv = {quotv(n1, n1v), quotv(n2, n2v), quotv(np, npv)};
    };

    return [&s, value_and_d1](double u, double v) {
        SurfaceJet j;
        Vec3 f, fu, fv;
        value_and_d1(u, v, f, fu, fv);
        j.f = f;
        j.fu = fu;
        j.fv = fv;
        // Stencils shift inward at the domain boundary so spline-backed curves
        // are never probed outside their sample range.
        const double hu = 1e-5 * std::max(s.domain.u1 - s.domain.u0, 1e-3);
        const double hv = 1e-5 * std::max(s.domain.v1 - s.domain.v0, 1e-3);
        const double up = std::min(u + hu, s.a.hi()), um = std::max(u - hu, s.a.lo());
        const double vp = std::min(v + hv, s.b.hi()), vm = std::max(v - hv, s.b.lo());
        Vec3 fp, fup, fvp, fm, fum, fvm;
        value_and_d1(up, v, fp, fup, fvp);
        value_and_d1(um, v, fm, fum, fvm);
        j.fuu = (fup - fum) / (up - um);
        const Vec3 fuv_a = (fvp - fvm) / (up - um);
        value_and_d1(u, vp, fp, fup, fvp);
        value_and_d1(u, vm, fm, fum, fvm);
        j.fvv = (fvp - fvm) / (vp - vm);
        const Vec3 fuv_b = (fup - fum) / (vp - vm);
        j.fuv = (fuv_a + fuv_b) * 0.5;
        return j;
    };
}

double iso_gauss_curvature(const SurfaceEvalFn& f, double u, double v) {
    const SurfaceJet j = f(u, v);
    const Vec2 tu = j.fu.xy(), tv = j.fv.xy();
    const double den = tu.dot(tu) * tv.dot(tv) - tu.dot(tv) * tu.dot(tv);
    const double scale = std::max(tu.norm() * tv.norm(), 1e-30);
    if (den <= 1e-12 * scale * scale)
        throw AdmissibilityFailureError("iso_gauss_curvature: degenerate top-view metric");
    const double duu = det3(j.fu, j.fv, j.fuu);
    const double dvv = det3(j.fu, j.fv, j.fvv);
    const double duv = det3(j.fu, j.fv, j.fuv);
    return (duu * dvv - duv * duv) / den;
}

Vec3 dual_of_surface_point(const SurfaceEvalFn& f, double u, double v, double tol) {
    const SurfaceJet j = f(u, v);
    const double den = det3(kE3, j.fu, j.fv);
    if (std::abs(den) <= tol * std::max(j.fu.norm() * j.fv.norm(), 1e-30))
        throw DegenerateDeterminantError("dual_of_surface_point: vertical tangent plane");
    return {-det3(kE1, j.fu, j.fv) / den, -det3(kE2, j.fu, j.fv) / den,
            -det3(j.f, j.fu, j.fv) / den};
}

SampleResult sample_to_quadnet(const std::function<Vec3(double, double)>& f, const Domain2& dom,
                               int mu, int nv) {
    if (mu < 2 || nv < 2)
        throw PreconditionError("sample_to_quadnet: grid must be at least 2x2");
    std::vector<Point3> pts;
    pts.reserve(static_cast<std::size_t>(mu + 1) * (nv + 1));
    for (int i = 0; i <= mu; ++i) {
        const double u = dom.u0 + (dom.u1 - dom.u0) * i / mu;
        for (int j = 0; j <= nv; ++j) {
            const double v = dom.v0 + (dom.v1 - dom.v0) * j / nv;
            pts.push_back(f(u, v));
        }
    }
    SampleResult out{QuadNet(mu, nv, std::move(pts)), 0.0};
    for (int k = 0; k < mu; ++k)
        for (int l = 0; l < nv; ++l) {
            const std::array<Point3, 4> q = out.net.face(k, l);
            const Vec3 c = (q[0] + q[1] + q[2] + q[3]) / 4.0;
            Vec3 nrm = (q[2] - q[0]).cross(q[3] - q[1]);
            const double nn = nrm.norm();
            if (nn == 0.0) continue;
            nrm = nrm / nn;
            for (const Point3& p : q)
                out.max_displacement = std::max(out.max_displacement, std::abs(nrm.dot(p - c)));
        }
    return out;
}

double integrate_gauss_curvature(const SurfaceEvalFn& f, const Domain2& dom, double tol) {
    auto integrand = [&](double u, double v) {
        const SurfaceJet j = f(u, v);
        const double jac = std::abs(det2(j.fu.xy(), j.fv.xy()));
        return iso_gauss_curvature(f, u, v) * jac;
    };
    auto composite = [&](int n) {
        // Tensor Simpson with n segments per axis (n even).
        double total = 0.0;
        for (int i = 0; i <= n; ++i) {
            const double wu = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            const double u = dom.u0 + (dom.u1 - dom.u0) * i / n;
            for (int j = 0; j <= n; ++j) {
                const double wv = (j == 0 || j == n) ? 1.0 : (j % 2 ? 4.0 : 2.0);
                const double v = dom.v0 + (dom.v1 - dom.v0) * j / n;
                total += wu * wv * integrand(u, v);
            }
        }
        return total * (dom.u1 - dom.u0) * (dom.v1 - dom.v0) / (9.0 * n * n);
    };
    double prev = composite(8);
    for (int n = 16; n <= 512; n *= 2) {
        const double cur = composite(n);
        if (std::abs(cur - prev) <= tol) return cur;
        prev = cur;
    }
    return prev;
}

}  // namespace isoflex
