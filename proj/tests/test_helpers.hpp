#pragma once

#include "isoflex/errors.hpp"
#include "isoflex/flexion.hpp"
#include "isoflex/quadnet.hpp"

#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace isoflex::testing {

// F_ij = (i, j, i^2 + j^2): dual-convex, Koenigs-dual, the workhorse net.
inline QuadNet paraboloid_net(int m, int n) {
    std::vector<Point3> pts;
    for (int i = 0; i <= m; ++i)
        for (int j = 0; j <= n; ++j)
            pts.push_back({double(i), double(j), double(i * i + j * j)});
    return QuadNet(m, n, std::move(pts));
}

// F_ij = (i, j, i mod 2 + j mod 2): flexible, classes (i) and (ii).
inline QuadNet egg_crate_net(int m, int n) {
    std::vector<Point3> pts;
    for (int i = 0; i <= m; ++i)
        for (int j = 0; j <= n; ++j)
            pts.push_back({double(i), double(j), double(i % 2 + j % 2)});
    return QuadNet(m, n, std::move(pts));
}

// Random planar-faced dual-convex net near the paraboloid: perturb the top
// views and the first row/column heights, then complete each remaining vertex
// into the plane of its three predecessors. Generic: not Koenigs-dual, not
// class (i)/(ii).
inline QuadNet random_perturbed_net(int m, int n, std::mt19937& rng, double amplitude = 0.05,
                                    bool keep_top_views = false) {
    std::uniform_real_distribution<double> noise(-amplitude, amplitude);
    const double top = keep_top_views ? 0.0 : 0.3;
    for (int attempt = 0; attempt < 200; ++attempt) {
        Grid<Vec3> v(m + 1, n + 1);
        for (int i = 0; i <= m; ++i)
            for (int j = 0; j <= n; ++j)
                v.at(i, j) = {i + top * noise(rng), j + top * noise(rng),
                              double(i * i + j * j)};
        for (int i = 0; i <= m; ++i) v.at(i, 0).z += noise(rng);
        for (int j = 1; j <= n; ++j) v.at(0, j).z += noise(rng);
        for (int i = 1; i <= m; ++i)
            for (int j = 1; j <= n; ++j) {
                const NonIsotropicPlane pl =
                    plane_through(v.at(i - 1, j - 1), v.at(i, j - 1), v.at(i - 1, j));
                v.at(i, j).z = pl.height_at(v.at(i, j).x, v.at(i, j).y);
            }
        std::vector<Point3> pts(v.flat().begin(), v.flat().end());
        QuadNet net(m, n, std::move(pts));
        const ValidationReport rep = validate(net);
        if (rep.valid() && rep.dual_convex) return net;
    }
    return paraboloid_net(m, n);
}

// Random cone-cylinder data near the standard paraboloid configuration;
// its generalized T-net is exactly flexible by construction. Resamples (and
// shrinks the noise if needed) until both generated nets validate.
inline ConeCylinderData random_t_data(int m, int n, std::mt19937& rng, double amplitude = 0.15) {
    for (int attempt = 0; attempt < 400; ++attempt) {
        const double amp = amplitude * (attempt < 200 ? 1.0 : 0.25);
        std::uniform_real_distribution<double> noise(-amp, amp);
        ConeCylinderData d;
        for (int i = 0; i <= m + 1; ++i) {
            d.a.push_back({double(i) + noise(rng), noise(rng), double(i * i) + noise(rng)});
            d.sigma.push_back(1.0 + 0.5 * noise(rng));
        }
        for (int j = 0; j <= n + 1; ++j)
            d.b.push_back({noise(rng), double(j) + noise(rng), double(j * j) + noise(rng)});
        try {
            const ValidationReport cc = validate(gen_cone_cylinder(d));
            const ValidationReport tn = validate(gen_generalized_T(d));
            if (cc.valid() && cc.dual_convex && tn.valid() && tn.dual_convex) return d;
        } catch (const Error&) {
        }
    }
    // Exact paraboloid data as the always-valid fallback.
    ConeCylinderData d;
    for (int i = 0; i <= m + 1; ++i) {
        d.a.push_back({double(i), 0.0, double(i * i)});
        d.sigma.push_back(1.0);
    }
    for (int j = 0; j <= n + 1; ++j) d.b.push_back({0.0, double(j), double(j * j)});
    return d;
}

inline double max_vertex_distance(const QuadNet& a, const QuadNet& b) {
    double d = 0.0;
    for (int i = 0; i <= a.m(); ++i)
        for (int j = 0; j <= a.n(); ++j) d = std::max(d, (a.at(i, j) - b.at(i, j)).norm());
    return d;
}

}  // namespace isoflex::testing
