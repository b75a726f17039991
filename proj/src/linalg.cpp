#include "isoflex/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace isoflex {

Matrix Matrix::transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
}

namespace {

// One-sided Jacobi on the columns of `w` (rows >= cols assumed by the caller).
// On exit w = U * diag(sigma) and `v` accumulates the right rotations.
void jacobi_sweeps(Matrix& w, Matrix& v, std::vector<double>& sigma) {
    const std::size_t m = w.rows(), n = w.cols();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) v(i, j) = (i == j) ? 1.0 : 0.0;

    const double eps = 1e-15;
    const int max_sweeps = 60;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        bool converged = true;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double alpha = 0.0, beta = 0.0, gamma = 0.0;
                for (std::size_t r = 0; r < m; ++r) {
                    alpha += w(r, p) * w(r, p);
                    beta += w(r, q) * w(r, q);
                    gamma += w(r, p) * w(r, q);
                }
                if (std::abs(gamma) <= eps * std::sqrt(alpha * beta) || gamma == 0.0) continue;
                converged = false;
                double zeta = (beta - alpha) / (2.0 * gamma);
                double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                           (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                double c = 1.0 / std::sqrt(1.0 + t * t);
                double s = c * t;
                for (std::size_t r = 0; r < m; ++r) {
                    double wp = w(r, p), wq = w(r, q);
                    w(r, p) = c * wp - s * wq;
                    w(r, q) = s * wp + c * wq;
                }
                for (std::size_t r = 0; r < n; ++r) {
                    double vp = v(r, p), vq = v(r, q);
                    v(r, p) = c * vp - s * vq;
                    v(r, q) = s * vp + c * vq;
                }
            }
        }
        if (converged) break;
    }

    sigma.assign(n, 0.0);
    for (std::size_t c = 0; c < n; ++c) {
        double norm = 0.0;
        for (std::size_t r = 0; r < m; ++r) norm += w(r, c) * w(r, c);
        norm = std::sqrt(norm);
        sigma[c] = norm;
        if (norm > 0.0)
            for (std::size_t r = 0; r < m; ++r) w(r, c) /= norm;
    }
}

}  // namespace

SvdResult svd(const Matrix& a) {
    const bool tall = a.rows() >= a.cols();
    Matrix w = tall ? a : a.transposed();
    const std::size_t n = w.cols();
    Matrix v(n, n);
    std::vector<double> sigma;
    jacobi_sweeps(w, v, sigma);

    // Sort singular values descending, permuting the factors accordingly.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return sigma[i] > sigma[j]; });

    Matrix u_sorted(w.rows(), n), v_sorted(n, n);
    std::vector<double> s_sorted(n);
    for (std::size_t c = 0; c < n; ++c) {
        s_sorted[c] = sigma[order[c]];
        for (std::size_t r = 0; r < w.rows(); ++r) u_sorted(r, c) = w(r, order[c]);
        for (std::size_t r = 0; r < n; ++r) v_sorted(r, c) = v(r, order[c]);
    }

    SvdResult res;
    if (tall) {
        res.u = std::move(u_sorted);
        res.v = std::move(v_sorted);
    } else {
        res.u = std::move(v_sorted);
        res.v = std::move(u_sorted);
    }
    res.sigma = std::move(s_sorted);
    return res;
}

std::vector<double> solve_least_squares(const Matrix& a, const std::vector<double>& b,
                                        double rel_tol) {
    SvdResult s = svd(a);
    const std::size_t k = s.sigma.size();
    const double smax = k ? s.sigma[0] : 0.0;
    std::vector<double> x(a.cols(), 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        if (s.sigma[i] <= rel_tol * smax || s.sigma[i] == 0.0) continue;
        double coeff = 0.0;
        for (std::size_t r = 0; r < a.rows(); ++r) coeff += s.u(r, i) * b[r];
        coeff /= s.sigma[i];
        for (std::size_t c = 0; c < a.cols(); ++c) x[c] += coeff * s.v(c, i);
    }
    return x;
}

Matrix nullspace(const Matrix& a, double rel_tol, std::vector<double>* singular_values) {
    // Pad with zero rows when under-determined so every column gets a singular value.
    Matrix work = a;
    if (a.rows() < a.cols()) {
        work = Matrix(a.cols(), a.cols());
        for (std::size_t r = 0; r < a.rows(); ++r)
            for (std::size_t c = 0; c < a.cols(); ++c) work(r, c) = a(r, c);
    }
    SvdResult s = svd(work);
    if (singular_values) *singular_values = s.sigma;
    const double smax = s.sigma.empty() ? 0.0 : s.sigma[0];
    std::size_t rank = 0;
    for (double sv : s.sigma)
        if (sv > rel_tol * smax && sv > 0.0) ++rank;
    const std::size_t dim = a.cols() - rank;
    Matrix basis(a.cols(), dim);
    for (std::size_t j = 0; j < dim; ++j)
        for (std::size_t r = 0; r < a.cols(); ++r) basis(r, j) = s.v(r, rank + j);
    return basis;
}

std::size_t numeric_rank(const Matrix& a, double rel_tol) {
    SvdResult s = svd(a);
    const double smax = s.sigma.empty() ? 0.0 : s.sigma[0];
    std::size_t rank = 0;
    for (double sv : s.sigma)
        if (sv > rel_tol * smax && sv > 0.0) ++rank;
    return rank;
}

bool solve3(const double m[3][3], const double rhs[3], double out[3]) {
    double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                 m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                 m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    double scale = 0.0;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) scale = std::max(scale, std::abs(m[r][c]));
    if (std::abs(det) <= 1e-14 * scale * scale * scale || det == 0.0) return false;

    auto cram = [&](int col) {
        double t[3][3];
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) t[r][c] = (c == col) ? rhs[r] : m[r][c];
        return t[0][0] * (t[1][1] * t[2][2] - t[1][2] * t[2][1]) -
               t[0][1] * (t[1][0] * t[2][2] - t[1][2] * t[2][0]) +
               t[0][2] * (t[1][0] * t[2][1] - t[1][1] * t[2][0]);
    };
    out[0] = cram(0) / det;
    out[1] = cram(1) / det;
    out[2] = cram(2) / det;
    return true;
}

}  // namespace isoflex
