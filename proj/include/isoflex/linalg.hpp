#pragma once

#include <vector>
#include <cstddef>

namespace isoflex {

// Row-major dense matrix of doubles, sized at construction.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    Matrix transposed() const;

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

struct SvdResult {
    // A = U * diag(sigma) * V^T, thin decomposition with sigma sorted descending.
    Matrix u;                    // rows(A) x k
    std::vector<double> sigma;   // k = min(rows, cols)
    Matrix v;                    // cols(A) x k
};

// One-sided Jacobi SVD. Intended for the small dense systems this library
// assembles (constraint matrices up to a few hundred rows/columns).
SvdResult svd(const Matrix& a);

// Minimum-norm least-squares solution of A x = b via the SVD, with singular
// values below rel_tol * sigma_max treated as zero.
std::vector<double> solve_least_squares(const Matrix& a, const std::vector<double>& b,
                                        double rel_tol = 1e-12);

// Orthonormal basis of the (numerical) nullspace of A; columns of the result.
// A singular value counts as zero when <= rel_tol * sigma_max.
Matrix nullspace(const Matrix& a, double rel_tol, std::vector<double>* singular_values = nullptr);

// Rank with the same thresholding convention.
std::size_t numeric_rank(const Matrix& a, double rel_tol);

// Solve a 3x3 linear system; returns false when the matrix is singular
// relative to its scale.
bool solve3(const double m[3][3], const double rhs[3], double out[3]);

}  // namespace isoflex
