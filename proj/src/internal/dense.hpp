#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace coughgate::internal {

/// Minimal row-major dense matrix. Big enough for the covariance and
/// PLS work in this project (dimensions stay well under 100).
struct Dense {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> a;

    Dense() = default;
    Dense(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

    double& operator()(std::size_t r, std::size_t c) { return a[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return a[r * cols + c]; }

    std::span<double> row(std::size_t r) { return {a.data() + r * cols, cols}; }
    std::span<const double> row(std::size_t r) const { return {a.data() + r * cols, cols}; }
};

/// Cholesky factorization A = L L^T for symmetric positive definite A.
/// Returns the lower factor, or nullopt if a pivot is not strictly positive.
std::optional<Dense> cholesky(const Dense& a);

/// Solves L y = b with L lower triangular.
std::vector<double> forward_solve(const Dense& l, std::span<const double> b);

/// Solves L^T x = y with L lower triangular.
std::vector<double> backward_solve_transposed(const Dense& l, std::span<const double> y);

/// log(det A) for A = L L^T, computed from the factor.
double log_det_from_cholesky(const Dense& l);

/// Squared Mahalanobis-style quadratic form v^T A^{-1} v via the factor of A.
double quad_form_inv(const Dense& l, std::span<const double> v);

/// Solves the square system A x = b by Gaussian elimination with partial
/// pivoting. Used for the small (P^T W) systems in PLS.
std::vector<double> solve_linear(Dense a, std::vector<double> b);

double dot(std::span<const double> x, std::span<const double> y);

} // namespace coughgate::internal
