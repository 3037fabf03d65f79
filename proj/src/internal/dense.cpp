#include "internal/dense.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace coughgate::internal {

std::optional<Dense> cholesky(const Dense& a) {
    const std::size_t n = a.rows;
    Dense l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (!(d > 0.0) || !std::isfinite(d)) return std::nullopt;
        const double ljj = std::sqrt(d);
        l(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / ljj;
        }
    }
    return l;
}

std::vector<double> forward_solve(const Dense& l, std::span<const double> b) {
    const std::size_t n = l.rows;
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * y[k];
        y[i] = s / l(i, i);
    }
    return y;
}

std::vector<double> backward_solve_transposed(const Dense& l, std::span<const double> y) {
    const std::size_t n = l.rows;
    std::vector<double> x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = y[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= l(k, ii) * x[k];
        x[ii] = s / l(ii, ii);
    }
    return x;
}

double log_det_from_cholesky(const Dense& l) {
    double s = 0.0;
    for (std::size_t i = 0; i < l.rows; ++i) s += std::log(l(i, i));
    return 2.0 * s;
}

double quad_form_inv(const Dense& l, std::span<const double> v) {
    const std::vector<double> y = forward_solve(l, v);
    double s = 0.0;
    for (double yi : y) s += yi * yi;
    return s;
}

std::vector<double> solve_linear(Dense a, std::vector<double> b) {
    const std::size_t n = a.rows;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
        if (a(piv, col) == 0.0)
            throw std::runtime_error("solve_linear: singular system");
        if (piv != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(a(piv, c), a(col, c));
            std::swap(b[piv], b[col]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a(r, col) / a(col, col);
            if (f == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) a(r, c) -= f * a(col, c);
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t c = ii + 1; c < n; ++c) s -= a(ii, c) * x[c];
        x[ii] = s / a(ii, ii);
    }
    return x;
}

double dot(std::span<const double> x, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

} // namespace coughgate::internal
