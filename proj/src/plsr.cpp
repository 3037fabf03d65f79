#include <algorithm>
#include <cmath>
#include <vector>

#include "coughgate/error.hpp"
#include "internal/dense.hpp"
#include "internal/train.hpp"

namespace coughgate::internal {

/// NIPALS PLS1 on mean-centered X and a {0,1} response. The component count
/// is capped at min(requested, M, n-1); deflation may stop earlier still when
/// X runs out of variance, so the fitted count can be lower than requested.
PlsrState train_plsr(const ClassifierSpec& spec, const std::vector<std::vector<double>>& x,
                     const std::vector<Label>& y) {
    const std::size_t n = x.size();
    const std::size_t m = x.front().size();
    const auto requested = static_cast<std::size_t>(spec.hyperparameter);
    const std::size_t max_components = std::min({requested, m, n - 1});

    std::vector<double> x_mean(m, 0.0);
    for (const auto& row : x)
        for (std::size_t j = 0; j < m; ++j) x_mean[j] += row[j];
    for (double& v : x_mean) v /= static_cast<double>(n);

    double y_mean = 0.0;
    for (Label l : y) y_mean += l == Label::Covid ? 1.0 : 0.0;
    y_mean /= static_cast<double>(n);

    Dense xc(n, m);
    std::vector<double> yc(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) xc(i, j) = x[i][j] - x_mean[j];
        yc[i] = (y[i] == Label::Covid ? 1.0 : 0.0) - y_mean;
    }

    std::vector<std::vector<double>> weights, loadings; // columns w_a, p_a
    std::vector<double> q;                              // response loadings
    PlsrState state;

    for (std::size_t a = 0; a < max_components; ++a) {
        std::vector<double> w(m, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < m; ++j) w[j] += xc(i, j) * yc[i];
        double w_norm = 0.0;
        for (double v : w) w_norm += v * v;
        w_norm = std::sqrt(w_norm);
        if (w_norm < 1e-12) break; // X carries no further covariance with y
        for (double& v : w) v /= w_norm;

        std::vector<double> t(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) t[i] = dot(xc.row(i), w);
        const double tt = dot(t, t);
        if (tt < 1e-12) break;

        std::vector<double> p(m, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < m; ++j) p[j] += xc(i, j) * t[i];
        for (double& v : p) v /= tt;
        const double q_a = dot(yc, t) / tt;

        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < m; ++j) xc(i, j) -= t[i] * p[j];
            yc[i] -= q_a * t[i];
        }

        weights.push_back(std::move(w));
        loadings.push_back(std::move(p));
        q.push_back(q_a);
        state.scores.push_back(std::move(t));
    }
    if (weights.empty()) throw TrainingError("PLSR found no usable component");

    // B = W (P^T W)^{-1} q maps raw centered X to the response.
    const std::size_t a_count = weights.size();
    Dense ptw(a_count, a_count);
    for (std::size_t r = 0; r < a_count; ++r)
        for (std::size_t col = 0; col < a_count; ++col) ptw(r, col) = dot(loadings[r], weights[col]);
    const auto z = solve_linear(std::move(ptw), q);

    state.coefficients.assign(m, 0.0);
    for (std::size_t a = 0; a < a_count; ++a)
        for (std::size_t j = 0; j < m; ++j) state.coefficients[j] += weights[a][j] * z[a];
    state.intercept = y_mean - dot(x_mean, state.coefficients);
    return state;
}

double plsr_output(const PlsrState& state, std::span<const double> x) {
    return state.intercept + dot(x, state.coefficients);
}

} // namespace coughgate::internal
