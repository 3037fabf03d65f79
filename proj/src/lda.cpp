#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "coughgate/error.hpp"
#include "internal/dense.hpp"
#include "internal/train.hpp"

namespace coughgate::internal {

namespace {

std::vector<double> class_mean(const std::vector<std::vector<double>>& x,
                               const std::vector<Label>& y, Label which) {
    const std::size_t m = x.front().size();
    std::vector<double> mean(m, 0.0);
    std::size_t n = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (y[i] != which) continue;
        ++n;
        for (std::size_t j = 0; j < m; ++j) mean[j] += x[i][j];
    }
    for (double& v : mean) v /= static_cast<double>(n);
    return mean;
}

/// Accumulates sum (x_i - mean)(x_i - mean)^T over rows of one class.
void accumulate_scatter(Dense& s, const std::vector<std::vector<double>>& x,
                        const std::vector<Label>& y, Label which,
                        const std::vector<double>& mean) {
    const std::size_t m = mean.size();
    std::vector<double> d(m);
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (y[i] != which) continue;
        for (std::size_t j = 0; j < m; ++j) d[j] = x[i][j] - mean[j];
        for (std::size_t r = 0; r < m; ++r)
            for (std::size_t col = 0; col <= r; ++col) s(r, col) += d[r] * d[col];
    }
}

void mirror_lower(Dense& s) {
    for (std::size_t r = 0; r < s.rows; ++r)
        for (std::size_t col = r + 1; col < s.cols; ++col) s(r, col) = s(col, r);
}

/// Shrinks toward the diagonal, then factors; one round of trace-scaled
/// jitter is allowed before giving up.
Dense regularize_and_factor(Dense sigma, double gamma) {
    const std::size_t m = sigma.rows;
    for (std::size_t r = 0; r < m; ++r)
        for (std::size_t col = 0; col < m; ++col)
            if (r != col) sigma(r, col) *= 1.0 - gamma;

    if (auto l = cholesky(sigma)) return *std::move(l);

    double trace = 0.0;
    for (std::size_t r = 0; r < m; ++r) trace += sigma(r, r);
    const double jitter = 1e-8 * trace / static_cast<double>(m);
    for (std::size_t r = 0; r < m; ++r) sigma(r, r) += jitter;
    if (auto l = cholesky(sigma)) return *std::move(l);
    throw NumericError("class covariance is not positive definite even after jitter");
}

} // namespace

LdaState train_lda(const ClassifierSpec& spec, const std::vector<std::vector<double>>& x,
                   const std::vector<Label>& y) {
    const std::size_t n = x.size();
    const std::size_t m = x.front().size();
    const auto n_covid = static_cast<std::size_t>(std::count(y.begin(), y.end(), Label::Covid));
    const std::size_t n_non = n - n_covid;
    const double gamma = spec.hyperparameter;

    LdaState state;
    state.mean_covid = class_mean(x, y, Label::Covid);
    state.mean_non_covid = class_mean(x, y, Label::NonCovid);
    state.log_prior_covid = std::log(static_cast<double>(n_covid) / static_cast<double>(n));
    state.log_prior_non_covid = std::log(static_cast<double>(n_non) / static_cast<double>(n));

    Dense l_covid, l_non;
    if (spec.family == Family::LinearLda) {
        Dense pooled(m, m);
        accumulate_scatter(pooled, x, y, Label::Covid, state.mean_covid);
        accumulate_scatter(pooled, x, y, Label::NonCovid, state.mean_non_covid);
        for (double& v : pooled.a) v /= static_cast<double>(n - 2);
        mirror_lower(pooled);
        l_covid = regularize_and_factor(pooled, gamma);
        l_non = l_covid;
    } else {
        Dense s_covid(m, m), s_non(m, m);
        accumulate_scatter(s_covid, x, y, Label::Covid, state.mean_covid);
        accumulate_scatter(s_non, x, y, Label::NonCovid, state.mean_non_covid);
        for (double& v : s_covid.a) v /= static_cast<double>(n_covid - 1);
        for (double& v : s_non.a) v /= static_cast<double>(n_non - 1);
        mirror_lower(s_covid);
        mirror_lower(s_non);
        l_covid = regularize_and_factor(std::move(s_covid), gamma);
        l_non = regularize_and_factor(std::move(s_non), gamma);
    }

    state.log_det_covid = log_det_from_cholesky(l_covid);
    state.log_det_non_covid = log_det_from_cholesky(l_non);
    state.chol_covid = std::move(l_covid.a);
    state.chol_non_covid = std::move(l_non.a);
    return state;
}

double lda_decision(const LdaState& state, std::span<const double> x) {
    const std::size_t m = state.mean_covid.size();
    Dense l_covid, l_non;
    l_covid.rows = l_covid.cols = l_non.rows = l_non.cols = m;
    l_covid.a = state.chol_covid;
    l_non.a = state.chol_non_covid;

    const double half_log_2pi = 0.5 * static_cast<double>(m) * std::log(2.0 * std::numbers::pi);
    std::vector<double> d(m);

    for (std::size_t j = 0; j < m; ++j) d[j] = x[j] - state.mean_covid[j];
    const double disc_covid = -0.5 * quad_form_inv(l_covid, d) - 0.5 * state.log_det_covid -
                              half_log_2pi + state.log_prior_covid;

    for (std::size_t j = 0; j < m; ++j) d[j] = x[j] - state.mean_non_covid[j];
    const double disc_non = -0.5 * quad_form_inv(l_non, d) - 0.5 * state.log_det_non_covid -
                            half_log_2pi + state.log_prior_non_covid;

    return disc_covid - disc_non;
}

} // namespace coughgate::internal
