#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "coughgate/error.hpp"
#include "internal/train.hpp"

namespace coughgate::internal {

namespace {

constexpr double kTolerance = 1e-3;
constexpr long kMaxIterations = 1'000'000;

} // namespace

/// Sequential minimal optimization on the soft-margin dual, selecting the
/// maximal violating pair each step. Converges when the pair gap drops to
/// kTolerance, which bounds every KKT residual by the same tolerance once
/// the bias is centered between the two extremes.
SvmState train_svm(const ClassifierSpec& spec, const std::vector<std::vector<double>>& x,
                   const std::vector<Label>& y) {
    const std::size_t n = x.size();
    const double c = spec.svm_cost;

    std::vector<double> sign(n);
    for (std::size_t i = 0; i < n; ++i) sign[i] = y[i] == Label::Covid ? 1.0 : -1.0;

    // Eager kernel matrix: n stays small (hundreds), so n^2 doubles beat
    // recomputing kernels inside the optimization loop.
    std::vector<double> q(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            const double k = kernel_eval(spec.family, spec.hyperparameter, x[i], x[j]);
            q[i * n + j] = sign[i] * sign[j] * k;
            q[j * n + i] = q[i * n + j];
        }
    }

    std::vector<double> alpha(n, 0.0);
    std::vector<double> grad(n, -1.0); // gradient of 1/2 a^T Q a - sum(a) at a = 0

    long iterations = 0;
    double m_up = 0.0, m_low = 0.0;
    while (true) {
        // Maximal violating pair over the feasible ascent/descent sets.
        std::size_t i_up = n, i_low = n;
        m_up = -std::numeric_limits<double>::infinity();
        m_low = std::numeric_limits<double>::infinity();
        for (std::size_t t = 0; t < n; ++t) {
            const double v = -sign[t] * grad[t];
            const bool in_up = (sign[t] > 0 && alpha[t] < c) || (sign[t] < 0 && alpha[t] > 0);
            const bool in_low = (sign[t] > 0 && alpha[t] > 0) || (sign[t] < 0 && alpha[t] < c);
            if (in_up && v > m_up) {
                m_up = v;
                i_up = t;
            }
            if (in_low && v < m_low) {
                m_low = v;
                i_low = t;
            }
        }
        if (i_up == n || i_low == n || m_up - m_low <= kTolerance) break;
        if (++iterations > kMaxIterations) break;

        const std::size_t i = i_up, j = i_low;
        const double s = sign[i] * sign[j];
        double h = q[i * n + i] + q[j * n + j] - 2.0 * s * q[i * n + j];
        if (h <= 0.0) h = 1e-12;
        // Directional derivative along (d_i, d_j = -s d_i).
        const double g = grad[i] - s * grad[j];
        const double ai_old = alpha[i], aj_old = alpha[j];
        double ai = ai_old - g / h;
        double aj;

        // Box-clip while holding sign[i] a_i + sign[j] a_j fixed. A clipped
        // coordinate is assigned its bound value exactly: incremental updates
        // leave sub-ulp residue at the bounds, and a phantom-free multiplier
        // lets the same blocked pair win the selection forever.
        if (s > 0) {
            const double gamma = ai_old + aj_old;
            const double hi = std::min(c, gamma);
            const double lo = std::max(0.0, gamma - c);
            if (ai >= hi) {
                ai = hi;
                aj = gamma <= c ? 0.0 : gamma - c;
            } else if (ai <= lo) {
                ai = lo;
                aj = gamma <= c ? gamma : c;
            } else {
                aj = gamma - ai;
            }
        } else {
            const double gamma = ai_old - aj_old;
            const double hi = std::min(c, c + gamma);
            const double lo = std::max(0.0, gamma);
            if (ai >= hi) {
                ai = hi;
                aj = gamma >= 0 ? c - gamma : c;
            } else if (ai <= lo) {
                ai = lo;
                aj = gamma >= 0 ? 0.0 : -gamma;
            } else {
                aj = ai - gamma;
            }
        }
        const double di = ai - ai_old;
        const double dj = aj - aj_old;
        if (di == 0.0 && dj == 0.0) break; // step rounded to a no-op, state cannot move
        alpha[i] = ai;
        alpha[j] = aj;
        for (std::size_t t = 0; t < n; ++t) grad[t] += q[t * n + i] * di + q[t * n + j] * dj;
    }

    SvmState state;
    state.bias = (m_up + m_low) / 2.0;
    state.iterations = static_cast<int>(iterations);
    double obj = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        obj += alpha[i] * (1.0 - grad[i]) / 2.0;
        if (alpha[i] > 0.0) {
            state.support_vectors.push_back(x[i]);
            state.dual_coeffs.push_back(alpha[i] * sign[i]);
        }
    }
    state.dual_objective = obj;
    if (state.support_vectors.empty())
        throw TrainingError("SVM optimizer made no progress");
    return state;
}

double svm_decision(const SvmState& state, Family family, double hyperparameter,
                    std::span<const double> x) {
    double f = state.bias;
    for (std::size_t i = 0; i < state.support_vectors.size(); ++i)
        f += state.dual_coeffs[i] * kernel_eval(family, hyperparameter, state.support_vectors[i], x);
    return f;
}

} // namespace coughgate::internal
