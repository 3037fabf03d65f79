#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <doctest.h>

#include "coughgate/classifiers.hpp"
#include "coughgate/error.hpp"
#include "internal/rng.hpp"
#include "oracles.hpp"

using namespace coughgate;

namespace {

ClassifierSpec spec_of(Family family, double hyper, double cost = 1.0, bool standardize = false) {
    ClassifierSpec spec;
    spec.family = family;
    spec.hyperparameter = hyper;
    spec.svm_cost = cost;
    spec.standardize = standardize;
    return spec;
}

std::vector<Label> labels_from(const std::vector<int>& bits) {
    std::vector<Label> out;
    for (int b : bits) out.push_back(b ? Label::Covid : Label::NonCovid);
    return out;
}

} // namespace

TEST_CASE("family tokens round-trip") {
    for (Family f : table3_family_order()) {
        CHECK(family_from_token(to_token(f)) == f);
        CHECK(display_name(f) != nullptr);
    }
    CHECK_THROWS_AS(family_from_token("svm"), ValidationError);
    CHECK(table3_family_order().size() == 7);
    CHECK(table2_family_order().size() == 7);
}

TEST_CASE("spec validation enforces the documented ranges") {
    CHECK_NOTHROW(spec_of(Family::PolySvm, 3).validate());
    CHECK_THROWS_AS(spec_of(Family::PolySvm, 0).validate(), ConfigError);
    CHECK_THROWS_AS(spec_of(Family::PolySvm, 5).validate(), ConfigError);
    CHECK_THROWS_AS(spec_of(Family::PolySvm, 2.5).validate(), ConfigError);
    CHECK_THROWS_AS(spec_of(Family::PolySvm, 2, 0.0).validate(), ConfigError);
    CHECK_THROWS_AS(spec_of(Family::RbfSvm, 0.0).validate(), ConfigError);
    CHECK_THROWS_AS(spec_of(Family::RbfSvm, -1.0).validate(), ConfigError);
    CHECK_NOTHROW(spec_of(Family::LinearLda, 0.0).validate());
    CHECK_NOTHROW(spec_of(Family::LinearLda, 1.0).validate());
    CHECK_THROWS_AS(spec_of(Family::LinearLda, 1.1).validate(), ConfigError);
    CHECK_THROWS_AS(spec_of(Family::QuadraticLda, -0.1).validate(), ConfigError);
    CHECK_THROWS_AS(spec_of(Family::KnnEuclidean, 0).validate(), ConfigError);
    CHECK_THROWS_AS(spec_of(Family::KnnEuclidean, 2.5).validate(), ConfigError);
    CHECK_THROWS_AS(spec_of(Family::Plsr, 0).validate(), ConfigError);
    CHECK_NOTHROW(spec_of(Family::Plsr, 4).validate());
}

TEST_CASE("kernel fixtures") {
    const std::vector<double> e1 = {1.0, 0.0};
    const std::vector<double> e2 = {0.0, 1.0};
    const std::vector<double> origin = {0.0, 0.0};
    CHECK(kernel_eval(Family::PolySvm, 2, e1, e1) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(kernel_eval(Family::PolySvm, 1, e1, e2) == doctest::Approx(1.0).epsilon(1e-15));

    // |x - y| = 1 at sigma 1.3.
    CHECK(kernel_eval(Family::RbfSvm, 1.3, e1, origin) ==
          doctest::Approx(0.7438930621376464).epsilon(1e-12));
    CHECK(kernel_eval(Family::RbfSvm, 2.0, e1, e1) == 1.0);

    CHECK_THROWS_AS(kernel_eval(Family::RbfSvm, 0.0, e1, e1), ConfigError);
    CHECK_THROWS_AS(kernel_eval(Family::LinearLda, 1.0, e1, e1), ConfigError);
}

TEST_CASE("distance fixtures") {
    const std::vector<double> a = {0.0, 0.0}, b = {3.0, 4.0};
    CHECK(euclidean_distance(a, b) == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(chebyshev_distance(a, b) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(chebyshev_distance(a, a) == 0.0);
}

TEST_CASE("two-point SVM recovers the midpoint separator") {
    const std::vector<std::vector<double>> X = {{-1.0}, {1.0}};
    const auto model = train_model(spec_of(Family::PolySvm, 1), X, labels_from({0, 1}));

    const auto& state = std::get<SvmState>(model.state);
    CHECK(state.dual_objective == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(std::fabs(predict(model, std::vector<double>{0.0}).score) < 1e-6);
    CHECK(predict(model, std::vector<double>{0.5}).label == Label::Covid);
    CHECK(predict(model, std::vector<double>{-0.5}).label == Label::NonCovid);
}

TEST_CASE("SVM dual matches a brute-force QP oracle on 4-point problems") {
    internal::Rng rng(101);
    int checked = 0;
    for (int trial = 0; trial < 24; ++trial) {
        std::vector<std::vector<double>> X(4);
        for (auto& row : X) row = {rng.gaussian(), rng.gaussian()};
        const auto y = labels_from({0, 0, 1, 1});
        const double cost = trial % 3 == 0 ? 0.7 : (trial % 3 == 1 ? 1.0 : 5.0);

        ClassifierSpec spec;
        const bool rbf = trial % 2 == 0;
        spec.family = rbf ? Family::RbfSvm : Family::PolySvm;
        spec.hyperparameter = rbf ? rng.uniform(0.5, 2.0) : 1.0 + rng.below(3);
        spec.svm_cost = cost;

        std::vector<std::vector<double>> kernel(4, std::vector<double>(4));
        std::vector<double> signs = {-1.0, -1.0, 1.0, 1.0};
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                kernel[i][j] = kernel_eval(spec.family, spec.hyperparameter, X[i], X[j]);

        const auto model = train_model(spec, X, y);
        const auto& state = std::get<SvmState>(model.state);
        const double oracle_best = oracle::svm_dual_max_4pt(kernel, signs, cost);
        CHECK(std::fabs(state.dual_objective - oracle_best) <= 1e-3);

        // KKT residuals at the solution the decision function implies.
        for (int i = 0; i < 4; ++i) {
            const double margin = signs[i] * predict(model, X[i]).score;
            double alpha = 0.0;
            for (std::size_t s = 0; s < state.support_vectors.size(); ++s)
                if (state.support_vectors[s] == X[i]) alpha = std::fabs(state.dual_coeffs[s]);
            if (alpha < cost - 1e-9) CHECK(margin >= 1.0 - 1e-3);
            if (alpha > 1e-9) CHECK(margin <= 1.0 + 1e-3);
        }
        ++checked;
    }
    CHECK(checked >= 20);
}

TEST_CASE("quadratic kernel separates XOR") {
    const std::vector<std::vector<double>> X = {{0, 0}, {1, 1}, {0, 1}, {1, 0}};
    const auto y = labels_from({0, 0, 1, 1});
    const auto model = train_model(spec_of(Family::PolySvm, 2, 10.0), X, y);
    for (int i = 0; i < 4; ++i) CHECK(predict(model, X[i]).label == y[i]);
}

TEST_CASE("SVM rejects single-class input") {
    const std::vector<std::vector<double>> X = {{0.0}, {1.0}};
    CHECK_THROWS_AS(train_model(spec_of(Family::RbfSvm, 1.0), X, labels_from({1, 1})),
                    TrainingError);
}

namespace {

struct GaussianSample {
    std::vector<std::vector<double>> X;
    std::vector<Label> y;
};

GaussianSample two_blobs(int per_class, int dims, std::uint64_t seed, double separation = 2.0) {
    internal::Rng rng(seed);
    GaussianSample s;
    for (int c = 0; c < 2; ++c)
        for (int i = 0; i < per_class; ++i) {
            std::vector<double> x(static_cast<std::size_t>(dims));
            for (int d = 0; d < dims; ++d)
                x[static_cast<std::size_t>(d)] = rng.gaussian() + (c == 1 ? separation : 0.0);
            s.X.push_back(std::move(x));
            s.y.push_back(c == 1 ? Label::Covid : Label::NonCovid);
        }
    return s;
}

} // namespace

TEST_CASE("linear LDA scores zero at the midpoint of the class means") {
    const auto sample = two_blobs(10, 3, 7);
    const auto model = train_model(spec_of(Family::LinearLda, 0.0), sample.X, sample.y);
    const auto& state = std::get<LdaState>(model.state);

    std::vector<double> midpoint(3);
    for (int d = 0; d < 3; ++d)
        midpoint[static_cast<std::size_t>(d)] =
            0.5 * (state.mean_covid[static_cast<std::size_t>(d)] +
                   state.mean_non_covid[static_cast<std::size_t>(d)]);
    CHECK(std::fabs(predict(model, midpoint).score) < 1e-9);
}

TEST_CASE("full shrinkage keeps only the covariance diagonal") {
    const auto sample = two_blobs(8, 3, 11);
    const auto model = train_model(spec_of(Family::LinearLda, 1.0), sample.X, sample.y);
    const auto& state = std::get<LdaState>(model.state);

    // The stored lower Cholesky factor of a diagonal matrix is diagonal.
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < r; ++c)
            CHECK(state.chol_covid[static_cast<std::size_t>(r) * 3 + c] == 0.0);

    // Its diagonal is the square root of the pooled per-feature variance.
    const int n = 16;
    for (int d = 0; d < 3; ++d) {
        double mean_c = 0.0, mean_nc = 0.0;
        for (int i = 0; i < 8; ++i) mean_nc += sample.X[static_cast<std::size_t>(i)][static_cast<std::size_t>(d)];
        for (int i = 8; i < 16; ++i) mean_c += sample.X[static_cast<std::size_t>(i)][static_cast<std::size_t>(d)];
        mean_nc /= 8.0;
        mean_c /= 8.0;
        double scatter = 0.0;
        for (int i = 0; i < 8; ++i)
            scatter += std::pow(sample.X[static_cast<std::size_t>(i)][static_cast<std::size_t>(d)] - mean_nc, 2);
        for (int i = 8; i < 16; ++i)
            scatter += std::pow(sample.X[static_cast<std::size_t>(i)][static_cast<std::size_t>(d)] - mean_c, 2);
        const double pooled = scatter / (n - 2);
        CHECK(state.chol_covid[static_cast<std::size_t>(d) * 3 + d] ==
              doctest::Approx(std::sqrt(pooled)).epsilon(1e-12));
    }
}

namespace {

/// Reference discriminant difference built from explicit covariance
/// estimates and the Gauss-Jordan density oracle.
double oracle_lda_score(const GaussianSample& sample, bool pooled, double gamma,
                        std::span<const double> query) {
    const std::size_t n = sample.X.size();
    const std::size_t m = sample.X.front().size();
    std::vector<std::vector<double>> cls[2];
    for (std::size_t i = 0; i < n; ++i)
        cls[sample.y[i] == Label::Covid ? 1 : 0].push_back(sample.X[i]);

    std::vector<double> means[2];
    std::vector<std::vector<long double>> cov[2];
    std::vector<std::vector<long double>> pooled_cov(m, std::vector<long double>(m, 0.0L));
    for (int c = 0; c < 2; ++c) {
        const auto& rows = cls[c];
        means[c].assign(m, 0.0);
        for (const auto& row : rows)
            for (std::size_t d = 0; d < m; ++d) means[c][d] += row[d];
        for (std::size_t d = 0; d < m; ++d) means[c][d] /= static_cast<double>(rows.size());
        cov[c].assign(m, std::vector<long double>(m, 0.0L));
        for (const auto& row : rows)
            for (std::size_t a = 0; a < m; ++a)
                for (std::size_t b = 0; b < m; ++b) {
                    const long double v =
                        static_cast<long double>(row[a] - means[c][a]) * (row[b] - means[c][b]);
                    cov[c][a][b] += v;
                    pooled_cov[a][b] += v;
                }
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t b = 0; b < m; ++b)
                cov[c][a][b] /= static_cast<long double>(rows.size() - 1);
    }
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b) pooled_cov[a][b] /= static_cast<long double>(n - 2);

    auto shrink = [&](std::vector<std::vector<long double>> c) {
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t b = 0; b < m; ++b)
                if (a != b) c[a][b] *= static_cast<long double>(1.0 - gamma);
        return c;
    };
    const auto cov_nc = shrink(pooled ? pooled_cov : cov[0]);
    const auto cov_c = shrink(pooled ? pooled_cov : cov[1]);
    const double prior_nc = static_cast<double>(cls[0].size()) / static_cast<double>(n);
    const double prior_c = static_cast<double>(cls[1].size()) / static_cast<double>(n);
    return oracle::gaussian_log_discriminant(query, means[1], cov_c, prior_c) -
           oracle::gaussian_log_discriminant(query, means[0], cov_nc, prior_nc);
}

} // namespace

TEST_CASE("discriminants match the explicit-inverse oracle") {
    internal::Rng rng(13);
    const auto run = [&](Family family, double gamma) {
        const auto sample = two_blobs(20, 3, 17 + static_cast<std::uint64_t>(gamma * 10));
        const auto model = train_model(spec_of(family, gamma), sample.X, sample.y);
        for (int q = 0; q < 10; ++q) {
            std::vector<double> query = {rng.gaussian() * 2, rng.gaussian() * 2, rng.gaussian() * 2};
            const double fast = predict(model, query).score;
            const double slow =
                oracle_lda_score(sample, family == Family::LinearLda, gamma, query);
            CHECK(fast == doctest::Approx(slow).epsilon(1e-8));
        }
    };
    run(Family::LinearLda, 0.0);
    run(Family::LinearLda, 0.4);
    run(Family::QuadraticLda, 0.0);
    run(Family::QuadraticLda, 1.0);
}

TEST_CASE("unshrunk LDA labels are invariant to feature rescaling") {
    const auto sample = two_blobs(12, 3, 23);
    auto scaled = sample;
    const double scale[3] = {2.0, 0.5, 10.0};
    for (auto& row : scaled.X)
        for (int d = 0; d < 3; ++d) row[static_cast<std::size_t>(d)] *= scale[d];

    const auto a = train_model(spec_of(Family::LinearLda, 0.0), sample.X, sample.y);
    const auto b = train_model(spec_of(Family::LinearLda, 0.0), scaled.X, scaled.y);
    internal::Rng rng(29);
    for (int q = 0; q < 20; ++q) {
        std::vector<double> query = {rng.gaussian(), rng.gaussian(), rng.gaussian()};
        std::vector<double> query_scaled = {query[0] * scale[0], query[1] * scale[1],
                                            query[2] * scale[2]};
        const auto pa = predict(a, query);
        const auto pb = predict(b, query_scaled);
        CHECK(pa.label == pb.label);
        CHECK(pa.score == doctest::Approx(pb.score).epsilon(1e-6));
    }
}

TEST_CASE("LDA needs two samples per class") {
    const std::vector<std::vector<double>> X = {{0.0, 1.0}, {1.0, 0.0}, {2.0, 2.0}};
    CHECK_THROWS_AS(train_model(spec_of(Family::LinearLda, 0.0), X, labels_from({0, 1, 1})),
                    TrainingError);
}

TEST_CASE("an identically-zero covariance is a numeric error") {
    const std::vector<std::vector<double>> X = {{1.0, 2.0}, {1.0, 2.0}, {1.0, 2.0}, {1.0, 2.0}};
    CHECK_THROWS_AS(train_model(spec_of(Family::QuadraticLda, 0.0), X, labels_from({0, 0, 1, 1})),
                    NumericError);
}

TEST_CASE("kNN fixtures") {
    const std::vector<std::vector<double>> X = {{0.0}, {1.0}, {10.0}};
    const auto y = labels_from({0, 0, 1});

    SUBCASE("k=1 follows the nearest point") {
        const auto model = train_model(spec_of(Family::KnnEuclidean, 1), X, y);
        CHECK(predict(model, std::vector<double>{0.4}).label == Label::NonCovid);
        CHECK(predict(model, std::vector<double>{9.0}).label == Label::Covid);
        CHECK(predict(model, std::vector<double>{9.0}).score == doctest::Approx(1.0));
    }
    SUBCASE("k=3 takes the majority") {
        const auto model = train_model(spec_of(Family::KnnEuclidean, 3), X, y);
        const auto p = predict(model, std::vector<double>{20.0});
        CHECK(p.label == Label::NonCovid);
        CHECK(p.score == doctest::Approx(-1.0 / 3.0).epsilon(1e-15));
    }
}

TEST_CASE("distance ties break on the original index") {
    const auto model_a = train_model(spec_of(Family::KnnEuclidean, 1),
                                     {{1.0}, {-1.0}}, labels_from({1, 0}));
    CHECK(predict(model_a, std::vector<double>{0.0}).label == Label::Covid);

    const auto model_b = train_model(spec_of(Family::KnnEuclidean, 1),
                                     {{-1.0}, {1.0}}, labels_from({0, 1}));
    CHECK(predict(model_b, std::vector<double>{0.0}).label == Label::NonCovid);
}

TEST_CASE("vote ties follow the nearest neighbor even at score zero") {
    const auto model = train_model(spec_of(Family::KnnEuclidean, 2),
                                   {{0.5}, {1.0}}, labels_from({1, 0}));
    const auto p = predict(model, std::vector<double>{0.0});
    CHECK(p.score == 0.0);
    CHECK(p.label == Label::Covid); // the tie rule, not the score sign, decides
}

TEST_CASE("kNN is invariant to training row order on tie-free data") {
    internal::Rng rng(31);
    auto sample = two_blobs(10, 3, 37);
    const auto model = train_model(spec_of(Family::KnnChebyshev, 5), sample.X, sample.y);

    std::vector<std::size_t> perm(sample.X.size());
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = perm.size(); i > 1; --i)
        std::swap(perm[i - 1], perm[rng.below(i)]);
    std::vector<std::vector<double>> shuffled_X;
    std::vector<Label> shuffled_y;
    for (std::size_t i : perm) {
        shuffled_X.push_back(sample.X[i]);
        shuffled_y.push_back(sample.y[i]);
    }
    const auto shuffled = train_model(spec_of(Family::KnnChebyshev, 5), shuffled_X, shuffled_y);

    for (int q = 0; q < 30; ++q) {
        std::vector<double> query = {rng.gaussian() * 2, rng.gaussian() * 2, rng.gaussian() * 2};
        const auto pa = predict(model, query);
        const auto pb = predict(shuffled, query);
        CHECK(pa.label == pb.label);
        CHECK(pa.score == pb.score);
    }
}

TEST_CASE("k larger than the training set is a training error") {
    const std::vector<std::vector<double>> X = {{0.0}, {1.0}};
    CHECK_THROWS_AS(train_model(spec_of(Family::KnnEuclidean, 3), X, labels_from({0, 1})),
                    TrainingError);
}

TEST_CASE("kNN accepts single-class input") {
    const std::vector<std::vector<double>> X = {{0.0}, {1.0}};
    const auto model = train_model(spec_of(Family::KnnEuclidean, 1), X, labels_from({1, 1}));
    CHECK(predict(model, std::vector<double>{5.0}).label == Label::Covid);
}

TEST_CASE("full-rank PLSR equals ordinary least squares") {
    internal::Rng rng(41);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 30, m = 5;
        std::vector<std::vector<double>> X(n, std::vector<double>(m));
        std::vector<Label> y;
        for (int i = 0; i < n; ++i) {
            for (int d = 0; d < m; ++d) X[static_cast<std::size_t>(i)][static_cast<std::size_t>(d)] = rng.gaussian();
            y.push_back(i % 2 ? Label::Covid : Label::NonCovid);
        }
        const auto model = train_model(spec_of(Family::Plsr, m), X, y);

        std::vector<double> targets;
        for (Label l : y) targets.push_back(l == Label::Covid ? 1.0 : 0.0);
        const auto beta = oracle::ols(X, targets);

        for (int i = 0; i < n; ++i) {
            double expected = beta[0];
            for (int d = 0; d < m; ++d)
                expected += beta[static_cast<std::size_t>(d) + 1] *
                            X[static_cast<std::size_t>(i)][static_cast<std::size_t>(d)];
            // predict() maps the regression output to score = output - 0.5.
            const double output = predict(model, X[static_cast<std::size_t>(i)]).score + 0.5;
            CHECK(output == doctest::Approx(expected).epsilon(1e-6));
        }
    }
}

TEST_CASE("a single component on a rank-one problem is exact") {
    std::vector<std::vector<double>> X;
    std::vector<Label> y;
    for (int i = 0; i < 10; ++i) {
        const int bit = i % 2;
        X.push_back({static_cast<double>(bit)});
        y.push_back(bit ? Label::Covid : Label::NonCovid);
    }
    const auto model = train_model(spec_of(Family::Plsr, 1), X, y);
    CHECK(predict(model, std::vector<double>{1.0}).score + 0.5 == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(predict(model, std::vector<double>{0.0}).score + 0.5 == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
    CHECK(predict(model, std::vector<double>{1.0}).label == Label::Covid);
    CHECK(predict(model, std::vector<double>{0.0}).label == Label::NonCovid);
}

TEST_CASE("component scores are mutually orthogonal") {
    internal::Rng rng(43);
    const int n = 25, m = 6;
    std::vector<std::vector<double>> X(n, std::vector<double>(m));
    std::vector<Label> y;
    for (int i = 0; i < n; ++i) {
        for (int d = 0; d < m; ++d) X[static_cast<std::size_t>(i)][static_cast<std::size_t>(d)] = rng.gaussian();
        y.push_back(i % 3 == 0 ? Label::Covid : Label::NonCovid);
    }
    const auto model = train_model(spec_of(Family::Plsr, 5), X, y);
    const auto& state = std::get<PlsrState>(model.state);
    REQUIRE(state.scores.size() >= 2);
    for (std::size_t a = 0; a < state.scores.size(); ++a)
        for (std::size_t b = a + 1; b < state.scores.size(); ++b) {
            const double dot = std::inner_product(state.scores[a].begin(), state.scores[a].end(),
                                                  state.scores[b].begin(), 0.0);
            const double na = std::sqrt(std::inner_product(
                state.scores[a].begin(), state.scores[a].end(), state.scores[a].begin(), 0.0));
            const double nb = std::sqrt(std::inner_product(
                state.scores[b].begin(), state.scores[b].end(), state.scores[b].begin(), 0.0));
            CHECK(std::fabs(dot) / (na * nb) < 1e-8);
        }
}

TEST_CASE("one component in one dimension is simple linear regression") {
    std::vector<std::vector<double>> X;
    std::vector<Label> y;
    const std::vector<double> xs = {0.1, 0.4, 0.3, 0.9, 0.8, 0.7};
    const std::vector<int> bits = {0, 0, 0, 1, 1, 1};
    for (std::size_t i = 0; i < xs.size(); ++i) {
        X.push_back({xs[i]});
        y.push_back(bits[i] ? Label::Covid : Label::NonCovid);
    }
    const auto model = train_model(spec_of(Family::Plsr, 1), X, y);

    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += bits[i];
    }
    mx /= 6.0;
    my /= 6.0;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (bits[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;
    for (double q : {0.2, 0.5, 0.95}) {
        const double output = predict(model, std::vector<double>{q}).score + 0.5;
        CHECK(output == doctest::Approx(intercept + slope * q).epsilon(1e-9));
    }
}

TEST_CASE("requested components clamp to the data rank") {
    internal::Rng rng(47);
    const int n = 12, m = 4;
    std::vector<std::vector<double>> X(n, std::vector<double>(m));
    std::vector<Label> y;
    for (int i = 0; i < n; ++i) {
        for (int d = 0; d < m; ++d) X[static_cast<std::size_t>(i)][static_cast<std::size_t>(d)] = rng.gaussian();
        y.push_back(i % 2 ? Label::Covid : Label::NonCovid);
    }
    const auto a = train_model(spec_of(Family::Plsr, 19), X, y);
    const auto b = train_model(spec_of(Family::Plsr, m), X, y);
    CHECK(std::get<PlsrState>(a.state).coefficients == std::get<PlsrState>(b.state).coefficients);
    CHECK(std::get<PlsrState>(a.state).intercept == std::get<PlsrState>(b.state).intercept);
}

TEST_CASE("standardization stores training statistics and a unit fallback") {
    std::vector<std::vector<double>> X = {{1.0, 5.0}, {3.0, 5.0}, {5.0, 5.0}, {7.0, 5.0}};
    const auto model =
        train_model(spec_of(Family::KnnEuclidean, 1, 1.0, true), X, labels_from({0, 0, 1, 1}));
    REQUIRE(model.standardization.has_value());
    CHECK(model.standardization->mean[0] == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(model.standardization->mean[1] == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(model.standardization->stddev[1] == 1.0); // zero-variance fallback

    // Sample standard deviation with the n-1 denominator.
    const double expected = std::sqrt((9.0 + 1.0 + 1.0 + 9.0) / 3.0);
    CHECK(model.standardization->stddev[0] == doctest::Approx(expected).epsilon(1e-12));

    // The stored training points are the z-scored rows.
    const auto& state = std::get<KnnState>(model.state);
    double mean0 = 0.0;
    for (const auto& p : state.points) {
        mean0 += p[0];
        CHECK(p[1] == 0.0);
    }
    CHECK(std::fabs(mean0) < 1e-12);
}

TEST_CASE("standardized models ignore feature scale") {
    const auto sample = two_blobs(10, 2, 53);
    auto scaled = sample;
    for (auto& row : scaled.X) {
        row[0] *= 100.0;
        row[1] *= 0.01;
    }
    const auto a = train_model(spec_of(Family::KnnEuclidean, 3, 1.0, true), sample.X, sample.y);
    const auto b = train_model(spec_of(Family::KnnEuclidean, 3, 1.0, true), scaled.X, scaled.y);
    internal::Rng rng(59);
    for (int q = 0; q < 20; ++q) {
        std::vector<double> query = {rng.gaussian(), rng.gaussian()};
        std::vector<double> query_scaled = {query[0] * 100.0, query[1] * 0.01};
        CHECK(predict(a, query).label == predict(b, query_scaled).label);
    }
}

TEST_CASE("training rejects malformed input") {
    CHECK_THROWS_AS(train_model(spec_of(Family::KnnEuclidean, 1), {{1.0}, {1.0, 2.0}},
                                labels_from({0, 1})),
                    ValidationError);
    CHECK_THROWS_AS(train_model(spec_of(Family::KnnEuclidean, 1), {{1.0}, {std::nan("")}},
                                labels_from({0, 1})),
                    ValidationError);
    CHECK_THROWS_AS(train_model(spec_of(Family::KnnEuclidean, 1), {}, {}), TrainingError);
    CHECK_THROWS_AS(train_model(spec_of(Family::KnnEuclidean, 1), {{1.0}}, labels_from({0, 1})),
                    ValidationError);
}

TEST_CASE("prediction rejects width mismatches and non-finite queries") {
    const auto model = train_model(spec_of(Family::KnnEuclidean, 1), {{0.0, 0.0}, {1.0, 1.0}},
                                   labels_from({0, 1}));
    CHECK_THROWS_AS(predict(model, std::vector<double>{1.0}), ValidationError);
    CHECK_THROWS_AS(predict(model, std::vector<double>{1.0, std::nan("")}), ValidationError);
}

TEST_CASE("models round-trip through JSON bit-exactly") {
    const auto sample = two_blobs(8, 3, 61);
    internal::Rng rng(67);
    std::vector<ClassifierSpec> specs = {
        spec_of(Family::PolySvm, 2, 2.0),  spec_of(Family::RbfSvm, 1.3),
        spec_of(Family::LinearLda, 0.6),   spec_of(Family::QuadraticLda, 0.0),
        spec_of(Family::KnnEuclidean, 3),  spec_of(Family::KnnChebyshev, 1, 1.0, true),
        spec_of(Family::Plsr, 3),
    };
    for (const auto& spec : specs) {
        CAPTURE(to_token(spec.family));
        const auto model = train_model(spec, sample.X, sample.y);
        const auto reloaded = model_from_json(model_to_json(model));
        CHECK(reloaded.spec.family == spec.family);
        for (int q = 0; q < 10; ++q) {
            std::vector<double> query = {rng.gaussian(), rng.gaussian(), rng.gaussian()};
            const auto pa = predict(model, query);
            const auto pb = predict(reloaded, query);
            CHECK(pa.label == pb.label);
            CHECK(pa.score == pb.score);
        }
    }
}

TEST_CASE("malformed model JSON is a parse error") {
    CHECK_THROWS_AS(model_from_json("not json"), ParseError);
    CHECK_THROWS_AS(model_from_json("{}"), ParseError);
    CHECK_THROWS_AS(model_from_json(R"({"schema_version": 99})"), ParseError);
}

TEST_CASE("default spec tables carry the tuned values") {
    const auto tuned = tuned_default_specs();
    CHECK(tuned.at(Family::RbfSvm).hyperparameter == 1.3);
    CHECK(tuned.at(Family::PolySvm).hyperparameter == 3.0);
    CHECK(tuned.at(Family::LinearLda).hyperparameter == 0.6);
    CHECK(tuned.at(Family::QuadraticLda).hyperparameter == 0.0);
    CHECK(tuned.at(Family::KnnEuclidean).hyperparameter == 1.0);
    CHECK(tuned.at(Family::Plsr).hyperparameter == 4.0);

    const auto phase = sweep_phase_specs();
    CHECK(phase.at(Family::PolySvm).hyperparameter == 2.0);
    CHECK(phase.at(Family::RbfSvm).hyperparameter == 1.0);
    CHECK(phase.at(Family::Plsr).hyperparameter == 13.0);
    for (const auto& [family, spec] : phase) CHECK_NOTHROW(spec.validate());
}
