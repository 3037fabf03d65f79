#include "coughgate/classifiers.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "coughgate/error.hpp"
#include "internal/train.hpp"

namespace coughgate {

namespace {

using nlohmann::json;

bool is_integral(double v) { return std::isfinite(v) && v == std::floor(v); }

bool needs_both_classes(Family family) {
    return family != Family::KnnEuclidean && family != Family::KnnChebyshev;
}

void check_rows(const std::vector<std::vector<double>>& x, const std::vector<Label>& y) {
    if (x.empty()) throw TrainingError("training set is empty");
    if (x.size() != y.size()) throw ValidationError("row/label count mismatch");
    const std::size_t m = x.front().size();
    if (m == 0) throw ValidationError("training rows have no features");
    for (const auto& row : x) {
        if (row.size() != m)
            throw ValidationError("ragged training rows: " + std::to_string(row.size()) +
                                  " vs " + std::to_string(m));
        for (double v : row)
            if (!std::isfinite(v)) throw ValidationError("non-finite training feature");
    }
}

StandardizeStats fit_standardization(const std::vector<std::vector<double>>& x) {
    const std::size_t n = x.size();
    const std::size_t m = x.front().size();
    StandardizeStats stats;
    stats.mean.assign(m, 0.0);
    stats.stddev.assign(m, 1.0);
    for (const auto& row : x)
        for (std::size_t j = 0; j < m; ++j) stats.mean[j] += row[j];
    for (double& v : stats.mean) v /= static_cast<double>(n);
    if (n < 2) return stats;
    for (std::size_t j = 0; j < m; ++j) {
        double ss = 0.0;
        for (const auto& row : x) {
            const double d = row[j] - stats.mean[j];
            ss += d * d;
        }
        const double sd = std::sqrt(ss / static_cast<double>(n - 1));
        stats.stddev[j] = sd > 0.0 ? sd : 1.0;
    }
    return stats;
}

std::vector<double> apply_standardization(const StandardizeStats& stats,
                                          std::span<const double> x) {
    std::vector<double> z(x.size());
    for (std::size_t j = 0; j < z.size(); ++j) z[j] = (x[j] - stats.mean[j]) / stats.stddev[j];
    return z;
}

json spec_to_json(const ClassifierSpec& spec) {
    return json{{"family", to_token(spec.family)},
                {"hyperparameter", spec.hyperparameter},
                {"svm_cost", spec.svm_cost},
                {"standardize", spec.standardize}};
}

ClassifierSpec spec_from_json(const json& j) {
    ClassifierSpec spec;
    spec.family = family_from_token(j.at("family").get<std::string>());
    spec.hyperparameter = j.at("hyperparameter").get<double>();
    spec.svm_cost = j.at("svm_cost").get<double>();
    spec.standardize = j.at("standardize").get<bool>();
    spec.validate();
    return spec;
}

std::vector<Label> labels_from_ints(const std::vector<int>& raw) {
    std::vector<Label> out;
    out.reserve(raw.size());
    for (int v : raw) {
        if (v != 0 && v != 1) throw ParseError("model label must be 0 or 1");
        out.push_back(v == 1 ? Label::Covid : Label::NonCovid);
    }
    return out;
}

} // namespace

const char* to_token(Family family) {
    switch (family) {
        case Family::PolySvm: return "poly-svm";
        case Family::RbfSvm: return "rbf-svm";
        case Family::LinearLda: return "linear-lda";
        case Family::QuadraticLda: return "quadratic-lda";
        case Family::KnnEuclidean: return "knn-euclidean";
        case Family::KnnChebyshev: return "knn-chebyshev";
        case Family::Plsr: return "plsr";
    }
    return "knn-euclidean";
}

const char* display_name(Family family) {
    switch (family) {
        case Family::PolySvm: return "Polynomial-SVM";
        case Family::RbfSvm: return "RBF-SVM";
        case Family::LinearLda: return "Linear-LDA";
        case Family::QuadraticLda: return "Quadratic-LDA";
        case Family::KnnEuclidean: return "Euclidean-kNN";
        case Family::KnnChebyshev: return "Chebyshev-kNN";
        case Family::Plsr: return "PLSR";
    }
    return "Euclidean-kNN";
}

Family family_from_token(const std::string& token) {
    static constexpr std::array<Family, 7> all = {
        Family::PolySvm, Family::RbfSvm,       Family::LinearLda, Family::QuadraticLda,
        Family::KnnEuclidean, Family::KnnChebyshev, Family::Plsr};
    for (Family f : all)
        if (token == to_token(f)) return f;
    throw ValidationError("unknown classifier token '" + token + "'");
}

std::span<const Family> table3_family_order() {
    static constexpr std::array<Family, 7> order = {
        Family::PolySvm, Family::RbfSvm,       Family::LinearLda, Family::QuadraticLda,
        Family::KnnEuclidean, Family::KnnChebyshev, Family::Plsr};
    return order;
}

std::span<const Family> table2_family_order() {
    static constexpr std::array<Family, 7> order = {
        Family::PolySvm, Family::RbfSvm,       Family::LinearLda, Family::QuadraticLda,
        Family::KnnChebyshev, Family::KnnEuclidean, Family::Plsr};
    return order;
}

void ClassifierSpec::validate() const {
    switch (family) {
        case Family::PolySvm:
            if (!is_integral(hyperparameter) || hyperparameter < 1 || hyperparameter > 4)
                throw ConfigError("polynomial order must be an integer in [1, 4]");
            if (!(svm_cost > 0.0)) throw ConfigError("svm_cost must be positive");
            break;
        case Family::RbfSvm:
            if (!(hyperparameter > 0.0)) throw ConfigError("sigma must be positive");
            if (!(svm_cost > 0.0)) throw ConfigError("svm_cost must be positive");
            break;
        case Family::LinearLda:
        case Family::QuadraticLda:
            if (!(hyperparameter >= 0.0 && hyperparameter <= 1.0))
                throw ConfigError("gamma must lie in [0, 1]");
            break;
        case Family::KnnEuclidean:
        case Family::KnnChebyshev:
            if (!is_integral(hyperparameter) || hyperparameter < 1)
                throw ConfigError("k must be an integer >= 1");
            break;
        case Family::Plsr:
            if (!is_integral(hyperparameter) || hyperparameter < 1)
                throw ConfigError("component count must be an integer >= 1");
            break;
    }
}

double kernel_eval(Family family, double hyperparameter, std::span<const double> x,
                   std::span<const double> y) {
    if (x.size() != y.size()) throw ValidationError("kernel operands differ in length");
    if (family == Family::PolySvm) {
        double d = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) d += x[i] * y[i];
        return std::pow(1.0 + d, hyperparameter);
    }
    if (family == Family::RbfSvm) {
        if (hyperparameter == 0.0) throw ConfigError("sigma must be nonzero");
        double sq = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double d = x[i] - y[i];
            sq += d * d;
        }
        return std::exp(-sq / (2.0 * hyperparameter * hyperparameter));
    }
    throw ConfigError("kernel_eval applies to the SVM families only");
}

double euclidean_distance(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ValidationError("distance operands differ in length");
    double sq = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        sq += d * d;
    }
    return std::sqrt(sq);
}

double chebyshev_distance(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ValidationError("distance operands differ in length");
    double worst = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, std::abs(x[i] - y[i]));
    return worst;
}

std::size_t TrainedModel::n_features() const {
    if (standardization) return standardization->mean.size();
    if (const auto* svm = std::get_if<SvmState>(&state))
        return svm->support_vectors.empty() ? 0 : svm->support_vectors.front().size();
    if (const auto* lda = std::get_if<LdaState>(&state)) return lda->mean_covid.size();
    if (const auto* knn = std::get_if<KnnState>(&state))
        return knn->points.empty() ? 0 : knn->points.front().size();
    return std::get<PlsrState>(state).coefficients.size();
}

TrainedModel train_model(const ClassifierSpec& spec, const std::vector<std::vector<double>>& x,
                         const std::vector<Label>& y) {
    spec.validate();
    check_rows(x, y);

    const auto n_covid = static_cast<std::size_t>(std::count(y.begin(), y.end(), Label::Covid));
    const std::size_t n_non = y.size() - n_covid;
    if (needs_both_classes(spec.family) && (n_covid == 0 || n_non == 0))
        throw TrainingError(std::string(display_name(spec.family)) +
                            " needs both classes in the training set");

    TrainedModel model;
    model.spec = spec;

    const std::vector<std::vector<double>>* rows = &x;
    std::vector<std::vector<double>> scaled;
    if (spec.standardize) {
        model.standardization = fit_standardization(x);
        scaled.reserve(x.size());
        for (const auto& row : x) scaled.push_back(apply_standardization(*model.standardization, row));
        rows = &scaled;
    }

    switch (spec.family) {
        case Family::PolySvm:
        case Family::RbfSvm:
            if (rows->size() < 2) throw TrainingError("SVM needs at least two rows");
            model.state = internal::train_svm(spec, *rows, y);
            break;
        case Family::LinearLda:
        case Family::QuadraticLda:
            if (n_covid < 2 || n_non < 2)
                throw TrainingError("LDA needs at least two rows per class");
            model.state = internal::train_lda(spec, *rows, y);
            break;
        case Family::KnnEuclidean:
        case Family::KnnChebyshev: {
            if (static_cast<std::size_t>(spec.hyperparameter) > rows->size())
                throw TrainingError("k exceeds the training set size");
            KnnState knn;
            knn.points = *rows;
            knn.labels = y;
            model.state = std::move(knn);
            break;
        }
        case Family::Plsr:
            if (rows->size() < 2) throw TrainingError("PLSR needs at least two rows");
            model.state = internal::train_plsr(spec, *rows, y);
            break;
    }
    return model;
}

TrainedModel train_model(const ClassifierSpec& spec, const FeatureDataset& data) {
    std::vector<std::vector<double>> x;
    std::vector<Label> y;
    x.reserve(data.rows.size());
    y.reserve(data.rows.size());
    for (const auto& row : data.rows) {
        x.push_back(row.values);
        y.push_back(row.label);
    }
    return train_model(spec, x, y);
}

namespace internal {

Prediction knn_predict(const KnnState& state, Family family, int k, std::span<const double> x) {
    const std::size_t n = state.points.size();
    std::vector<double> dist(n);
    for (std::size_t i = 0; i < n; ++i)
        dist[i] = family == Family::KnnEuclidean ? euclidean_distance(state.points[i], x)
                                                 : chebyshev_distance(state.points[i], x);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    // Equal distances resolve by original training index.
    std::sort(order.begin(), order.end(), [&dist](std::size_t a, std::size_t b) {
        return dist[a] != dist[b] ? dist[a] < dist[b] : a < b;
    });

    int covid = 0;
    for (int i = 0; i < k; ++i)
        if (state.labels[order[static_cast<std::size_t>(i)]] == Label::Covid) ++covid;
    const int non_covid = k - covid;

    Prediction p;
    p.score = static_cast<double>(covid - non_covid) / k;
    if (covid != non_covid) p.label = covid > non_covid ? Label::Covid : Label::NonCovid;
    else p.label = state.labels[order[0]]; // vote tie: the single nearest decides
    return p;
}

} // namespace internal

Prediction predict(const TrainedModel& model, std::span<const double> x) {
    const std::size_t width = model.n_features();
    if (x.size() != width)
        throw ValidationError("input has " + std::to_string(x.size()) + " features, model expects " +
                              std::to_string(width));
    for (double v : x)
        if (!std::isfinite(v)) throw ValidationError("non-finite input feature");

    std::vector<double> scaled;
    if (model.standardization) {
        scaled = apply_standardization(*model.standardization, x);
        x = scaled;
    }

    Prediction p;
    if (const auto* svm = std::get_if<SvmState>(&model.state)) {
        p.score = internal::svm_decision(*svm, model.spec.family, model.spec.hyperparameter, x);
        p.label = p.score > 0.0 ? Label::Covid : Label::NonCovid;
    } else if (const auto* lda = std::get_if<LdaState>(&model.state)) {
        p.score = internal::lda_decision(*lda, x);
        p.label = p.score > 0.0 ? Label::Covid : Label::NonCovid;
    } else if (const auto* knn = std::get_if<KnnState>(&model.state)) {
        p = internal::knn_predict(*knn, model.spec.family,
                                  static_cast<int>(model.spec.hyperparameter), x);
    } else {
        const double out = internal::plsr_output(std::get<PlsrState>(model.state), x);
        p.label = out >= 0.5 ? Label::Covid : Label::NonCovid;
        p.score = out - 0.5;
    }
    return p;
}

std::string model_to_json(const TrainedModel& model) {
    json j;
    j["schema_version"] = 1;
    j["spec"] = spec_to_json(model.spec);
    if (model.standardization)
        j["standardization"] = json{{"mean", model.standardization->mean},
                                    {"stddev", model.standardization->stddev}};
    else
        j["standardization"] = nullptr;

    json state;
    if (const auto* svm = std::get_if<SvmState>(&model.state)) {
        state["kind"] = "svm";
        state["support_vectors"] = svm->support_vectors;
        state["dual_coeffs"] = svm->dual_coeffs;
        state["bias"] = svm->bias;
        state["dual_objective"] = svm->dual_objective;
        state["iterations"] = svm->iterations;
    } else if (const auto* lda = std::get_if<LdaState>(&model.state)) {
        state["kind"] = "lda";
        state["mean_covid"] = lda->mean_covid;
        state["mean_non_covid"] = lda->mean_non_covid;
        state["log_prior_covid"] = lda->log_prior_covid;
        state["log_prior_non_covid"] = lda->log_prior_non_covid;
        state["chol_covid"] = lda->chol_covid;
        state["chol_non_covid"] = lda->chol_non_covid;
        state["log_det_covid"] = lda->log_det_covid;
        state["log_det_non_covid"] = lda->log_det_non_covid;
    } else if (const auto* knn = std::get_if<KnnState>(&model.state)) {
        state["kind"] = "knn";
        state["points"] = knn->points;
        json labels = json::array();
        for (Label l : knn->labels) labels.push_back(l == Label::Covid ? 1 : 0);
        state["labels"] = std::move(labels);
    } else {
        const auto& plsr = std::get<PlsrState>(model.state);
        state["kind"] = "plsr";
        state["coefficients"] = plsr.coefficients;
        state["intercept"] = plsr.intercept;
        state["scores"] = plsr.scores;
    }
    j["state"] = std::move(state);
    return j.dump(2);
}

TrainedModel model_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("model JSON: ") + e.what());
    }
    try {
        if (j.at("schema_version").get<int>() != 1)
            throw ParseError("unsupported model schema version");
        TrainedModel model;
        model.spec = spec_from_json(j.at("spec"));
        if (!j.at("standardization").is_null()) {
            StandardizeStats stats;
            stats.mean = j["standardization"].at("mean").get<std::vector<double>>();
            stats.stddev = j["standardization"].at("stddev").get<std::vector<double>>();
            model.standardization = std::move(stats);
        }
        const json& state = j.at("state");
        const auto kind = state.at("kind").get<std::string>();
        if (kind == "svm") {
            SvmState svm;
            svm.support_vectors = state.at("support_vectors").get<std::vector<std::vector<double>>>();
            svm.dual_coeffs = state.at("dual_coeffs").get<std::vector<double>>();
            svm.bias = state.at("bias").get<double>();
            svm.dual_objective = state.at("dual_objective").get<double>();
            svm.iterations = state.at("iterations").get<int>();
            model.state = std::move(svm);
        } else if (kind == "lda") {
            LdaState lda;
            lda.mean_covid = state.at("mean_covid").get<std::vector<double>>();
            lda.mean_non_covid = state.at("mean_non_covid").get<std::vector<double>>();
            lda.log_prior_covid = state.at("log_prior_covid").get<double>();
            lda.log_prior_non_covid = state.at("log_prior_non_covid").get<double>();
            lda.chol_covid = state.at("chol_covid").get<std::vector<double>>();
            lda.chol_non_covid = state.at("chol_non_covid").get<std::vector<double>>();
            lda.log_det_covid = state.at("log_det_covid").get<double>();
            lda.log_det_non_covid = state.at("log_det_non_covid").get<double>();
            model.state = std::move(lda);
        } else if (kind == "knn") {
            KnnState knn;
            knn.points = state.at("points").get<std::vector<std::vector<double>>>();
            knn.labels = labels_from_ints(state.at("labels").get<std::vector<int>>());
            model.state = std::move(knn);
        } else if (kind == "plsr") {
            PlsrState plsr;
            plsr.coefficients = state.at("coefficients").get<std::vector<double>>();
            plsr.intercept = state.at("intercept").get<double>();
            plsr.scores = state.at("scores").get<std::vector<std::vector<double>>>();
            model.state = std::move(plsr);
        } else {
            throw ParseError("unknown model state kind '" + kind + "'");
        }
        return model;
    } catch (const json::exception& e) {
        throw ParseError(std::string("model JSON: ") + e.what());
    }
}

std::map<Family, ClassifierSpec> sweep_phase_specs() {
    std::map<Family, ClassifierSpec> specs;
    specs[Family::PolySvm] = {Family::PolySvm, 2.0};
    specs[Family::RbfSvm] = {Family::RbfSvm, 1.0};
    specs[Family::LinearLda] = {Family::LinearLda, 0.0};
    specs[Family::QuadraticLda] = {Family::QuadraticLda, 0.0};
    specs[Family::KnnEuclidean] = {Family::KnnEuclidean, 1.0};
    specs[Family::KnnChebyshev] = {Family::KnnChebyshev, 1.0};
    specs[Family::Plsr] = {Family::Plsr, 13.0};
    return specs;
}

std::map<Family, ClassifierSpec> tuned_default_specs() {
    std::map<Family, ClassifierSpec> specs;
    specs[Family::PolySvm] = {Family::PolySvm, 3.0};
    specs[Family::RbfSvm] = {Family::RbfSvm, 1.3};
    specs[Family::LinearLda] = {Family::LinearLda, 0.6};
    specs[Family::QuadraticLda] = {Family::QuadraticLda, 0.0};
    specs[Family::KnnEuclidean] = {Family::KnnEuclidean, 1.0};
    specs[Family::KnnChebyshev] = {Family::KnnChebyshev, 1.0};
    specs[Family::Plsr] = {Family::Plsr, 4.0};
    return specs;
}

} // namespace coughgate
