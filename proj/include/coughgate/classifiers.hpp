#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "coughgate/dataset.hpp"

namespace coughgate {

enum class Family {
    PolySvm,
    RbfSvm,
    LinearLda,
    QuadraticLda,
    KnnEuclidean,
    KnnChebyshev,
    Plsr,
};

/// Token used on the command line and in file names, e.g. "knn-euclidean".
const char* to_token(Family family);
/// Human-readable table name, e.g. "Euclidean-kNN".
const char* display_name(Family family);
Family family_from_token(const std::string& token);

/// All seven families, in the order the result tables list them.
std::span<const Family> table3_family_order();
/// Column order of the frame-length table (the two k-NN variants swap).
std::span<const Family> table2_family_order();

struct ClassifierSpec {
    Family family = Family::KnnEuclidean;
    /// Meaning depends on family: polynomial order d, RBF sigma,
    /// LDA/QDA gamma, neighbor count k, or PLS component count.
    double hyperparameter = 1.0;
    double svm_cost = 1.0;     ///< SVM families only
    bool standardize = false;  ///< z-score features with training statistics

    /// Throws ConfigError when the hyperparameter is outside the family's
    /// documented range.
    void validate() const;
};

struct StandardizeStats {
    std::vector<double> mean;
    std::vector<double> stddev; ///< zero-variance columns store 1 so the transform is total
};

struct SvmState {
    std::vector<std::vector<double>> support_vectors;
    std::vector<double> dual_coeffs; ///< alpha_i * y_i per support vector
    double bias = 0.0;
    double dual_objective = 0.0;
    int iterations = 0;
};

struct LdaState {
    std::vector<double> mean_covid;
    std::vector<double> mean_non_covid;
    double log_prior_covid = 0.0;
    double log_prior_non_covid = 0.0;
    /// Lower Cholesky factors of the regularized covariances. Linear LDA
    /// stores the pooled factor twice so prediction is family-agnostic.
    std::vector<double> chol_covid;
    std::vector<double> chol_non_covid;
    double log_det_covid = 0.0;
    double log_det_non_covid = 0.0;
};

struct KnnState {
    std::vector<std::vector<double>> points;
    std::vector<Label> labels;
};

struct PlsrState {
    std::vector<double> coefficients;
    double intercept = 0.0;
    /// Component scores kept for the orthogonality contract and diagnostics.
    std::vector<std::vector<double>> scores;
};

struct TrainedModel {
    ClassifierSpec spec;
    std::optional<StandardizeStats> standardization;
    std::variant<SvmState, LdaState, KnnState, PlsrState> state;

    std::size_t n_features() const;
};

struct Prediction {
    Label label = Label::NonCovid;
    double score = 0.0; ///< positive means COVID for every family
};

/// POLY: (1 + x.y)^d; RBF: exp(-|x-y|^2 / (2 sigma^2)). Throws ConfigError
/// for sigma = 0 or a non-kernel family.
double kernel_eval(Family family, double hyperparameter,
                   std::span<const double> x, std::span<const double> y);

double euclidean_distance(std::span<const double> x, std::span<const double> y);
double chebyshev_distance(std::span<const double> x, std::span<const double> y);

/// Trains any family on labeled rows. Throws TrainingError on single-class
/// input (k-NN excepted), ValidationError on non-finite features or ragged
/// rows, NumericError when a covariance stays indefinite after jitter.
TrainedModel train_model(const ClassifierSpec& spec,
                         const std::vector<std::vector<double>>& X,
                         const std::vector<Label>& y);

TrainedModel train_model(const ClassifierSpec& spec, const FeatureDataset& data);

/// Applies the family's decision rule; standardization statistics stored in
/// the model transform x first. Throws ValidationError on width mismatch.
Prediction predict(const TrainedModel& model, std::span<const double> x);

/// Versioned JSON round-trip; reloaded models predict bit-identically.
std::string model_to_json(const TrainedModel& model);
TrainedModel model_from_json(const std::string& text);

/// Hyperparameter defaults used while the feature-extraction axes are swept.
std::map<Family, ClassifierSpec> sweep_phase_specs();
/// Tuned defaults: sigma 1.3, order 3, gammas 0.6/0, k 1, components 4.
std::map<Family, ClassifierSpec> tuned_default_specs();

} // namespace coughgate
