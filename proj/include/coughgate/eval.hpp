#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "coughgate/classifiers.hpp"
#include "coughgate/mfcc.hpp"

namespace coughgate {

/// 2x2 counts. tp_* is the correctly predicted portion of each class; fn_*
/// the misclassified portion.
struct ConfusionMatrix {
    long tp_nc = 0; ///< non-COVID predicted non-COVID
    long fn_nc = 0; ///< non-COVID predicted COVID
    long tp_c = 0;  ///< COVID predicted COVID
    long fn_c = 0;  ///< COVID predicted non-COVID

    long total() const { return tp_nc + fn_nc + tp_c + fn_c; }
};

ConfusionMatrix confusion(std::span<const Label> truths, std::span<const Label> predictions);

struct MetricSet {
    double accuracy = 0.0;
    double sensitivity_non_covid = 0.0;
    double sensitivity_covid = 0.0;
    /// F1 of the non-COVID class.
    double f_measure = 0.0;
    /// Mean of the two sensitivities (the result tables' "AUC" column).
    double paper_auc = 0.0;
    /// Set when the F-measure precision denominator was zero and 0 was reported.
    bool f_measure_degenerate = false;
};

/// Both class totals must be positive; throws ValidationError otherwise.
MetricSet metrics(const ConfusionMatrix& cm);

/// True ranking AUC: probability a random COVID score exceeds a random
/// non-COVID score, ties counted half (normalized Mann-Whitney U).
double roc_auc(std::span<const double> scores, std::span<const Label> truths);

struct SamplePrediction {
    std::string source_id;
    Label truth = Label::NonCovid;
    Label predicted = Label::NonCovid;
    double score = 0.0;
};

struct EvalReport {
    ClassifierSpec spec;
    std::optional<MfccConfig> mfcc_config;
    ConfusionMatrix confusion;
    MetricSet metrics;
    double roc_auc = 0.0;
    std::vector<SamplePrediction> predictions; ///< ordered by dataset index
    std::vector<std::string> warnings;
};

/// Leave-one-out cross-validation: one fold per row, aggregated into a
/// single confusion matrix. Folds run in parallel when threads > 1 and the
/// result is schedule-independent. A fold whose training set ends up
/// single-class is recorded as a warning; families that cannot train on it
/// fall back to the majority training label for that fold.
EvalReport loocv(const FeatureDataset& data, const ClassifierSpec& spec, int threads = 1);

std::string report_to_json(const EvalReport& report);

/// One config-hash-friendly CSV row mirroring the result table's column
/// order. with_header prepends the column names.
std::string report_to_csv_row(const EvalReport& report, bool with_header);

} // namespace coughgate
