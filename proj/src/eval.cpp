#include "coughgate/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include <nlohmann/json.hpp>

#include "coughgate/error.hpp"
#include "internal/parallel.hpp"

namespace coughgate {

namespace {

using nlohmann::json;

std::string four_decimals(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

json confusion_to_json(const ConfusionMatrix& cm) {
    return json{{"tp_non_covid", cm.tp_nc},
                {"fn_non_covid", cm.fn_nc},
                {"tp_covid", cm.tp_c},
                {"fn_covid", cm.fn_c}};
}

} // namespace

ConfusionMatrix confusion(std::span<const Label> truths, std::span<const Label> predictions) {
    if (truths.size() != predictions.size())
        throw ValidationError("confusion: truth/prediction length mismatch");
    if (truths.empty()) throw ValidationError("confusion: empty input");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < truths.size(); ++i) {
        if (truths[i] == Label::NonCovid)
            ++(predictions[i] == Label::NonCovid ? cm.tp_nc : cm.fn_nc);
        else
            ++(predictions[i] == Label::Covid ? cm.tp_c : cm.fn_c);
    }
    return cm;
}

MetricSet metrics(const ConfusionMatrix& cm) {
    const long n_nc = cm.tp_nc + cm.fn_nc;
    const long n_c = cm.tp_c + cm.fn_c;
    if (n_nc <= 0 || n_c <= 0) throw ValidationError("metrics: both class totals must be positive");
    if (cm.tp_nc < 0 || cm.fn_nc < 0 || cm.tp_c < 0 || cm.fn_c < 0)
        throw ValidationError("metrics: negative cell");

    MetricSet m;
    m.accuracy = static_cast<double>(cm.tp_nc + cm.tp_c) / static_cast<double>(cm.total());
    m.sensitivity_non_covid = static_cast<double>(cm.tp_nc) / static_cast<double>(n_nc);
    m.sensitivity_covid = static_cast<double>(cm.tp_c) / static_cast<double>(n_c);
    m.paper_auc = (m.sensitivity_covid + m.sensitivity_non_covid) / 2.0;

    // F1 of the non-COVID class: precision over everything predicted non-COVID.
    const long predicted_nc = cm.tp_nc + cm.fn_c;
    if (predicted_nc == 0) {
        m.f_measure = 0.0;
        m.f_measure_degenerate = true;
    } else {
        const double precision = static_cast<double>(cm.tp_nc) / static_cast<double>(predicted_nc);
        const double recall = m.sensitivity_non_covid;
        m.f_measure = precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    }
    return m;
}

double roc_auc(std::span<const double> scores, std::span<const Label> truths) {
    if (scores.size() != truths.size()) throw ValidationError("roc_auc: length mismatch");
    const std::size_t n = scores.size();
    std::size_t n_covid = 0;
    for (Label l : truths)
        if (l == Label::Covid) ++n_covid;
    const std::size_t n_non = n - n_covid;
    if (n_covid == 0 || n_non == 0) throw ValidationError("roc_auc: both classes required");

    // Rank-based Mann-Whitney with midranks for ties.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&scores](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    double covid_rank_sum = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double midrank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t t = i; t <= j; ++t)
            if (truths[order[t]] == Label::Covid) covid_rank_sum += midrank;
        i = j + 1;
    }
    const double u = covid_rank_sum - static_cast<double>(n_covid) * (static_cast<double>(n_covid) + 1.0) / 2.0;
    return u / (static_cast<double>(n_covid) * static_cast<double>(n_non));
}

EvalReport loocv(const FeatureDataset& data, const ClassifierSpec& spec, int threads) {
    spec.validate();
    data.validate_for_eval();
    const std::size_t n = data.size();

    // k-NN folds train on n-1 rows.
    if ((spec.family == Family::KnnEuclidean || spec.family == Family::KnnChebyshev) &&
        static_cast<std::size_t>(spec.hyperparameter) > n - 1)
        throw ValidationError("k exceeds the leave-one-out training size");

    std::vector<SamplePrediction> predictions(n);
    std::vector<std::string> fold_warnings(n);

    internal::parallel_for(n, threads, [&](std::size_t hold) {
        std::vector<std::vector<double>> x;
        std::vector<Label> y;
        x.reserve(n - 1);
        y.reserve(n - 1);
        std::size_t covid = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == hold) continue;
            x.push_back(data.rows[i].values);
            y.push_back(data.rows[i].label);
            if (data.rows[i].label == Label::Covid) ++covid;
        }

        SamplePrediction sp;
        sp.source_id = data.rows[hold].source_id;
        sp.truth = data.rows[hold].label;

        const bool single_class = covid == 0 || covid == y.size();
        if (single_class) {
            fold_warnings[hold] = "fold " + std::to_string(hold) + " ('" + sp.source_id +
                                  "'): training set is single-class";
        }
        try {
            const TrainedModel model = train_model(spec, x, y);
            const Prediction p = predict(model, data.rows[hold].values);
            sp.predicted = p.label;
            sp.score = p.score;
        } catch (const TrainingError&) {
            // Majority label of the fold's training rows; ties go non-COVID.
            const Label majority = covid * 2 > y.size() ? Label::Covid : Label::NonCovid;
            sp.predicted = majority;
            sp.score = majority == Label::Covid ? 0.5 : -0.5;
            if (fold_warnings[hold].empty())
                fold_warnings[hold] = "fold " + std::to_string(hold) + " ('" + sp.source_id + "')";
            fold_warnings[hold] += "; untrainable, predicted the majority training label";
        }
        predictions[hold] = std::move(sp);
    });

    EvalReport report;
    report.spec = spec;
    report.predictions = std::move(predictions);
    for (auto& w : fold_warnings)
        if (!w.empty()) report.warnings.push_back(std::move(w));

    std::vector<Label> truths(n), preds(n);
    std::vector<double> scores(n);
    for (std::size_t i = 0; i < n; ++i) {
        truths[i] = report.predictions[i].truth;
        preds[i] = report.predictions[i].predicted;
        scores[i] = report.predictions[i].score;
    }
    report.confusion = confusion(truths, preds);
    report.metrics = metrics(report.confusion);
    if (report.metrics.f_measure_degenerate)
        report.warnings.push_back("F-measure precision denominator was zero; reported 0");
    report.roc_auc = roc_auc(scores, truths);
    return report;
}

std::string report_to_json(const EvalReport& report) {
    json j;
    j["schema_version"] = 1;
    j["classifier"] = to_token(report.spec.family);
    j["hyperparameter"] = report.spec.hyperparameter;
    j["svm_cost"] = report.spec.svm_cost;
    j["standardize"] = report.spec.standardize;
    if (report.mfcc_config) {
        const MfccConfig& c = *report.mfcc_config;
        j["mfcc_config"] = json{{"frame_length", c.frame_length},
                                {"n_mfcc", c.n_mfcc},
                                {"n_segments", c.n_segments},
                                {"n_mel_filters", c.n_mel_filters},
                                {"log_floor", c.log_floor},
                                {"include_c0", c.include_c0}};
    } else {
        j["mfcc_config"] = nullptr;
    }
    j["confusion"] = confusion_to_json(report.confusion);
    j["metrics"] = json{{"accuracy", report.metrics.accuracy},
                        {"sensitivity_non_covid", report.metrics.sensitivity_non_covid},
                        {"sensitivity_covid", report.metrics.sensitivity_covid},
                        {"f_measure", report.metrics.f_measure},
                        {"paper_auc", report.metrics.paper_auc},
                        {"f_measure_degenerate", report.metrics.f_measure_degenerate}};
    j["roc_auc"] = report.roc_auc;
    json preds = json::array();
    for (const auto& p : report.predictions)
        preds.push_back(json{{"source_id", p.source_id},
                             {"truth", to_token(p.truth)},
                             {"predicted", to_token(p.predicted)},
                             {"score", p.score}});
    j["predictions"] = std::move(preds);
    j["warnings"] = report.warnings;
    return j.dump(2);
}

std::string report_to_csv_row(const EvalReport& report, bool with_header) {
    std::string out;
    if (with_header)
        out += "classifier,hyperparameter,accuracy,sensitivity_non_covid,sensitivity_covid,"
               "f_measure,paper_auc,roc_auc\n";
    out += display_name(report.spec.family);
    out.push_back(',');
    char hyper[32];
    std::snprintf(hyper, sizeof hyper, "%g", report.spec.hyperparameter);
    out += hyper;
    for (double v : {report.metrics.accuracy, report.metrics.sensitivity_non_covid,
                     report.metrics.sensitivity_covid, report.metrics.f_measure,
                     report.metrics.paper_auc, report.roc_auc}) {
        out.push_back(',');
        out += four_decimals(v);
    }
    out.push_back('\n');
    return out;
}

} // namespace coughgate
