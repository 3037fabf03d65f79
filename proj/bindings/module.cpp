// Python surface for the experiment engine. Thin by design: plain lists and
// dicts in, plain structures out, with the C++ layer doing all the numerics.
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "coughgate/classifiers.hpp"
#include "coughgate/dataset.hpp"
#include "coughgate/error.hpp"
#include "coughgate/eval.hpp"
#include "coughgate/manifest.hpp"
#include "coughgate/mfcc.hpp"
#include "coughgate/pipeline.hpp"
#include "coughgate/search.hpp"
#include "coughgate/synth.hpp"

namespace py = pybind11;
using namespace coughgate;

namespace {

ClassifierSpec make_spec(const std::string& classifier, double hyperparameter, double svm_cost,
                         bool standardize) {
    ClassifierSpec spec;
    spec.family = family_from_token(classifier);
    spec.hyperparameter = hyperparameter;
    spec.svm_cost = svm_cost;
    spec.standardize = standardize;
    spec.validate();
    return spec;
}

MfccConfig make_mfcc_config(int frame_length, int n_mfcc, int n_segments, bool include_c0) {
    MfccConfig config;
    config.frame_length = frame_length;
    config.n_mfcc = n_mfcc;
    config.n_segments = n_segments;
    config.include_c0 = include_c0;
    config.validate();
    return config;
}

FeatureDataset dataset_from_lists(const std::vector<std::vector<double>>& rows,
                                  const std::vector<std::string>& labels) {
    if (rows.size() != labels.size())
        throw ValidationError("rows and labels must have equal length");
    FeatureDataset data;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        FeatureVector row;
        row.values = rows[i];
        row.label = label_from_token(labels[i]);
        row.source_id = "row_" + std::to_string(i);
        data.rows.push_back(std::move(row));
    }
    return data;
}

py::dict metrics_dict(const MetricSet& m) {
    py::dict out;
    out["accuracy"] = m.accuracy;
    out["sensitivity_non_covid"] = m.sensitivity_non_covid;
    out["sensitivity_covid"] = m.sensitivity_covid;
    out["f_measure"] = m.f_measure;
    out["paper_auc"] = m.paper_auc;
    return out;
}

py::dict dataset_dict(const FeatureDataset& data) {
    std::vector<std::vector<double>> values;
    std::vector<std::string> labels;
    std::vector<std::string> ids;
    for (const auto& row : data.rows) {
        values.push_back(row.values);
        labels.push_back(to_token(row.label));
        ids.push_back(row.source_id);
    }
    py::dict out;
    out["values"] = values;
    out["labels"] = labels;
    out["source_ids"] = ids;
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Single-cough classification experiment engine";

    // Input-contract violations read as ValueError on the Python side; the
    // remaining domain errors keep the default RuntimeError mapping.
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const ValidationError& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        } catch (const ConfigError& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        } catch (const ParseError& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        }
    });

    m.def("mel_scale", &mel_scale, py::arg("hz"), "Hz to mel");
    m.def("mel_scale_inv", &mel_scale_inv, py::arg("mel"), "mel to Hz");
    m.def("hamming_window", &hamming_window, py::arg("n"), "Periodic Hamming window of length n");
    m.def(
        "power_spectrum",
        [](const std::vector<double>& frame) { return power_spectrum(frame); }, py::arg("frame"),
        "One-sided power spectrum of a power-of-two frame");
    m.def(
        "dct2", [](const std::vector<double>& x, int n_out) { return dct2_orthonormal(x, n_out); },
        py::arg("x"), py::arg("n_out"), "Orthonormal DCT-II, first n_out coefficients");

    m.def(
        "kernel_eval",
        [](const std::string& classifier, double hyperparameter, const std::vector<double>& a,
           const std::vector<double>& b) {
            return kernel_eval(family_from_token(classifier), hyperparameter, a, b);
        },
        py::arg("classifier"), py::arg("hyperparameter"), py::arg("a"), py::arg("b"),
        "SVM kernel value for 'poly-svm' or 'rbf-svm'");

    m.def(
        "confusion_metrics",
        [](long tp_non_covid, long fn_non_covid, long tp_covid, long fn_covid) {
            ConfusionMatrix cm;
            cm.tp_nc = tp_non_covid;
            cm.fn_nc = fn_non_covid;
            cm.tp_c = tp_covid;
            cm.fn_c = fn_covid;
            return metrics_dict(metrics(cm));
        },
        py::arg("tp_non_covid"), py::arg("fn_non_covid"), py::arg("tp_covid"), py::arg("fn_covid"),
        "Reference metric set from confusion counts");

    m.def(
        "roc_auc",
        [](const std::vector<double>& scores, const std::vector<std::string>& labels) {
            std::vector<Label> truths;
            truths.reserve(labels.size());
            for (const auto& token : labels) truths.push_back(label_from_token(token));
            return roc_auc(scores, truths);
        },
        py::arg("scores"), py::arg("labels"),
        "Threshold-free ROC AUC with midrank tie handling; labels are "
        "'covid' / 'non_covid' tokens");

    m.def(
        "synthetic_features",
        [](std::uint64_t seed, int per_class, int frame_length, int n_mfcc, int n_segments,
           bool include_c0) {
            PipelineConfig config;
            config.mfcc = make_mfcc_config(frame_length, n_mfcc, n_segments, include_c0);
            return dataset_dict(extract_features(synth_corpus(seed, per_class), config).features);
        },
        py::arg("seed"), py::arg("per_class"), py::arg("frame_length") = 2048,
        py::arg("n_mfcc") = 19, py::arg("n_segments") = 17, py::arg("include_c0") = true,
        "Deterministic labeled feature rows from the built-in waveform generator");

    m.def(
        "loocv",
        [](const std::vector<std::vector<double>>& rows, const std::vector<std::string>& labels,
           const std::string& classifier, double hyperparameter, double svm_cost,
           bool standardize, int threads) {
            const auto report = loocv(dataset_from_lists(rows, labels),
                                      make_spec(classifier, hyperparameter, svm_cost, standardize),
                                      threads);
            py::dict out = metrics_dict(report.metrics);
            out["roc_auc"] = report.roc_auc;
            out["warnings"] = report.warnings;
            std::vector<double> scores;
            std::vector<std::string> predicted;
            for (const auto& p : report.predictions) {
                scores.push_back(p.score);
                predicted.push_back(to_token(p.predicted));
            }
            out["scores"] = scores;
            out["predictions"] = predicted;
            return out;
        },
        py::arg("rows"), py::arg("labels"), py::arg("classifier"), py::arg("hyperparameter"),
        py::arg("svm_cost") = 1.0, py::arg("standardize") = false, py::arg("threads") = 1,
        "Leave-one-out cross-validation; labels are 'covid' / 'non_covid' tokens");

    m.def(
        "sfs",
        [](const std::vector<std::vector<double>>& rows, const std::vector<std::string>& labels,
           const std::string& classifier, double hyperparameter, int threads) {
            const auto result = sfs(dataset_from_lists(rows, labels),
                                    make_spec(classifier, hyperparameter, 1.0, false), threads);
            py::dict out;
            out["selection_order"] = result.selection_order;
            out["accuracy_path"] = result.accuracy_path;
            out["chosen_prefix_size"] = result.chosen_prefix_size;
            out["final_accuracy"] = result.final_accuracy;
            return out;
        },
        py::arg("rows"), py::arg("labels"), py::arg("classifier"), py::arg("hyperparameter"),
        py::arg("threads") = 1, "Greedy forward feature selection under LOO-CV accuracy");

    m.def("classifier_tokens", [] {
        std::vector<std::string> tokens;
        for (Family family : table3_family_order()) tokens.emplace_back(to_token(family));
        return tokens;
    });

    m.attr("__version__") = "1.0.0";
}
