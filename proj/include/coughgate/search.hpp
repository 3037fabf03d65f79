#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "coughgate/eval.hpp"
#include "coughgate/pipeline.hpp"

namespace coughgate {

enum class SweepAxis {
    FrameLength,
    NMfcc,
    NSegments,
    Sigma,
    Order,
    LdaGamma,
    QdaGamma,
    K,
    Components,
};

const char* to_token(SweepAxis axis); // "frame-length", "sigma", ...
SweepAxis axis_from_token(const std::string& token);
/// File-name form, e.g. "frame_length".
std::string axis_file_stem(SweepAxis axis);

/// The fixed grid for an axis: frame lengths {512,1024,2048,4096}, n_mfcc
/// 2..39, segments 1..50, sigma 0.1..3.0 by 0.1, order 1..4, LDA gamma
/// 0..1 by 0.1, QDA gamma {0,1}, k 1..25, components 2..19.
std::vector<double> sweep_grid(SweepAxis axis);

/// Families evaluated on an axis: all seven for the feature axes, the
/// matching family (both k-NN variants for K) otherwise.
std::vector<Family> axis_families(SweepAxis axis);

struct SweepPoint {
    double value = 0.0;
    std::map<Family, double> accuracy;
};

struct SweepBest {
    double value = 0.0;
    double accuracy = 0.0;
};

struct SweepResult {
    SweepAxis axis = SweepAxis::FrameLength;
    std::vector<SweepPoint> points;
    std::map<Family, SweepBest> best; ///< per-family argmax, ties to the smaller value

    /// Highest accuracy over every (value, family) pair; ties resolve to the
    /// smaller value, then the earlier family in table order.
    SweepBest overall_best() const;
};

struct SweepOptions {
    int threads = 1;
    /// Restrict to these families (must be compatible with the axis;
    /// ConfigError otherwise). Empty means the axis default.
    std::vector<Family> families;
};

/// Reruns LOO-CV over the axis grid with every other parameter held at the
/// base values. Feature axes re-extract features per grid point; classifier
/// axes reuse one extraction.
SweepResult sweep(SweepAxis axis, const AudioDataset& corpus, const PipelineConfig& base,
                  const std::map<Family, ClassifierSpec>& base_specs,
                  const SweepOptions& options = {});

/// Classifier-axis sweep on already-extracted features.
SweepResult sweep_features(SweepAxis axis, const FeatureDataset& features,
                           const std::map<Family, ClassifierSpec>& base_specs,
                           const SweepOptions& options = {});

struct SfsResult {
    ClassifierSpec spec;
    std::vector<int> selection_order;   ///< permutation of 0..M-1
    std::vector<double> accuracy_path;  ///< LOO-CV accuracy after each addition
    int chosen_prefix_size = 0;         ///< smallest prefix reaching the path maximum
    double final_accuracy = 0.0;        ///< max over accuracy_path
};

/// Greedy forward selection over the full feature ranking. Candidate ties
/// resolve to the smallest feature index.
SfsResult sfs(const FeatureDataset& features, const ClassifierSpec& spec, int threads = 1);

struct StudyOptions {
    int threads = 1;
    bool peak_normalize = false;
    /// Starting point for stage 1; the staged winners overwrite the swept
    /// fields as the sequence advances.
    MfccConfig initial_mfcc;
    /// Called with a short note as each stage begins. Never affects results.
    std::function<void(const std::string&)> progress;

    StudyOptions() {
        initial_mfcc.n_mfcc = 13;
        initial_mfcc.n_segments = kSegmentsAll;
    }
};

/// Everything the five-stage sequence produces: the three feature-axis
/// sweeps, the six classifier-axis sweeps, the tuned per-family reports and
/// the per-family forward-selection runs.
struct StudyBundle {
    std::vector<SweepResult> sweeps; ///< in execution order
    MfccConfig tuned_mfcc;
    std::map<Family, ClassifierSpec> tuned_specs;
    std::vector<EvalReport> table3; ///< table order
    std::vector<SfsResult> sfs_results;
};

/// Runs the staged sequence: frame length, MFCC count, segment count, each
/// classifier hyperparameter, then tuned reports plus SFS per family.
/// Deterministic for a fixed corpus regardless of thread count.
StudyBundle reproduce_study(const AudioDataset& corpus, const StudyOptions& options = {});

std::string sweep_to_csv(const SweepResult& result);
std::string sfs_to_json(const SfsResult& result);

/// Bundle directory layout: sweeps/<axis>.csv, table3.csv,
/// sfs/<classifier>.json, reports/<classifier>.json, bundle.json with
/// content hashes. Writes are idempotent for identical inputs.
void write_bundle(const StudyBundle& bundle, const std::filesystem::path& out_dir,
                  const std::string& corpus_fingerprint);

} // namespace coughgate
