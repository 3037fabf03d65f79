#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "coughgate/audio.hpp"
#include "coughgate/classifiers.hpp"
#include "coughgate/dataset.hpp"
#include "coughgate/error.hpp"
#include "coughgate/eval.hpp"
#include "coughgate/manifest.hpp"
#include "coughgate/pipeline.hpp"
#include "coughgate/search.hpp"
#include "coughgate/synth.hpp"
#include "internal/fnv.hpp"

namespace fs = std::filesystem;
using namespace coughgate;

namespace {

struct CorpusOptions {
    std::string manifest;
    std::string base_dir;
    bool synthetic = false;
    std::uint64_t seed = 7;
    int per_class = 20;
};

struct FeatureOptions {
    PipelineConfig pipeline;
    bool no_c0 = false;
};

/// Adds the flags shared by every subcommand that ingests audio.
void add_corpus_options(CLI::App* cmd, CorpusOptions& opts, bool allow_synthetic = true) {
    auto* manifest = cmd->add_option("--manifest", opts.manifest, "corpus manifest CSV");
    cmd->add_option("--base-dir", opts.base_dir,
                    "directory WAV paths are relative to (default: the manifest's directory)");
    if (allow_synthetic) {
        auto* synthetic =
            cmd->add_flag("--synthetic", opts.synthetic, "use the built-in synthetic corpus");
        cmd->add_option("--seed", opts.seed, "synthetic corpus seed")->needs(synthetic);
        cmd->add_option("--per-class", opts.per_class, "synthetic clips per class")
            ->needs(synthetic)
            ->check(CLI::PositiveNumber);
        manifest->excludes(synthetic);
        synthetic->excludes(manifest);
    }
}

void add_feature_options(CLI::App* cmd, FeatureOptions& opts, bool include_swept_axes = true) {
    if (include_swept_axes) {
        cmd->add_option("--frame-length", opts.pipeline.mfcc.frame_length,
                        "analysis frame length in samples (power of two)");
        cmd->add_option("--n-mfcc", opts.pipeline.mfcc.n_mfcc, "number of MFCCs kept");
        cmd->add_option("--n-segments", opts.pipeline.mfcc.n_segments,
                        "frames averaged into the feature vector; 0 averages all");
    }
    cmd->add_option("--n-mel-filters", opts.pipeline.mfcc.n_mel_filters, "mel filter count");
    cmd->add_option("--log-floor", opts.pipeline.mfcc.log_floor, "energy floor before the log");
    cmd->add_flag("--no-c0", opts.no_c0, "drop the overall log-energy coefficient");
    cmd->add_option("--working-rate", opts.pipeline.working_rate,
                    "common sample rate every clip is resampled to");
    cmd->add_flag("--peak-normalize", opts.pipeline.peak_normalize,
                  "scale each clip to unit peak before extraction");
}

PipelineConfig finish_pipeline(const FeatureOptions& opts) {
    PipelineConfig config = opts.pipeline;
    config.mfcc.include_c0 = !opts.no_c0;
    config.mfcc.validate();
    return config;
}

std::string read_file_bytes(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct LoadedCorpus {
    AudioDataset audio;
    std::string fingerprint;
};

LoadedCorpus load_corpus(const CorpusOptions& opts) {
    LoadedCorpus corpus;
    if (opts.synthetic) {
        corpus.audio = synth_corpus(opts.seed, opts.per_class);
        corpus.fingerprint = "synthetic:seed=" + std::to_string(opts.seed) +
                             ":per_class=" + std::to_string(opts.per_class);
        return corpus;
    }
    if (opts.manifest.empty())
        throw ConfigError("either --manifest or --synthetic is required");
    const fs::path manifest_path = opts.manifest;
    const std::string bytes = read_file_bytes(manifest_path);
    const auto entries = parse_manifest(bytes);
    const fs::path base =
        opts.base_dir.empty() ? manifest_path.parent_path() : fs::path(opts.base_dir);
    corpus.audio = load_audio(entries, base);
    corpus.fingerprint = "manifest:" + internal::fnv1a64_hex(bytes);
    return corpus;
}

fs::path ensure_out_dir(const std::string& out_dir) {
    const fs::path dir = out_dir;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (!fs::is_directory(dir)) throw IoError("cannot create output directory '" + dir.string() + "'");
    return dir;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw IoError("failed while writing '" + path.string() + "'");
}

/// Features straight from the cache when present, otherwise extracted and
/// stored. Warnings surface on stderr either way (cached runs saw them once).
FeatureDataset features_via_cache(const LoadedCorpus& corpus, const PipelineConfig& config,
                                  const fs::path& out_dir) {
    const FeatureCache cache = FeatureCache::resolve(out_dir / "feature-cache");
    const std::string key = feature_cache_key(corpus.fingerprint, config);
    if (auto hit = cache.load(key)) {
        std::cerr << "features: cache hit " << key << "\n";
        return std::move(hit->features);
    }
    ExtractionResult result = extract_features(corpus.audio, config);
    for (const auto& warning : result.warnings) std::cerr << "warning: " << warning << "\n";
    cache.store(key, result.features, config);
    std::cerr << "features: extracted and cached as " << key << "\n";
    return std::move(result.features);
}

const std::string& classifier_token_list() {
    static const std::string list = [] {
        std::string names;
        for (Family f : table3_family_order()) {
            if (!names.empty()) names += ", ";
            names += to_token(f);
        }
        return names;
    }();
    return list;
}

Family parse_family(const std::string& token) {
    try {
        return family_from_token(token);
    } catch (const ValidationError&) {
        throw ValidationError("unknown classifier '" + token + "' (valid: " +
                              classifier_token_list() + ")");
    }
}

/// Per-family hyperparameter flags. Only flags the user actually set
/// override the tuned defaults.
struct HyperOptions {
    double sigma = 1.3;
    int order = 3;
    double lda_gamma = 0.6;
    double qda_gamma = 0.0;
    int k = 1;
    int components = 4;
    double svm_cost = 1.0;
    bool standardize = false;

    CLI::Option* sigma_opt = nullptr;
    CLI::Option* order_opt = nullptr;
    CLI::Option* lda_gamma_opt = nullptr;
    CLI::Option* qda_gamma_opt = nullptr;
    CLI::Option* k_opt = nullptr;
    CLI::Option* components_opt = nullptr;
};

void add_hyper_options(CLI::App* cmd, HyperOptions& opts) {
    opts.sigma_opt = cmd->add_option("--sigma", opts.sigma, "RBF kernel width");
    opts.order_opt = cmd->add_option("--order", opts.order, "polynomial kernel order (1-4)");
    opts.lda_gamma_opt = cmd->add_option("--lda-gamma", opts.lda_gamma, "linear LDA shrinkage");
    opts.qda_gamma_opt = cmd->add_option("--qda-gamma", opts.qda_gamma, "quadratic LDA shrinkage");
    opts.k_opt = cmd->add_option("--k", opts.k, "neighbor count");
    opts.components_opt = cmd->add_option("--components", opts.components, "PLS component count");
    cmd->add_option("--svm-cost", opts.svm_cost, "SVM soft-margin cost");
    cmd->add_flag("--standardize", opts.standardize, "z-score features inside each fold");
}

std::map<Family, ClassifierSpec> specs_from_hypers(const HyperOptions& opts) {
    auto specs = tuned_default_specs();
    specs[Family::RbfSvm].hyperparameter = opts.sigma;
    specs[Family::PolySvm].hyperparameter = opts.order;
    specs[Family::LinearLda].hyperparameter = opts.lda_gamma;
    specs[Family::QuadraticLda].hyperparameter = opts.qda_gamma;
    specs[Family::KnnEuclidean].hyperparameter = opts.k;
    specs[Family::KnnChebyshev].hyperparameter = opts.k;
    specs[Family::Plsr].hyperparameter = opts.components;
    for (auto& [family, spec] : specs) {
        if (family == Family::PolySvm || family == Family::RbfSvm) spec.svm_cost = opts.svm_cost;
        spec.standardize = opts.standardize;
        spec.validate();
    }
    return specs;
}

int run_extract(const CorpusOptions& corpus_opts, const FeatureOptions& feature_opts,
                const std::string& out_dir) {
    const PipelineConfig config = finish_pipeline(feature_opts);
    const fs::path out = ensure_out_dir(out_dir);
    const LoadedCorpus corpus = load_corpus(corpus_opts);

    ExtractionResult result = extract_features(corpus.audio, config);
    for (const auto& warning : result.warnings) std::cerr << "warning: " << warning << "\n";
    write_features(out / "features.json", result.features, config);
    write_text(out / "features.csv", features_to_csv(result.features));

    std::cout << "rows: " << result.features.size()
              << " (covid " << result.features.count(Label::Covid) << ", non_covid "
              << result.features.count(Label::NonCovid) << ")\n"
              << "wrote " << (out / "features.json").string() << "\n";
    return 0;
}

int run_evaluate(const CorpusOptions& corpus_opts, const FeatureOptions& feature_opts,
                 const HyperOptions& hyper_opts, const std::string& features_path,
                 const std::vector<std::string>& classifier_tokens, bool all_classifiers,
                 const std::string& out_dir, int threads) {
    const fs::path out = ensure_out_dir(out_dir);

    FeatureDataset features;
    std::optional<MfccConfig> mfcc_used;
    if (!features_path.empty()) {
        FeatureFile file = load_features(features_path);
        features = std::move(file.features);
        mfcc_used = file.config.mfcc;
    } else {
        const PipelineConfig config = finish_pipeline(feature_opts);
        features = features_via_cache(load_corpus(corpus_opts), config, out);
        mfcc_used = config.mfcc;
    }

    std::vector<Family> families;
    if (all_classifiers) {
        const auto order = table3_family_order();
        families.assign(order.begin(), order.end());
    } else {
        if (classifier_tokens.empty())
            throw ConfigError("pass --classifier (repeatable) or --all-classifiers");
        for (const auto& token : classifier_tokens) families.push_back(parse_family(token));
    }

    const auto specs = specs_from_hypers(hyper_opts);
    std::string table;
    bool first = true;
    for (Family f : families) {
        std::cerr << "evaluate " << to_token(f) << "\n";
        EvalReport report = loocv(features, specs.at(f), threads);
        report.mfcc_config = mfcc_used;
        for (const auto& warning : report.warnings) std::cerr << "warning: " << warning << "\n";
        write_text(out / ("report-" + std::string(to_token(f)) + ".json"), report_to_json(report));
        table += report_to_csv_row(report, first);
        first = false;
    }
    write_text(out / "table3.csv", table);
    std::cout << table;
    return 0;
}

int run_grid(const CorpusOptions& corpus_opts, const FeatureOptions& feature_opts,
             const std::string& features_path, const std::string& axis_token,
             const std::vector<std::string>& classifier_tokens, const std::string& out_dir,
             int threads) {
    const SweepAxis axis = axis_from_token(axis_token);
    SweepOptions options;
    options.threads = threads;
    for (const auto& token : classifier_tokens) options.families.push_back(parse_family(token));
    // Fail an axis/classifier mismatch before any feature work happens.
    if (!options.families.empty()) {
        const auto allowed = axis_families(axis);
        for (Family f : options.families)
            if (std::find(allowed.begin(), allowed.end(), f) == allowed.end())
                throw ConfigError(std::string(display_name(f)) + " is not swept by axis " +
                                  to_token(axis));
    }

    const fs::path out = ensure_out_dir(out_dir);
    const bool feature_axis = axis == SweepAxis::FrameLength || axis == SweepAxis::NMfcc ||
                              axis == SweepAxis::NSegments;

    std::cerr << "sweep " << to_token(axis) << "\n";
    SweepResult result;
    if (!features_path.empty()) {
        if (feature_axis)
            throw ConfigError(std::string("axis ") + to_token(axis) +
                              " re-extracts features; pass --manifest or --synthetic instead of --features");
        result = sweep_features(axis, load_features(features_path).features,
                                sweep_phase_specs(), options);
    } else {
        const PipelineConfig config = finish_pipeline(feature_opts);
        const LoadedCorpus corpus = load_corpus(corpus_opts);
        if (feature_axis) {
            result = sweep(axis, corpus.audio, config, sweep_phase_specs(), options);
        } else {
            const FeatureDataset features = features_via_cache(corpus, config, out);
            result = sweep_features(axis, features, sweep_phase_specs(), options);
        }
    }

    std::error_code ec;
    fs::create_directories(out / "sweeps", ec);
    const fs::path csv_path = out / "sweeps" / (axis_file_stem(axis) + ".csv");
    write_text(csv_path, sweep_to_csv(result));
    for (const auto& [family, best] : result.best) {
        char line[160];
        std::snprintf(line, sizeof line, "%s: best %s = %g at accuracy %.4f\n",
                      display_name(family), to_token(axis), best.value, best.accuracy);
        std::cout << line;
    }
    std::cout << "wrote " << csv_path.string() << "\n";
    return 0;
}

int run_sfs(const CorpusOptions& corpus_opts, const FeatureOptions& feature_opts,
            const HyperOptions& hyper_opts, const std::string& features_path,
            const std::string& classifier_token, const std::string& out_dir, int threads) {
    const Family family = parse_family(classifier_token);
    const fs::path out = ensure_out_dir(out_dir);

    FeatureDataset features;
    if (!features_path.empty()) {
        features = load_features(features_path).features;
    } else {
        const PipelineConfig config = finish_pipeline(feature_opts);
        features = features_via_cache(load_corpus(corpus_opts), config, out);
    }

    std::cerr << "forward selection " << to_token(family) << "\n";
    const SfsResult result = sfs(features, specs_from_hypers(hyper_opts).at(family), threads);

    std::error_code ec;
    fs::create_directories(out / "sfs", ec);
    const fs::path json_path = out / "sfs" / (std::string(to_token(family)) + ".json");
    write_text(json_path, sfs_to_json(result));
    char line[160];
    std::snprintf(line, sizeof line, "%s: %d of %zu features, accuracy %.4f\n",
                  display_name(family), result.chosen_prefix_size, result.selection_order.size(),
                  result.final_accuracy);
    std::cout << line << "wrote " << json_path.string() << "\n";
    return 0;
}

int run_reproduce(const CorpusOptions& corpus_opts, const FeatureOptions& feature_opts,
                  const std::string& out_dir, int threads) {
    const fs::path out = ensure_out_dir(out_dir);
    const LoadedCorpus corpus = load_corpus(corpus_opts);

    StudyOptions options;
    options.threads = threads;
    options.peak_normalize = feature_opts.pipeline.peak_normalize;
    options.initial_mfcc.n_mel_filters = feature_opts.pipeline.mfcc.n_mel_filters;
    options.initial_mfcc.log_floor = feature_opts.pipeline.mfcc.log_floor;
    options.initial_mfcc.include_c0 = !feature_opts.no_c0;
    options.progress = [](const std::string& note) { std::cerr << note << "\n"; };

    const StudyBundle bundle = reproduce_study(corpus.audio, options);
    write_bundle(bundle, out, corpus.fingerprint);

    std::cout << "tuned: frame_length " << bundle.tuned_mfcc.frame_length << ", n_mfcc "
              << bundle.tuned_mfcc.n_mfcc << ", n_segments " << bundle.tuned_mfcc.n_segments
              << "\n";
    for (const EvalReport& report : bundle.table3) {
        char line[160];
        std::snprintf(line, sizeof line, "%s: accuracy %.4f\n", display_name(report.spec.family),
                      report.metrics.accuracy);
        std::cout << line;
    }
    std::cout << "bundle written to " << out.string() << "\n";
    return 0;
}

int run_synth(std::uint64_t seed, int per_class, const std::string& out_dir) {
    const fs::path out = ensure_out_dir(out_dir);
    const AudioDataset corpus = synth_corpus(seed, per_class);

    std::vector<ManifestEntry> entries;
    for (const auto& row : corpus.rows) {
        write_wav(out / row.clip.source_id, row.clip, WavFormat::Float32);
        ManifestEntry entry;
        entry.path = row.clip.source_id;
        entry.label = row.label;
        entry.dataset = SourceDataset::Synthetic;
        entries.push_back(std::move(entry));
    }
    write_manifest(out / "manifest.csv", entries);
    std::cout << "wrote " << corpus.rows.size() << " clips and " << (out / "manifest.csv").string()
              << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"single-cough classification experiment engine"};
    app.require_subcommand(1);
    app.fallthrough(); // --threads may follow the subcommand name
    int threads = 1;
    app.add_option("--threads", threads, "worker threads (results are identical for any value)")
        ->check(CLI::PositiveNumber);

    CorpusOptions corpus_opts;
    FeatureOptions feature_opts;
    HyperOptions hyper_opts;
    std::string out_dir = "out";
    std::string features_path;
    std::vector<std::string> classifier_tokens;
    bool all_classifiers = false;
    std::string axis_token;
    std::string sfs_classifier;
    std::uint64_t synth_seed = 7;
    int synth_per_class = 20;

    auto* extract = app.add_subcommand("extract", "extract MFCC features to a JSON document");
    add_corpus_options(extract, corpus_opts);
    add_feature_options(extract, feature_opts);
    extract->add_option("--out-dir", out_dir, "output directory");

    auto* evaluate = app.add_subcommand("evaluate", "LOO-CV metrics for chosen classifiers");
    add_corpus_options(evaluate, corpus_opts);
    add_feature_options(evaluate, feature_opts);
    add_hyper_options(evaluate, hyper_opts);
    evaluate->add_option("--features", features_path, "reuse an extracted feature file");
    evaluate->add_option("--classifier", classifier_tokens,
                         "classifier token (repeatable): " + classifier_token_list());
    evaluate->add_flag("--all-classifiers", all_classifiers, "evaluate all seven families");
    evaluate->add_option("--out-dir", out_dir, "output directory");

    auto* grid = app.add_subcommand("grid", "sweep one hyperparameter axis");
    add_corpus_options(grid, corpus_opts);
    add_feature_options(grid, feature_opts);
    grid->add_option("--axis", axis_token,
                     "frame-length, n-mfcc, n-segments, sigma, order, lda-gamma, qda-gamma, k, "
                     "components")
        ->required();
    grid->add_option("--features", features_path, "reuse an extracted feature file");
    grid->add_option("--classifier", classifier_tokens, "restrict to these classifiers");
    grid->add_option("--out-dir", out_dir, "output directory");

    auto* sfs_cmd = app.add_subcommand("sfs", "sequential forward feature selection");
    add_corpus_options(sfs_cmd, corpus_opts);
    add_feature_options(sfs_cmd, feature_opts);
    add_hyper_options(sfs_cmd, hyper_opts);
    sfs_cmd->add_option("--features", features_path, "reuse an extracted feature file");
    sfs_cmd->add_option("--classifier", sfs_classifier, "classifier token")->required();
    sfs_cmd->add_option("--out-dir", out_dir, "output directory");

    auto* reproduce = app.add_subcommand("reproduce", "run the full staged study");
    add_corpus_options(reproduce, corpus_opts);
    add_feature_options(reproduce, feature_opts, /*include_swept_axes=*/false);
    reproduce->add_option("--out-dir", out_dir, "bundle output directory");

    auto* synth = app.add_subcommand("synth", "write a synthetic corpus with its manifest");
    synth->add_option("--seed", synth_seed, "generator seed");
    synth->add_option("--per-class", synth_per_class, "clips per class")->check(CLI::PositiveNumber);
    synth->add_option("--out-dir", out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return 2;
    }

    try {
        if (extract->parsed()) return run_extract(corpus_opts, feature_opts, out_dir);
        if (evaluate->parsed())
            return run_evaluate(corpus_opts, feature_opts, hyper_opts, features_path,
                                classifier_tokens, all_classifiers, out_dir, threads);
        if (grid->parsed())
            return run_grid(corpus_opts, feature_opts, features_path, axis_token,
                            classifier_tokens, out_dir, threads);
        if (sfs_cmd->parsed())
            return run_sfs(corpus_opts, feature_opts, hyper_opts, features_path, sfs_classifier,
                           out_dir, threads);
        if (reproduce->parsed()) return run_reproduce(corpus_opts, feature_opts, out_dir, threads);
        if (synth->parsed()) return run_synth(synth_seed, synth_per_class, out_dir);
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const UnsupportedFormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
