#include "coughgate/search.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "coughgate/error.hpp"
#include "internal/fnv.hpp"
#include "internal/parallel.hpp"

namespace coughgate {

namespace {

using nlohmann::json;

constexpr SweepAxis kAllAxes[] = {SweepAxis::FrameLength, SweepAxis::NMfcc,
                                  SweepAxis::NSegments,   SweepAxis::Sigma,
                                  SweepAxis::Order,       SweepAxis::LdaGamma,
                                  SweepAxis::QdaGamma,    SweepAxis::K,
                                  SweepAxis::Components};

bool is_feature_axis(SweepAxis axis) {
    return axis == SweepAxis::FrameLength || axis == SweepAxis::NMfcc ||
           axis == SweepAxis::NSegments;
}

std::vector<Family> resolve_families(SweepAxis axis, const SweepOptions& options) {
    const std::vector<Family> allowed = axis_families(axis);
    if (options.families.empty()) return allowed;
    for (Family f : options.families)
        if (std::find(allowed.begin(), allowed.end(), f) == allowed.end())
            throw ConfigError(std::string(display_name(f)) + " is not swept by axis " +
                              to_token(axis));
    return options.families;
}

const ClassifierSpec& base_spec_for(const std::map<Family, ClassifierSpec>& base_specs,
                                    Family family) {
    const auto it = base_specs.find(family);
    if (it == base_specs.end())
        throw ConfigError(std::string("no base spec for ") + display_name(family));
    return it->second;
}

/// Shared tail of every sweep: evaluate each family at fixed features.
void eval_point(SweepPoint& point, const FeatureDataset& features,
                const std::vector<Family>& families,
                const std::map<Family, ClassifierSpec>& base_specs, int threads) {
    for (Family f : families) {
        const ClassifierSpec& spec = base_spec_for(base_specs, f);
        point.accuracy[f] = loocv(features, spec, threads).metrics.accuracy;
    }
}

void fill_best(SweepResult& result) {
    for (const SweepPoint& point : result.points) {
        for (const auto& [family, accuracy] : point.accuracy) {
            auto it = result.best.find(family);
            if (it == result.best.end())
                result.best[family] = {point.value, accuracy};
            else if (accuracy > it->second.accuracy)
                it->second = {point.value, accuracy};
        }
    }
}

std::string json_number(double v) { return json(v).dump(); }

/// Integer-valued axes print bare integers in CSV; the real-valued ones keep
/// the shortest round-trip form.
std::string grid_value_string(SweepAxis axis, double v) {
    switch (axis) {
        case SweepAxis::Sigma:
        case SweepAxis::LdaGamma:
        case SweepAxis::QdaGamma:
            return json_number(v);
        default:
            return std::to_string(static_cast<long>(std::llround(v)));
    }
}

json mfcc_config_to_json(const MfccConfig& c) {
    return json{{"frame_length", c.frame_length}, {"n_mfcc", c.n_mfcc},
                {"n_segments", c.n_segments},     {"n_mel_filters", c.n_mel_filters},
                {"log_floor", c.log_floor},       {"include_c0", c.include_c0}};
}

json spec_to_json(const ClassifierSpec& spec) {
    return json{{"family", to_token(spec.family)},
                {"hyperparameter", spec.hyperparameter},
                {"svm_cost", spec.svm_cost},
                {"standardize", spec.standardize}};
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw IoError("failed while writing '" + path.string() + "'");
}

} // namespace

const char* to_token(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::FrameLength: return "frame-length";
        case SweepAxis::NMfcc: return "n-mfcc";
        case SweepAxis::NSegments: return "n-segments";
        case SweepAxis::Sigma: return "sigma";
        case SweepAxis::Order: return "order";
        case SweepAxis::LdaGamma: return "lda-gamma";
        case SweepAxis::QdaGamma: return "qda-gamma";
        case SweepAxis::K: return "k";
        case SweepAxis::Components: return "components";
    }
    return "frame-length";
}

SweepAxis axis_from_token(const std::string& token) {
    for (SweepAxis axis : kAllAxes)
        if (token == to_token(axis)) return axis;
    throw ValidationError("unknown sweep axis '" + token + "'");
}

std::string axis_file_stem(SweepAxis axis) {
    std::string stem = to_token(axis);
    std::replace(stem.begin(), stem.end(), '-', '_');
    return stem;
}

std::vector<double> sweep_grid(SweepAxis axis) {
    std::vector<double> grid;
    switch (axis) {
        case SweepAxis::FrameLength: return {512.0, 1024.0, 2048.0, 4096.0};
        case SweepAxis::NMfcc:
            for (int m = 2; m <= 39; ++m) grid.push_back(m);
            return grid;
        case SweepAxis::NSegments:
            for (int s = 1; s <= 50; ++s) grid.push_back(s);
            return grid;
        case SweepAxis::Sigma:
            for (int i = 1; i <= 30; ++i) grid.push_back(i / 10.0);
            return grid;
        case SweepAxis::Order: return {1.0, 2.0, 3.0, 4.0};
        case SweepAxis::LdaGamma:
            for (int i = 0; i <= 10; ++i) grid.push_back(i / 10.0);
            return grid;
        case SweepAxis::QdaGamma: return {0.0, 1.0};
        case SweepAxis::K:
            for (int k = 1; k <= 25; ++k) grid.push_back(k);
            return grid;
        case SweepAxis::Components:
            for (int c = 2; c <= 19; ++c) grid.push_back(c);
            return grid;
    }
    throw ConfigError("unknown sweep axis");
}

std::vector<Family> axis_families(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::FrameLength:
        case SweepAxis::NMfcc:
        case SweepAxis::NSegments: {
            const auto order = table3_family_order();
            return {order.begin(), order.end()};
        }
        case SweepAxis::Sigma: return {Family::RbfSvm};
        case SweepAxis::Order: return {Family::PolySvm};
        case SweepAxis::LdaGamma: return {Family::LinearLda};
        case SweepAxis::QdaGamma: return {Family::QuadraticLda};
        case SweepAxis::K: return {Family::KnnEuclidean, Family::KnnChebyshev};
        case SweepAxis::Components: return {Family::Plsr};
    }
    throw ConfigError("unknown sweep axis");
}

SweepBest SweepResult::overall_best() const {
    SweepBest best{0.0, -1.0};
    for (const SweepPoint& point : points)
        for (Family f : table3_family_order()) {
            const auto it = point.accuracy.find(f);
            if (it != point.accuracy.end() && it->second > best.accuracy)
                best = {point.value, it->second};
        }
    if (best.accuracy < 0.0) throw ValidationError("overall_best on an empty sweep");
    return best;
}

SweepResult sweep_features(SweepAxis axis, const FeatureDataset& features,
                           const std::map<Family, ClassifierSpec>& base_specs,
                           const SweepOptions& options) {
    if (is_feature_axis(axis))
        throw ConfigError(std::string("axis ") + to_token(axis) +
                          " changes feature extraction; sweep it from the audio corpus");
    features.validate_for_eval();
    const auto families = resolve_families(axis, options);
    const auto grid = sweep_grid(axis);

    SweepResult result;
    result.axis = axis;
    result.points.resize(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g) {
        SweepPoint& point = result.points[g];
        point.value = grid[g];
        for (Family f : families) {
            ClassifierSpec spec = base_spec_for(base_specs, f);
            spec.hyperparameter = grid[g];
            point.accuracy[f] = loocv(features, spec, options.threads).metrics.accuracy;
        }
    }
    fill_best(result);
    return result;
}

SweepResult sweep(SweepAxis axis, const AudioDataset& corpus, const PipelineConfig& base,
                  const std::map<Family, ClassifierSpec>& base_specs,
                  const SweepOptions& options) {
    if (!is_feature_axis(axis)) {
        const FeatureDataset features = extract_features(corpus, base).features;
        return sweep_features(axis, features, base_specs, options);
    }

    const auto families = resolve_families(axis, options);
    const auto grid = sweep_grid(axis);
    SweepResult result;
    result.axis = axis;
    result.points.resize(grid.size());

    if (axis == SweepAxis::FrameLength) {
        for (std::size_t g = 0; g < grid.size(); ++g) {
            PipelineConfig config = base;
            config.mfcc.frame_length = static_cast<int>(grid[g]);
            const FeatureDataset features = extract_features(corpus, config).features;
            result.points[g].value = grid[g];
            eval_point(result.points[g], features, families, base_specs, options.threads);
        }
    } else if (axis == SweepAxis::NMfcc) {
        // One extraction at the top of the grid; smaller counts are prefixes
        // of the same orthonormal-DCT coefficient sequence.
        PipelineConfig wide = base;
        wide.mfcc.n_mfcc = static_cast<int>(grid.back());
        const FeatureDataset full = extract_features(corpus, wide).features;
        for (std::size_t g = 0; g < grid.size(); ++g) {
            const auto m = static_cast<std::size_t>(grid[g]);
            FeatureDataset sliced;
            sliced.rows.reserve(full.rows.size());
            for (const auto& row : full.rows) {
                FeatureVector fv;
                fv.label = row.label;
                fv.source_id = row.source_id;
                fv.values.assign(row.values.begin(), row.values.begin() + static_cast<long>(m));
                sliced.rows.push_back(std::move(fv));
            }
            result.points[g].value = grid[g];
            eval_point(result.points[g], sliced, families, base_specs, options.threads);
        }
    } else { // NSegments: reuse each clip's MFCC matrix across the grid
        corpus.validate();
        base.mfcc.validate();
        const MelFilterbank filterbank =
            mel_filterbank(base.mfcc.n_mel_filters, base.mfcc.fft_size(), base.working_rate);
        std::vector<MfccMatrix> matrices;
        matrices.reserve(corpus.rows.size());
        for (const auto& row : corpus.rows) {
            AudioClip clip = resample(row.clip, base.working_rate);
            if (base.peak_normalize) clip = peak_normalize(clip);
            matrices.push_back(extract_mfcc(clip, base.mfcc, &filterbank));
        }
        for (std::size_t g = 0; g < grid.size(); ++g) {
            const auto s = static_cast<int>(grid[g]);
            FeatureDataset features;
            features.rows.reserve(corpus.rows.size());
            for (std::size_t i = 0; i < corpus.rows.size(); ++i) {
                FeatureVector fv;
                fv.values = segment_average(matrices[i], s);
                fv.label = corpus.rows[i].label;
                fv.source_id = corpus.rows[i].clip.source_id;
                features.rows.push_back(std::move(fv));
            }
            result.points[g].value = grid[g];
            eval_point(result.points[g], features, families, base_specs, options.threads);
        }
    }
    fill_best(result);
    return result;
}

SfsResult sfs(const FeatureDataset& features, const ClassifierSpec& spec, int threads) {
    spec.validate();
    features.validate_for_eval();
    const auto width = static_cast<int>(features.n_features());
    if (width < 2) throw ValidationError("forward selection needs at least two features");

    SfsResult result;
    result.spec = spec;
    std::vector<int> remaining(static_cast<std::size_t>(width));
    for (int i = 0; i < width; ++i) remaining[static_cast<std::size_t>(i)] = i;
    std::vector<int> selected;

    while (!remaining.empty()) {
        std::vector<double> accuracy(remaining.size());
        internal::parallel_for(remaining.size(), threads, [&](std::size_t c) {
            std::vector<int> candidate = selected;
            candidate.push_back(remaining[c]);
            accuracy[c] = loocv(features.select_features(candidate), spec, 1).metrics.accuracy;
        });
        // remaining is ascending, so strict improvement keeps the smallest index.
        std::size_t pick = 0;
        for (std::size_t c = 1; c < remaining.size(); ++c)
            if (accuracy[c] > accuracy[pick]) pick = c;

        selected.push_back(remaining[pick]);
        result.selection_order.push_back(remaining[pick]);
        result.accuracy_path.push_back(accuracy[pick]);
        remaining.erase(remaining.begin() + static_cast<long>(pick));
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i < result.accuracy_path.size(); ++i)
        if (result.accuracy_path[i] > result.accuracy_path[best]) best = i;
    result.chosen_prefix_size = static_cast<int>(best) + 1;
    result.final_accuracy = result.accuracy_path[best];
    return result;
}

StudyBundle reproduce_study(const AudioDataset& corpus, const StudyOptions& options) {
    StudyBundle bundle;
    SweepOptions sweep_options;
    sweep_options.threads = options.threads;
    const auto note = [&options](const std::string& text) {
        if (options.progress) options.progress(text);
    };

    PipelineConfig config;
    config.mfcc = options.initial_mfcc;
    config.peak_normalize = options.peak_normalize;
    const auto phase_specs = sweep_phase_specs();

    // Stage 1-3: fix the feature axes one at a time at the best accuracy
    // seen across all seven families (ties to the smaller value).
    for (SweepAxis axis : {SweepAxis::FrameLength, SweepAxis::NMfcc, SweepAxis::NSegments}) {
        note(std::string("sweep ") + to_token(axis));
        SweepResult result = sweep(axis, corpus, config, phase_specs, sweep_options);
        const int winner = static_cast<int>(result.overall_best().value);
        if (axis == SweepAxis::FrameLength) config.mfcc.frame_length = winner;
        else if (axis == SweepAxis::NMfcc) config.mfcc.n_mfcc = winner;
        else config.mfcc.n_segments = winner;
        note(std::string(to_token(axis)) + " fixed at " + std::to_string(winner));
        bundle.sweeps.push_back(std::move(result));
    }
    bundle.tuned_mfcc = config.mfcc;

    // Stage 4: classifier hyperparameters on the tuned features.
    const FeatureDataset features = extract_features(corpus, config).features;
    bundle.tuned_specs = phase_specs;
    for (SweepAxis axis : {SweepAxis::Sigma, SweepAxis::Order, SweepAxis::LdaGamma,
                           SweepAxis::QdaGamma, SweepAxis::K, SweepAxis::Components}) {
        note(std::string("sweep ") + to_token(axis));
        SweepResult result = sweep_features(axis, features, phase_specs, sweep_options);
        for (const auto& [family, best] : result.best)
            bundle.tuned_specs[family].hyperparameter = best.value;
        bundle.sweeps.push_back(std::move(result));
    }

    // Stage 5: tuned reports in table order, then forward selection per family.
    note("tuned evaluation");
    for (Family f : table3_family_order()) {
        EvalReport report = loocv(features, bundle.tuned_specs.at(f), options.threads);
        report.mfcc_config = bundle.tuned_mfcc;
        bundle.table3.push_back(std::move(report));
    }
    for (Family f : table3_family_order()) {
        note(std::string("forward selection ") + to_token(f));
        bundle.sfs_results.push_back(sfs(features, bundle.tuned_specs.at(f), options.threads));
    }
    return bundle;
}

std::string sweep_to_csv(const SweepResult& result) {
    const auto order =
        result.axis == SweepAxis::FrameLength ? table2_family_order() : table3_family_order();
    std::vector<Family> families;
    for (Family f : order)
        if (!result.points.empty() &&
            result.points.front().accuracy.find(f) != result.points.front().accuracy.end())
            families.push_back(f);

    std::string out = axis_file_stem(result.axis);
    for (Family f : families) {
        out.push_back(',');
        out += display_name(f);
    }
    out.push_back('\n');
    for (const SweepPoint& point : result.points) {
        out += grid_value_string(result.axis, point.value);
        for (Family f : families) {
            out.push_back(',');
            out += json_number(point.accuracy.at(f));
        }
        out.push_back('\n');
    }
    return out;
}

std::string sfs_to_json(const SfsResult& result) {
    json j;
    j["schema_version"] = 1;
    j["classifier"] = to_token(result.spec.family);
    j["hyperparameter"] = result.spec.hyperparameter;
    j["selection_order"] = result.selection_order;
    j["accuracy_path"] = result.accuracy_path;
    j["chosen_prefix_size"] = result.chosen_prefix_size;
    j["final_accuracy"] = result.final_accuracy;
    return j.dump(2);
}

void write_bundle(const StudyBundle& bundle, const std::filesystem::path& out_dir,
                  const std::string& corpus_fingerprint) {
    if (bundle.table3.empty()) throw ValidationError("bundle holds no tuned reports");
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir / "sweeps", ec);
    fs::create_directories(out_dir / "reports", ec);
    fs::create_directories(out_dir / "sfs", ec);
    if (!fs::is_directory(out_dir / "sfs"))
        throw IoError("cannot create bundle directory '" + out_dir.string() + "'");

    std::map<std::string, std::string> hashes;
    const auto emit = [&](const std::string& rel, const std::string& text) {
        write_text_file(out_dir / rel, text);
        hashes[rel] = internal::fnv1a64_hex(text);
    };

    for (const SweepResult& sweep_result : bundle.sweeps)
        emit("sweeps/" + axis_file_stem(sweep_result.axis) + ".csv", sweep_to_csv(sweep_result));

    std::string table3 = report_to_csv_row(bundle.table3.front(), true);
    for (std::size_t i = 1; i < bundle.table3.size(); ++i)
        table3 += report_to_csv_row(bundle.table3[i], false);
    emit("table3.csv", table3);

    for (const EvalReport& report : bundle.table3)
        emit("reports/" + std::string(to_token(report.spec.family)) + ".json",
             report_to_json(report));
    for (const SfsResult& result : bundle.sfs_results)
        emit("sfs/" + std::string(to_token(result.spec.family)) + ".json", sfs_to_json(result));

    json manifest;
    manifest["schema_version"] = 1;
    manifest["corpus_fingerprint"] = corpus_fingerprint;
    manifest["tuned_mfcc"] = mfcc_config_to_json(bundle.tuned_mfcc);
    json specs;
    for (const auto& [family, spec] : bundle.tuned_specs) specs[to_token(family)] = spec_to_json(spec);
    manifest["tuned_specs"] = std::move(specs);
    json files;
    for (const auto& [rel, hash] : hashes) files[rel] = hash;
    manifest["files"] = std::move(files);
    write_text_file(out_dir / "bundle.json", manifest.dump(2) + "\n");
}

} // namespace coughgate
