#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "coughgate/dataset.hpp"
#include "coughgate/mfcc.hpp"

namespace coughgate {

/// Corpus-level extraction settings. Every clip is resampled to the working
/// rate first so frame lengths mean the same duration corpus-wide.
struct PipelineConfig {
    MfccConfig mfcc;
    int working_rate = 44100;
    bool peak_normalize = false;
};

struct ExtractionResult {
    FeatureDataset features;
    std::vector<std::string> warnings; ///< short clips, truncated segment averages
};

/// Resample -> (optional) peak normalize -> MFCC -> segment average, per clip.
ExtractionResult extract_features(const AudioDataset& corpus, const PipelineConfig& config);

/// JSON document: {"schema_version": 1, "config": {...}, "rows": [...]}.
std::string features_to_json(const FeatureDataset& features, const PipelineConfig& config);

struct FeatureFile {
    FeatureDataset features;
    PipelineConfig config;
};

FeatureFile features_from_json(const std::string& text);
FeatureFile load_features(const std::filesystem::path& path);
void write_features(const std::filesystem::path& path, const FeatureDataset& features,
                    const PipelineConfig& config);

/// CSV export: source_id, label, then one column per coefficient.
std::string features_to_csv(const FeatureDataset& features);

/// Stable key for the on-disk feature cache: content hash of the corpus
/// identity (manifest bytes or synthetic descriptor) and the pipeline config.
std::string feature_cache_key(const std::string& corpus_fingerprint, const PipelineConfig& config);

/// Disk cache of extracted features, keyed by feature_cache_key. The
/// directory is created lazily on first store.
class FeatureCache {
public:
    explicit FeatureCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

    /// Honors the COUGHGATE_CACHE_DIR environment override, falling back to
    /// the given default.
    static FeatureCache resolve(const std::filesystem::path& default_dir);

    std::optional<FeatureFile> load(const std::string& key) const;
    void store(const std::string& key, const FeatureDataset& features,
               const PipelineConfig& config) const;
    const std::filesystem::path& dir() const { return dir_; }

private:
    std::filesystem::path dir_;
};

} // namespace coughgate
