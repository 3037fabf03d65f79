#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "coughgate/audio.hpp"
#include "coughgate/manifest.hpp"

namespace coughgate {

struct LabeledClip {
    AudioClip clip;
    Label label = Label::NonCovid;
};

/// Ingested audio rows. source_id uniqueness is checked by validate();
/// class coverage is checked where evaluation begins.
struct AudioDataset {
    std::vector<LabeledClip> rows;

    std::size_t size() const { return rows.size(); }
    std::size_t count(Label label) const;

    /// Throws ValidationError on duplicate source ids.
    void validate() const;
};

/// One extracted feature row. values.size() equals the extraction config's
/// n_mfcc and every entry is finite.
struct FeatureVector {
    std::vector<double> values;
    Label label = Label::NonCovid;
    std::string source_id;
};

struct FeatureDataset {
    std::vector<FeatureVector> rows;

    std::size_t size() const { return rows.size(); }
    std::size_t n_features() const { return rows.empty() ? 0 : rows.front().values.size(); }
    std::size_t count(Label label) const;

    /// Keeps only the listed feature columns, in the listed order.
    FeatureDataset select_features(const std::vector<int>& indices) const;

    /// Contract for evaluation: at least two rows, both classes present,
    /// uniform feature width, finite values, unique source ids. Throws
    /// ValidationError otherwise.
    void validate_for_eval() const;
};

/// Loads every non-excluded manifest entry relative to base_dir, downmixing
/// per read_wav. The manifest path field becomes the source_id.
AudioDataset load_audio(const std::vector<ManifestEntry>& entries,
                        const std::filesystem::path& base_dir);

} // namespace coughgate
