#include "coughgate/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "coughgate/error.hpp"

namespace coughgate {

std::size_t AudioDataset::count(Label label) const {
    return static_cast<std::size_t>(std::count_if(
        rows.begin(), rows.end(), [label](const LabeledClip& r) { return r.label == label; }));
}

void AudioDataset::validate() const {
    std::unordered_set<std::string> ids;
    for (const auto& r : rows)
        if (!ids.insert(r.clip.source_id).second)
            throw ValidationError("duplicate source id '" + r.clip.source_id + "'");
}

std::size_t FeatureDataset::count(Label label) const {
    return static_cast<std::size_t>(std::count_if(
        rows.begin(), rows.end(), [label](const FeatureVector& r) { return r.label == label; }));
}

FeatureDataset FeatureDataset::select_features(const std::vector<int>& indices) const {
    if (indices.empty()) throw ValidationError("select_features: empty index list");
    const auto width = n_features();
    for (int i : indices)
        if (i < 0 || static_cast<std::size_t>(i) >= width)
            throw ValidationError("select_features: index " + std::to_string(i) +
                                  " outside feature width " + std::to_string(width));
    FeatureDataset out;
    out.rows.reserve(rows.size());
    for (const auto& r : rows) {
        FeatureVector v;
        v.label = r.label;
        v.source_id = r.source_id;
        v.values.reserve(indices.size());
        for (int i : indices) v.values.push_back(r.values[static_cast<std::size_t>(i)]);
        out.rows.push_back(std::move(v));
    }
    return out;
}

void FeatureDataset::validate_for_eval() const {
    if (rows.size() < 2) throw ValidationError("evaluation needs at least two rows");
    if (count(Label::Covid) == 0 || count(Label::NonCovid) == 0)
        throw ValidationError("evaluation needs both classes present");
    const auto width = rows.front().values.size();
    if (width == 0) throw ValidationError("feature rows are empty");
    std::unordered_set<std::string> ids;
    for (const auto& r : rows) {
        if (r.values.size() != width)
            throw ValidationError("row '" + r.source_id + "' has " +
                                  std::to_string(r.values.size()) + " features, expected " +
                                  std::to_string(width));
        for (double v : r.values)
            if (!std::isfinite(v))
                throw ValidationError("row '" + r.source_id + "' has a non-finite feature");
        if (!ids.insert(r.source_id).second)
            throw ValidationError("duplicate source id '" + r.source_id + "'");
    }
}

AudioDataset load_audio(const std::vector<ManifestEntry>& entries,
                        const std::filesystem::path& base_dir) {
    AudioDataset out;
    for (const auto& e : entries) {
        if (e.excluded) continue;
        AudioClip clip = read_wav(base_dir / e.path);
        clip.source_id = e.path;
        out.rows.push_back({std::move(clip), e.label});
    }
    out.validate();
    return out;
}

} // namespace coughgate
