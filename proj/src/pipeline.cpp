#include "coughgate/pipeline.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "coughgate/audio.hpp"
#include "coughgate/error.hpp"
#include "internal/fnv.hpp"

namespace coughgate {

namespace {

using nlohmann::json;

json pipeline_config_to_json(const PipelineConfig& config) {
    return json{{"frame_length", config.mfcc.frame_length},
                {"n_mfcc", config.mfcc.n_mfcc},
                {"n_segments", config.mfcc.n_segments},
                {"n_mel_filters", config.mfcc.n_mel_filters},
                {"log_floor", config.mfcc.log_floor},
                {"include_c0", config.mfcc.include_c0},
                {"working_rate", config.working_rate},
                {"peak_normalize", config.peak_normalize}};
}

PipelineConfig pipeline_config_from_json(const json& j) {
    PipelineConfig config;
    config.mfcc.frame_length = j.at("frame_length").get<int>();
    config.mfcc.n_mfcc = j.at("n_mfcc").get<int>();
    config.mfcc.n_segments = j.at("n_segments").get<int>();
    config.mfcc.n_mel_filters = j.at("n_mel_filters").get<int>();
    config.mfcc.log_floor = j.at("log_floor").get<double>();
    config.mfcc.include_c0 = j.at("include_c0").get<bool>();
    config.working_rate = j.at("working_rate").get<int>();
    config.peak_normalize = j.at("peak_normalize").get<bool>();
    config.mfcc.validate();
    if (config.working_rate < 1) throw ConfigError("working_rate must be positive");
    return config;
}

} // namespace

ExtractionResult extract_features(const AudioDataset& corpus, const PipelineConfig& config) {
    config.mfcc.validate();
    if (config.working_rate < 1) throw ConfigError("working_rate must be positive");
    corpus.validate();

    ExtractionResult result;
    // The filterbank depends only on the config, never the clip, once every
    // clip runs at the working rate; build it once.
    const MelFilterbank filterbank =
        mel_filterbank(config.mfcc.n_mel_filters, config.mfcc.fft_size(), config.working_rate);

    for (const auto& row : corpus.rows) {
        AudioClip clip = resample(row.clip, config.working_rate);
        if (config.peak_normalize) clip = peak_normalize(clip);
        if (clip.samples.size() < static_cast<std::size_t>(config.mfcc.frame_length))
            throw ValidationError("clip '" + row.clip.source_id + "' is shorter than one frame at " +
                                  std::to_string(config.working_rate) + " Hz");
        const MfccMatrix matrix = extract_mfcc(clip, config.mfcc, &filterbank);
        bool truncated = false;
        FeatureVector fv;
        fv.values = segment_average(matrix, config.mfcc.n_segments, &truncated);
        fv.label = row.label;
        fv.source_id = row.clip.source_id;
        if (truncated)
            result.warnings.push_back("clip '" + row.clip.source_id + "' has only " +
                                      std::to_string(matrix.n_frames) + " frames; averaged all of them");
        result.features.rows.push_back(std::move(fv));
    }
    return result;
}

std::string features_to_json(const FeatureDataset& features, const PipelineConfig& config) {
    json j;
    j["schema_version"] = 1;
    j["config"] = pipeline_config_to_json(config);
    json rows = json::array();
    for (const auto& row : features.rows)
        rows.push_back(json{{"source_id", row.source_id},
                            {"label", to_token(row.label)},
                            {"values", row.values}});
    j["rows"] = std::move(rows);
    return j.dump(2);
}

FeatureFile features_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("feature JSON: ") + e.what());
    }
    try {
        if (j.at("schema_version").get<int>() != 1)
            throw ParseError("unsupported feature schema version");
        FeatureFile file;
        file.config = pipeline_config_from_json(j.at("config"));
        for (const json& row : j.at("rows")) {
            FeatureVector fv;
            fv.source_id = row.at("source_id").get<std::string>();
            fv.label = label_from_token(row.at("label").get<std::string>());
            fv.values = row.at("values").get<std::vector<double>>();
            file.features.rows.push_back(std::move(fv));
        }
        return file;
    } catch (const json::exception& e) {
        throw ParseError(std::string("feature JSON: ") + e.what());
    }
}

FeatureFile load_features(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open feature file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return features_from_json(buf.str());
}

void write_features(const std::filesystem::path& path, const FeatureDataset& features,
                    const PipelineConfig& config) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write feature file '" + path.string() + "'");
    out << features_to_json(features, config);
    if (!out) throw IoError("failed while writing '" + path.string() + "'");
}

std::string features_to_csv(const FeatureDataset& features) {
    std::string out = "source_id,label";
    const std::size_t width = features.n_features();
    for (std::size_t j = 0; j < width; ++j) out += ",c" + std::to_string(j);
    out.push_back('\n');
    json value; // reuse the JSON float writer so CSV and JSON agree byte-for-byte
    for (const auto& row : features.rows) {
        out += row.source_id;
        out.push_back(',');
        out += to_token(row.label);
        for (double v : row.values) {
            out.push_back(',');
            value = v;
            out += value.dump();
        }
        out.push_back('\n');
    }
    return out;
}

std::string feature_cache_key(const std::string& corpus_fingerprint, const PipelineConfig& config) {
    const std::string blob = corpus_fingerprint + "\n" + pipeline_config_to_json(config).dump();
    return internal::fnv1a64_hex(blob);
}

FeatureCache FeatureCache::resolve(const std::filesystem::path& default_dir) {
    if (const char* env = std::getenv("COUGHGATE_CACHE_DIR"); env != nullptr && *env != '\0')
        return FeatureCache(env);
    return FeatureCache(default_dir);
}

std::optional<FeatureFile> FeatureCache::load(const std::string& key) const {
    const auto path = dir_ / (key + ".json");
    std::error_code ec;
    if (!std::filesystem::exists(path, ec)) return std::nullopt;
    return load_features(path);
}

void FeatureCache::store(const std::string& key, const FeatureDataset& features,
                         const PipelineConfig& config) const {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create cache directory '" + dir_.string() + "'");
    write_features(dir_ / (key + ".json"), features, config);
}

} // namespace coughgate
