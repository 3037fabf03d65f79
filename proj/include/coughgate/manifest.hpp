#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace coughgate {

enum class Label { NonCovid = 0, Covid = 1 };

enum class SourceDataset { Virufy, Nococoda, Synthetic };

const char* to_token(Label label);             // "covid" / "non_covid"
const char* to_token(SourceDataset dataset);   // "virufy" / "nococoda" / "synthetic"
Label label_from_token(const std::string& token);
SourceDataset dataset_from_token(const std::string& token);

/// One row of the corpus manifest. Excluded entries stay in the parsed list
/// (so the manifest round-trips) but are never loaded into a dataset.
struct ManifestEntry {
    std::string path;
    Label label = Label::NonCovid;
    SourceDataset dataset = SourceDataset::Virufy;
    bool excluded = false;
    std::string note;

    bool operator==(const ManifestEntry&) const = default;
};

/// Parses manifest CSV text (header `path,label,dataset,excluded,note`).
/// Throws ParseError naming the line for malformed rows and ValidationError
/// for unknown label/dataset/excluded tokens.
std::vector<ManifestEntry> parse_manifest(const std::string& text);

std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path);

/// Inverse of parse_manifest; load-then-serialize is byte-identical modulo
/// line endings.
std::string serialize_manifest(const std::vector<ManifestEntry>& entries);

void write_manifest(const std::filesystem::path& path, const std::vector<ManifestEntry>& entries);

} // namespace coughgate
