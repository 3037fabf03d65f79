#include "coughgate/manifest.hpp"

#include <fstream>
#include <sstream>

#include "coughgate/error.hpp"

namespace coughgate {

namespace {

constexpr const char* kHeader = "path,label,dataset,excluded,note";

/// Splits one CSV record into fields. Double quotes delimit fields that
/// contain commas or quotes; "" inside a quoted field is a literal quote.
std::vector<std::string> split_csv_row(const std::string& line, int line_no) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            if (!cur.empty())
                throw ParseError("manifest line " + std::to_string(line_no) +
                                 ": quote inside unquoted field");
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (quoted)
        throw ParseError("manifest line " + std::to_string(line_no) + ": unterminated quote");
    fields.push_back(std::move(cur));
    return fields;
}

bool needs_quoting(const std::string& field) {
    return field.find_first_of(",\"\n\r") != std::string::npos;
}

void append_csv_field(std::string& out, const std::string& field) {
    if (!needs_quoting(field)) {
        out += field;
        return;
    }
    out.push_back('"');
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
}

} // namespace

const char* to_token(Label label) {
    return label == Label::Covid ? "covid" : "non_covid";
}

const char* to_token(SourceDataset dataset) {
    switch (dataset) {
        case SourceDataset::Virufy: return "virufy";
        case SourceDataset::Nococoda: return "nococoda";
        case SourceDataset::Synthetic: return "synthetic";
    }
    return "virufy";
}

Label label_from_token(const std::string& token) {
    if (token == "covid") return Label::Covid;
    if (token == "non_covid") return Label::NonCovid;
    throw ValidationError("unknown label token '" + token + "'");
}

SourceDataset dataset_from_token(const std::string& token) {
    if (token == "virufy") return SourceDataset::Virufy;
    if (token == "nococoda") return SourceDataset::Nococoda;
    if (token == "synthetic") return SourceDataset::Synthetic;
    throw ValidationError("unknown dataset token '" + token + "'");
}

std::vector<ManifestEntry> parse_manifest(const std::string& text) {
    std::vector<ManifestEntry> entries;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!saw_header) {
            if (line != kHeader)
                throw ParseError("manifest line 1: expected header '" + std::string(kHeader) +
                                 "', got '" + line + "'");
            saw_header = true;
            continue;
        }
        const auto fields = split_csv_row(line, line_no);
        if (fields.size() != 5)
            throw ParseError("manifest line " + std::to_string(line_no) + ": expected 5 fields, got " +
                             std::to_string(fields.size()));
        ManifestEntry e;
        e.path = fields[0];
        if (e.path.empty())
            throw ParseError("manifest line " + std::to_string(line_no) + ": empty path");
        try {
            e.label = label_from_token(fields[1]);
            e.dataset = dataset_from_token(fields[2]);
        } catch (const ValidationError& err) {
            throw ValidationError("manifest line " + std::to_string(line_no) + ": " + err.what());
        }
        if (fields[3] == "0") e.excluded = false;
        else if (fields[3] == "1") e.excluded = true;
        else
            throw ValidationError("manifest line " + std::to_string(line_no) +
                                  ": excluded must be 0 or 1, got '" + fields[3] + "'");
        e.note = fields[4];
        entries.push_back(std::move(e));
    }
    if (!saw_header) throw ParseError("manifest is empty (missing header)");
    return entries;
}

std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open manifest '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_manifest(buf.str());
}

std::string serialize_manifest(const std::vector<ManifestEntry>& entries) {
    std::string out = kHeader;
    out.push_back('\n');
    for (const auto& e : entries) {
        append_csv_field(out, e.path);
        out.push_back(',');
        out += to_token(e.label);
        out.push_back(',');
        out += to_token(e.dataset);
        out.push_back(',');
        out += e.excluded ? "1" : "0";
        out.push_back(',');
        append_csv_field(out, e.note);
        out.push_back('\n');
    }
    return out;
}

void write_manifest(const std::filesystem::path& path, const std::vector<ManifestEntry>& entries) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write manifest '" + path.string() + "'");
    out << serialize_manifest(entries);
    if (!out) throw IoError("failed while writing manifest '" + path.string() + "'");
}

} // namespace coughgate
