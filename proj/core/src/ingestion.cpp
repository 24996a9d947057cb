#include "textchar/ingestion.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "textchar/error.hpp"
#include "textchar/parallel.hpp"

namespace textchar {
namespace {

using nlohmann::json;

constexpr std::array<unsigned char, 4> kMagic{0x43, 0x4D, 0x45, 0x54};
constexpr std::size_t kHeaderBytes = 16;

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::string where(std::size_t line) { return "line " + std::to_string(line) + ": "; }

void check_finite(const EmbeddingRecord& rec) {
    for (std::size_t j = 0; j < rec.vector.size(); ++j) {
        if (!std::isfinite(rec.vector[j])) {
            throw NonFiniteValue("record '" + rec.id + "': non-finite value on axis " +
                                 std::to_string(j));
        }
    }
}

// Appends `rec`, inferring H from the first record.
void append_record(LabeledEmbeddings& out, EmbeddingRecord rec) {
    check_finite(rec);
    if (out.records.empty()) {
        out.dim = rec.vector.size();
    } else if (rec.vector.size() != out.dim) {
        throw DimensionMismatch("record '" + rec.id + "' has " + std::to_string(rec.vector.size()) +
                                " values, expected " + std::to_string(out.dim));
    }
    out.records.push_back(std::move(rec));
}

std::vector<double> json_vector(const json& value, std::size_t line, const char* key) {
    if (!value.is_array()) throw ParseError(where(line) + "`" + key + "` must be an array of numbers");
    std::vector<double> out;
    out.reserve(value.size());
    for (const auto& x : value) {
        if (!x.is_number()) throw ParseError(where(line) + "`" + key + "` holds a non-numeric entry");
        out.push_back(x.get<double>());
    }
    return out;
}

std::string json_string(const json& obj, const char* key, std::size_t line, bool required,
                        std::string fallback) {
    const auto it = obj.find(key);
    if (it == obj.end()) {
        if (required) throw ParseError(where(line) + "missing required key `" + key + "`");
        return fallback;
    }
    if (it->is_string()) return it->get<std::string>();
    if (it->is_number_integer()) return std::to_string(it->get<long long>());
    throw ParseError(where(line) + "`" + key + "` must be a string");
}

std::ifstream open_input(const std::filesystem::path& path, std::ios::openmode mode = std::ios::in) {
    std::ifstream in(path, mode);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    return in;
}

std::ofstream open_output(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
    std::ofstream out(path, mode | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    return out;
}

void finish_output(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

// JSONL ---------------------------------------------------------------------

template <typename OnObject>
void for_each_json_line(const std::filesystem::path& path, OnObject&& on_object) {
    auto in = open_input(path);
    std::string text;
    std::size_t line = 0;
    std::size_t ordinal = 0;
    while (std::getline(in, text)) {
        ++line;
        if (trim(text).empty()) continue;
        json obj;
        try {
            obj = json::parse(text);
        } catch (const json::exception& e) {
            throw ParseError(where(line) + "malformed JSON (" + e.what() + ")");
        }
        if (!obj.is_object()) throw ParseError(where(line) + "expected a JSON object");
        on_object(obj, line, ++ordinal);
    }
}

LabeledEmbeddings read_jsonl(const std::filesystem::path& path) {
    LabeledEmbeddings out;
    for_each_json_line(path, [&](const json& obj, std::size_t line, std::size_t ordinal) {
        EmbeddingRecord rec;
        rec.id = json_string(obj, "id", line, false, "row-" + std::to_string(ordinal));
        rec.label = json_string(obj, "label", line, true, {});
        rec.layer = json_string(obj, "layer", line, false, std::string(kDefaultLayer));
        const auto it = obj.find("vector");
        if (it == obj.end()) throw ParseError(where(line) + "missing required key `vector`");
        rec.vector = json_vector(*it, line, "vector");
        if (rec.vector.empty()) throw ParseError(where(line) + "`vector` is empty");
        append_record(out, std::move(rec));
    });
    return out;
}

json record_meta(const EmbeddingRecord& rec) {
    return json{{"id", rec.id}, {"label", rec.label}, {"layer", rec.layer}};
}

void write_jsonl(const LabeledEmbeddings& data, const std::filesystem::path& path) {
    auto out = open_output(path);
    for (const auto& rec : data.records) {
        json obj = record_meta(rec);
        obj["vector"] = rec.vector;
        out << obj.dump() << '\n';
    }
    finish_output(out, path);
}

// CSV -----------------------------------------------------------------------

std::vector<std::string> split_csv(std::string_view line, std::size_t line_no) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    bool was_quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"' && trim(field).empty()) {
            quoted = true;
            was_quoted = true;
            field.clear();
        } else if (c == ',') {
            fields.push_back(was_quoted ? field : trim(field));
            field.clear();
            was_quoted = false;
        } else {
            field += c;
        }
    }
    if (quoted) throw ParseError(where(line_no) + "unterminated quoted field");
    fields.push_back(was_quoted ? field : trim(field));
    return fields;
}

std::string quote_csv(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos && trim(s) == s) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

LabeledEmbeddings read_csv(const std::filesystem::path& path) {
    auto in = open_input(path);
    std::string text;
    std::size_t line = 0;
    std::vector<std::string> header;
    while (header.empty() && std::getline(in, text)) {
        ++line;
        if (!trim(text).empty()) header = split_csv(text, line);
    }
    LabeledEmbeddings out;
    if (header.empty()) return out;

    std::optional<std::size_t> label_col, id_col, layer_col;
    std::vector<std::size_t> axis_cols;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c] == "label") label_col = c;
        else if (header[c] == "id") id_col = c;
        else if (header[c] == "layer") layer_col = c;
        else axis_cols.push_back(c);
    }
    if (!label_col) throw ParseError("line 1: CSV header has no `label` column");

    std::size_t row = 0;
    while (std::getline(in, text)) {
        ++line;
        if (trim(text).empty()) continue;
        ++row;
        const auto fields = split_csv(text, line);
        if (fields.size() != header.size()) {
            throw ParseError(where(line) + "expected " + std::to_string(header.size()) +
                             " fields, found " + std::to_string(fields.size()));
        }
        EmbeddingRecord rec;
        rec.id = id_col ? fields[*id_col] : "row-" + std::to_string(row);
        rec.label = fields[*label_col];
        if (layer_col) rec.layer = fields[*layer_col];
        rec.vector.reserve(axis_cols.size());
        for (std::size_t c : axis_cols) {
            const auto value = parse_decimal(fields[c]);
            if (!value) {
                throw ParseError(where(line) + "column `" + header[c] + "` is not a number: '" +
                                 fields[c] + "'");
            }
            rec.vector.push_back(*value);
        }
        if (rec.vector.empty()) throw ParseError(where(line) + "row has no numeric axes");
        append_record(out, std::move(rec));
    }
    return out;
}

void write_csv(const LabeledEmbeddings& data, const std::filesystem::path& path) {
    auto out = open_output(path);
    out << "id,label,layer";
    for (std::size_t j = 0; j < data.dim; ++j) out << ",d" << j;
    out << '\n';
    for (const auto& rec : data.records) {
        out << quote_csv(rec.id) << ',' << quote_csv(rec.label) << ',' << quote_csv(rec.layer);
        for (double v : rec.vector) out << ',' << format_decimal(v);
        out << '\n';
    }
    finish_output(out, path);
}

// Binary --------------------------------------------------------------------

void put_u32(std::string& buf, std::uint32_t v) {
    for (int b = 0; b < 4; ++b) buf.push_back(static_cast<char>((v >> (8 * b)) & 0xFF));
}

template <typename Bits>
void put_le(std::string& buf, Bits bits) {
    for (std::size_t b = 0; b < sizeof(Bits); ++b) buf.push_back(static_cast<char>((bits >> (8 * b)) & 0xFF));
}

template <typename Bits>
Bits get_le(const unsigned char* p) {
    Bits v = 0;
    for (std::size_t b = 0; b < sizeof(Bits); ++b) v |= static_cast<Bits>(p[b]) << (8 * b);
    return v;
}

LabeledEmbeddings read_binary(const std::filesystem::path& path) {
    auto in = open_input(path, std::ios::binary);
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    if (bytes.size() < kHeaderBytes) {
        throw ParseError("offset 0: file is " + std::to_string(bytes.size()) +
                         " bytes, shorter than the 16-byte header");
    }
    if (!std::equal(kMagic.begin(), kMagic.end(), p)) throw ParseError("offset 0: bad magic, expected CMET");
    if (p[4] != 1) throw ParseError("offset 4: unsupported version " + std::to_string(p[4]));
    const unsigned width = p[5];
    if (width != 4 && width != 8) throw ParseError("offset 5: float width must be 4 or 8, got " + std::to_string(width));
    if (p[6] != 0 || p[7] != 0) throw ParseError("offset 6: reserved bytes must be zero");
    const std::uint32_t m = get_le<std::uint32_t>(p + 8);
    const std::uint32_t dim = get_le<std::uint32_t>(p + 12);
    const std::uint64_t payload = std::uint64_t{m} * dim * width;
    if (bytes.size() != kHeaderBytes + payload) {
        throw ParseError("offset 16: payload is " + std::to_string(bytes.size() - kHeaderBytes) +
                         " bytes, header announces " + std::to_string(payload));
    }
    if (m > 0 && dim == 0) throw ParseError("offset 12: zero dimensionality with non-empty payload");

    std::vector<EmbeddingRecord> meta;
    const auto sidecar = binary_sidecar_path(path);
    for_each_json_line(sidecar, [&](const json& obj, std::size_t line, std::size_t ordinal) {
        EmbeddingRecord rec;
        rec.id = json_string(obj, "id", line, false, "row-" + std::to_string(ordinal));
        rec.label = json_string(obj, "label", line, true, {});
        rec.layer = json_string(obj, "layer", line, false, std::string(kDefaultLayer));
        meta.push_back(std::move(rec));
    });
    if (meta.size() != m) {
        throw ParseError("sidecar '" + sidecar.string() + "' has " + std::to_string(meta.size()) +
                         " records, binary payload has " + std::to_string(m));
    }

    LabeledEmbeddings out;
    out.dim = dim;
    const unsigned char* cursor = p + kHeaderBytes;
    for (std::uint32_t i = 0; i < m; ++i) {
        EmbeddingRecord rec = std::move(meta[i]);
        rec.vector.resize(dim);
        for (std::uint32_t j = 0; j < dim; ++j, cursor += width) {
            rec.vector[j] = width == 8
                                ? std::bit_cast<double>(get_le<std::uint64_t>(cursor))
                                : static_cast<double>(std::bit_cast<float>(get_le<std::uint32_t>(cursor)));
        }
        append_record(out, std::move(rec));
    }
    out.dim = dim;
    return out;
}

void write_binary(const LabeledEmbeddings& data, const std::filesystem::path& path, int width) {
    if (width != 4 && width != 8) throw IoError("binary float width must be 4 or 8");
    if (data.records.size() > UINT32_MAX || data.dim > UINT32_MAX) {
        throw IoError("binary format limits m and H to 32 bits");
    }
    std::string buf;
    buf.reserve(kHeaderBytes + data.records.size() * data.dim * static_cast<std::size_t>(width));
    buf.append(reinterpret_cast<const char*>(kMagic.data()), kMagic.size());
    buf.push_back(1);
    buf.push_back(static_cast<char>(width));
    buf.push_back(0);
    buf.push_back(0);
    put_u32(buf, static_cast<std::uint32_t>(data.records.size()));
    put_u32(buf, static_cast<std::uint32_t>(data.dim));
    for (const auto& rec : data.records) {
        for (double v : rec.vector) {
            if (width == 8) put_le(buf, std::bit_cast<std::uint64_t>(v));
            else put_le(buf, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
        }
    }
    auto out = open_output(path, std::ios::binary);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    finish_output(out, path);

    const auto sidecar = binary_sidecar_path(path);
    auto meta = open_output(sidecar);
    for (const auto& rec : data.records) meta << record_meta(rec).dump() << '\n';
    finish_output(meta, sidecar);
}

}  // namespace

void LabeledEmbeddings::validate() const {
    std::set<std::tuple<std::string, std::string, std::string>> seen;
    for (const auto& rec : records) {
        if (rec.vector.size() != dim) {
            throw DimensionMismatch("record '" + rec.id + "' has " + std::to_string(rec.vector.size()) +
                                    " values, expected " + std::to_string(dim));
        }
        check_finite(rec);
        if (!seen.emplace(rec.label, rec.layer, rec.id).second) {
            throw DuplicateId("duplicate id '" + rec.id + "' in label '" + rec.label + "', layer '" +
                              rec.layer + "'");
        }
    }
}

std::string_view to_string(VectorFormat format) noexcept {
    switch (format) {
        case VectorFormat::csv: return "csv";
        case VectorFormat::jsonl: return "jsonl";
        case VectorFormat::binary: return "binary";
    }
    return "unknown";
}

std::optional<VectorFormat> parse_vector_format(std::string_view text) noexcept {
    if (text == "csv") return VectorFormat::csv;
    if (text == "jsonl") return VectorFormat::jsonl;
    if (text == "binary" || text == "bin") return VectorFormat::binary;
    return std::nullopt;
}

std::vector<double> mean_pool(const TokenSequence& seq) {
    if (seq.tokens.empty()) throw EmptySequence("sequence '" + seq.id + "' has no tokens");
    const std::size_t dim = seq.tokens.front().size();
    std::vector<CompensatedSum> sums(dim);
    for (std::size_t t = 0; t < seq.tokens.size(); ++t) {
        const auto& tok = seq.tokens[t];
        if (tok.size() != dim) {
            throw DimensionMismatch("sequence '" + seq.id + "': token " + std::to_string(t) + " has " +
                                    std::to_string(tok.size()) + " values, expected " + std::to_string(dim));
        }
        for (std::size_t j = 0; j < dim; ++j) {
            if (!std::isfinite(tok[j])) {
                throw NonFiniteValue("sequence '" + seq.id + "': non-finite value in token " +
                                     std::to_string(t) + ", axis " + std::to_string(j));
            }
            sums[j].add(tok[j]);
        }
    }
    std::vector<double> pooled(dim);
    const auto l = static_cast<double>(seq.tokens.size());
    for (std::size_t j = 0; j < dim; ++j) pooled[j] = sums[j].value() / l;
    return pooled;
}

LabeledEmbeddings read_vectors(const std::filesystem::path& path, VectorFormat format) {
    LabeledEmbeddings out;
    switch (format) {
        case VectorFormat::csv: out = read_csv(path); break;
        case VectorFormat::jsonl: out = read_jsonl(path); break;
        case VectorFormat::binary: out = read_binary(path); break;
    }
    out.validate();
    return out;
}

void write_vectors(const LabeledEmbeddings& embeddings, const std::filesystem::path& path,
                   VectorFormat format, int float_width) {
    embeddings.validate();
    switch (format) {
        case VectorFormat::csv: write_csv(embeddings, path); break;
        case VectorFormat::jsonl: write_jsonl(embeddings, path); break;
        case VectorFormat::binary: write_binary(embeddings, path, float_width); break;
    }
}

std::filesystem::path binary_sidecar_path(const std::filesystem::path& path) {
    std::filesystem::path out = path;
    out += ".meta.jsonl";
    return out;
}

std::vector<TokenSequence> read_token_sequences(const std::filesystem::path& path) {
    std::vector<TokenSequence> out;
    for_each_json_line(path, [&](const json& obj, std::size_t line, std::size_t ordinal) {
        TokenSequence seq;
        seq.id = json_string(obj, "id", line, false, "row-" + std::to_string(ordinal));
        seq.label = json_string(obj, "label", line, true, {});
        seq.layer = json_string(obj, "layer", line, false, std::string(kDefaultLayer));
        const auto it = obj.find("tokens");
        if (it == obj.end()) throw ParseError(where(line) + "missing required key `tokens`");
        if (!it->is_array()) throw ParseError(where(line) + "`tokens` must be an array of arrays");
        for (const auto& tok : *it) seq.tokens.push_back(json_vector(tok, line, "tokens"));
        out.push_back(std::move(seq));
    });
    return out;
}

std::map<GroupKey, EmbeddedCluster> group_by_label(const LabeledEmbeddings& embeddings) {
    std::map<GroupKey, std::vector<double>> buffers;
    std::map<GroupKey, std::size_t> counts;
    for (const auto& rec : embeddings.records) {
        GroupKey key{rec.label, rec.layer};
        auto& buf = buffers[key];
        buf.insert(buf.end(), rec.vector.begin(), rec.vector.end());
        ++counts[key];
    }
    std::map<GroupKey, EmbeddedCluster> out;
    for (auto& [key, buf] : buffers) {
        out.emplace(key, EmbeddedCluster(counts[key], embeddings.dim, std::move(buf)));
    }
    return out;
}

std::string format_decimal(double value) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                                   std::chars_format::general, 17);
    return std::string(buf.data(), res.ptr);
}

std::optional<double> parse_decimal(std::string_view text) noexcept {
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    if (text.empty()) return std::nullopt;
    double value = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ptr != text.data() + text.size()) return std::nullopt;
    if (res.ec == std::errc::result_out_of_range) {
        // libstdc++ rejects subnormals here; strtod rounds them correctly and
        // turns overflow into +-inf, which callers reject as non-finite.
        const std::string copy(text);
        return std::strtod(copy.c_str(), nullptr);
    }
    if (res.ec != std::errc{}) return std::nullopt;
    return value;
}

}  // namespace textchar
