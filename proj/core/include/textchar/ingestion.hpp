#pragma once

#include <compare>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "textchar/cluster.hpp"

namespace textchar {

inline constexpr std::string_view kDefaultLayer = "default";

struct EmbeddingRecord {
    std::string id;
    std::string label;
    std::string layer{kDefaultLayer};
    std::vector<double> vector;

    friend bool operator==(const EmbeddingRecord&, const EmbeddingRecord&) = default;
};

/// Sequence vectors with their class label and encoder layer.
struct LabeledEmbeddings {
    std::vector<EmbeddingRecord> records;
    std::size_t dim = 0;

    /// Shape, finiteness and (label, layer, id) uniqueness.
    void validate() const;
};

/// Token-level vectors of one sequence. Special start/separator/end vectors
/// must already be stripped by the producer.
struct TokenSequence {
    std::string id;
    std::string label;
    std::string layer{kDefaultLayer};
    std::vector<std::vector<double>> tokens;
};

enum class VectorFormat { csv, jsonl, binary };

std::string_view to_string(VectorFormat format) noexcept;
std::optional<VectorFormat> parse_vector_format(std::string_view text) noexcept;

struct GroupKey {
    std::string label;
    std::string layer;

    friend auto operator<=>(const GroupKey&, const GroupKey&) = default;
    friend bool operator==(const GroupKey&, const GroupKey&) = default;
};

/// Compensated arithmetic mean of the token vectors.
std::vector<double> mean_pool(const TokenSequence& seq);

/// File formats:
///  - jsonl: one object per line, keys `label`, `vector`, optional `id`, `layer`.
///  - csv: header row with `label`, optional `id`/`layer`, then numeric axes in order.
///  - binary: "CMET" magic, version 1, float width (4|8), 2 zero bytes,
///    u32 m, u32 H (little endian), then m*H little-endian floats row-major.
///    Ids, labels and layers live in the sidecar `<path>.meta.jsonl`.
LabeledEmbeddings read_vectors(const std::filesystem::path& path, VectorFormat format);

/// `float_width` only affects the binary format (8 is lossless).
void write_vectors(const LabeledEmbeddings& embeddings, const std::filesystem::path& path,
                   VectorFormat format, int float_width = 8);

std::filesystem::path binary_sidecar_path(const std::filesystem::path& path);

/// Token-level jsonl: same keys as the vector format with `tokens` (array of
/// arrays) in place of `vector`.
std::vector<TokenSequence> read_token_sequences(const std::filesystem::path& path);

/// One cluster per (label, layer), rows in record order.
std::map<GroupKey, EmbeddedCluster> group_by_label(const LabeledEmbeddings& embeddings);

/// Decimal text with 17 significant digits (round-trips every double).
std::string format_decimal(double value);

/// Strict decimal parse of the whole of `text`; nullopt on any junk.
std::optional<double> parse_decimal(std::string_view text) noexcept;

}  // namespace textchar
