#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "textchar/cluster.hpp"
#include "textchar/metrics.hpp"

namespace textchar {

/// Outlier sphere radius, in multiples of the base std, when none is given.
inline constexpr double kDefaultOutlierRadiusFactor = 1000.0;
/// Distance between adjacent sub-cluster centers, in multiples of the std.
inline constexpr double kDefaultSpacingFactor = 5.0;

/// Isotropic Gaussian blob.
struct BlobSpec {
    std::size_t count = 10000;
    std::size_t dim = 2;
    double std = 1.0;
    std::vector<double> center;  ///< empty means the origin
    std::uint64_t seed = 0;

    void validate() const;
};

enum class ScenarioKind { down_sampling, varying_spread, outliers, sub_clusters };

std::string_view to_string(ScenarioKind kind) noexcept;
/// Accepts the CLI spellings (downsample, spread, outliers, subclusters) and
/// the enum names.
std::optional<ScenarioKind> parse_scenario_kind(std::string_view text) noexcept;

struct ScenarioSpec {
    ScenarioKind kind = ScenarioKind::down_sampling;
    BlobSpec base;
    /// Fractions, spreads, outlier counts or sub-cluster counts.
    std::vector<double> sweep;
    std::optional<double> outlier_radius;
    std::optional<double> spacing;

    double resolved_outlier_radius() const { return outlier_radius.value_or(kDefaultOutlierRadiusFactor * base.std); }
    double resolved_spacing() const { return spacing.value_or(kDefaultSpacingFactor * base.std); }
    void validate() const;
};

struct ScenarioRow {
    double parameter = 0.0;
    std::optional<MetricReport> report;
    std::optional<std::string> error;
};

struct ScenarioResult {
    ScenarioSpec spec;
    std::uint64_t seed = 0;
    std::vector<ScenarioRow> rows;
};

EmbeddedCluster gaussian_blob(const BlobSpec& spec);

/// Uniform subset without replacement of round(fraction * m) rows, kept in
/// their original order. Throws EmptyResult when that rounds to zero.
EmbeddedCluster down_sample(const EmbeddedCluster& cluster, double fraction, std::uint64_t seed);

/// n points uniform on the sphere of the given radius (normalized Gaussians).
EmbeddedCluster sphere_points(std::size_t n, std::size_t dim, double radius, std::uint64_t seed);

EmbeddedCluster add_outliers(const EmbeddedCluster& base, std::size_t count, double radius,
                             std::uint64_t seed);

/// k equal blobs (remainder to the lowest indices) centered at (i * spacing, 0, ..., 0).
EmbeddedCluster sub_clusters(std::size_t k, std::size_t total, std::size_t dim, double std,
                             double spacing, std::uint64_t seed);

/// Base point followed by the nine swept values, e.g. 1.0, 0.9, ..., 0.1.
std::vector<double> default_sweep(ScenarioKind kind);

ScenarioSpec make_scenario(ScenarioKind kind, const BlobSpec& base);

/// Builds each row's cluster and records its metric report. Row i draws from
/// derive_seed(base.seed, i + 1); the base blob (down-sampling, outliers) uses
/// base.seed directly and is generated once.
ScenarioResult run_scenario(const ScenarioSpec& spec, const MetricOptions& options = {});

}  // namespace textchar
