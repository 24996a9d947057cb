#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "textchar/cluster.hpp"
#include "textchar/ingestion.hpp"
#include "textchar/metrics.hpp"

namespace textchar {

struct ProfileOptions {
    MetricOptions metrics;
    /// Homogeneity of a group larger than this is computed on a seeded
    /// uniform subsample of `homogeneity_cap` points. Unset = never.
    std::optional<std::size_t> homogeneity_cap;
    std::uint64_t seed = 0;
};

/// Per-(label, layer) reports, layer-averaged per-class reports and the
/// class-size-weighted final report.
struct DatasetProfile {
    std::map<GroupKey, MetricReport> per_group;
    std::map<std::string, MetricReport> per_class;
    MetricReport final;
    std::map<std::string, std::size_t> class_sizes;
    /// Groups whose homogeneity was absent and left out of the averages.
    std::vector<GroupKey> homogeneity_skipped;
    std::optional<std::size_t> homogeneity_cap;
};

struct SweepRow {
    double fraction = 1.0;
    std::size_t training_set_size = 0;
    DatasetProfile profile;
    std::map<std::string, double> scores;
};

struct SweepTable {
    std::vector<SweepRow> rows;
    std::uint64_t seed = 0;
    bool stratified = true;
};

struct SweepOptions {
    ProfileOptions profile;
    std::uint64_t seed = 0;
    /// Sample within each class; false samples texts uniformly over the whole set.
    bool stratified = true;
};

struct CorrelationEntry {
    std::string metric;
    std::string score;
    std::optional<double> pearson_r;
    std::size_t count = 0;
    std::optional<std::string> error;
};

struct CorrelationReport {
    std::vector<CorrelationEntry> entries;
};

/// Externally measured model scores keyed by down-sampling fraction.
struct ScoreTable {
    std::vector<std::string> names;
    std::vector<std::pair<double, std::map<std::string, double>>> rows;
};

/// Metric names used in correlation reports, in report order.
inline const std::vector<std::string> kCorrelatedMetrics{"diversity", "density", "homogeneity"};

/// Weighted mean of reports, metric by metric. density_log of the result is
/// ln of the averaged density. Homogeneity averages the reports that carry
/// one, with their weights renormalized.
MetricReport weighted_average(std::span<const MetricReport> reports, std::span<const double> weights);

/// Throws InconsistentClassSize if one label has different sizes across layers.
DatasetProfile profile_dataset(const std::map<GroupKey, EmbeddedCluster>& groups,
                               const ProfileOptions& options = {});

/// Keeps round(fraction * n) texts (distinct (label, id)) and every layer's
/// record for each kept text. Stratified mode rounds per class; throws
/// EmptyClass if a class ends up empty.
LabeledEmbeddings subsample_embeddings(const LabeledEmbeddings& embeddings, double fraction,
                                       std::uint64_t seed, bool stratified = true);

/// Profiles the data at each fraction (strictly decreasing, in (0, 1]).
/// Row r samples with derive_seed(options.seed, r).
SweepTable downsample_sweep(const LabeledEmbeddings& embeddings, std::span<const double> fractions,
                            const SweepOptions& options = {});

/// Product-moment correlation. Throws DegenerateInput for n < 2, unequal
/// lengths or a constant sequence.
double pearson(std::span<const double> x, std::span<const double> y);

/// Reads `metric` ("diversity", "density", "homogeneity", "density_log") from a
/// report; nullopt when absent.
std::optional<double> metric_value(const MetricReport& report, const std::string& metric);

/// One entry per (metric, score) pair on the sweep's final values. Failures are
/// recorded per entry.
CorrelationReport correlation_report(const SweepTable& sweep, const std::vector<std::string>& score_names);

/// Joins scores to sweep rows by exact fraction match. Throws JoinMismatch
/// naming the fractions present on one side only.
void attach_scores(SweepTable& sweep, const ScoreTable& scores);

}  // namespace textchar
