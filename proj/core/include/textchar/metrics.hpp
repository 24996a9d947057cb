#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "textchar/cluster.hpp"

namespace textchar {

inline constexpr double kDefaultSigmaFloor = 1e-12;

enum class StdDivisor {
    population,  ///< divide by m
    sample,      ///< divide by m - 1 (0 for m = 1)
};

struct MetricOptions {
    /// Lower clamp on per-axis std inside density only.
    double sigma_floor = kDefaultSigmaFloor;
    StdDivisor std_divisor = StdDivisor::population;
    /// Worker threads for the pairwise kernel; 0 = auto (TEXTCHAR_THREADS or hardware).
    std::size_t workers = 0;
    bool compute_homogeneity = true;
};

/// Per-axis mean and standard deviation of a cluster.
struct ClusterStats {
    std::vector<double> means;
    std::vector<double> stds;
    std::size_t count = 0;

    std::size_t dim() const noexcept { return stds.size(); }
};

struct DensityResult {
    double density = 0.0;
    double density_log = 0.0;
    std::size_t degenerate_axes = 0;
};

/// Stationary distribution and entropy rate (nats) of the distance-weighted chain.
struct MarkovChainSummary {
    std::vector<double> stationary;
    double entropy_rate = 0.0;
    double upper_bound = 0.0;  ///< ln(m - 1)
};

struct MetricReport {
    std::size_t count = 0;
    std::size_t dim = 0;
    double diversity = 0.0;
    double density = 0.0;
    double density_log = 0.0;
    std::optional<double> homogeneity;
    std::size_t degenerate_axes = 0;
    std::optional<std::string> homogeneity_skipped_reason;
    std::vector<std::string> notes;
};

/// Compensated per-axis mean and standard deviation.
ClusterStats axis_stats(const EmbeddedCluster& cluster,
                        StdDivisor divisor = StdDivisor::population);

/// Geometric mean of the per-axis stds, evaluated in log space. Exactly 0 if
/// any axis has zero spread.
double diversity(const ClusterStats& stats);

/// m / (prod sigma_j)^(1/sqrt(H)) with each sigma floored at `sigma_floor`.
DensityResult density(const ClusterStats& stats, double sigma_floor = kDefaultSigmaFloor);

/// Edge weight d^(ln H) between two points; 0 when they coincide.
double pairwise_weight(std::span<const double> a, std::span<const double> b, std::size_t dim);

/// Transition probabilities out of row `i`. Materializes one row only; meant
/// for inspection and tests, the metric path never calls it.
std::vector<double> transition_row(const EmbeddedCluster& cluster, std::size_t i);

/// Strength-proportional stationary distribution of the reversible chain.
/// Throws DegenerateCluster when every pairwise weight is zero.
std::vector<double> stationary_distribution(const EmbeddedCluster& cluster,
                                            std::size_t workers = 0);

/// Entropy rate of the chain without materializing the m x m matrix.
/// Throws TooFewSamples for m < 2, DegenerateCluster if a row has zero weight.
MarkovChainSummary entropy_rate(const EmbeddedCluster& cluster, std::size_t workers = 0);

/// Entropy rate normalized by ln(m - 1). Throws TooFewSamples for m < 3.
double homogeneity(const EmbeddedCluster& cluster, std::size_t workers = 0);

/// All three metrics. Never throws for m >= 1: homogeneity failures are
/// recorded in homogeneity_skipped_reason.
MetricReport metric_report(const EmbeddedCluster& cluster, const MetricOptions& options = {});

}  // namespace textchar
