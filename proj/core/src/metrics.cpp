#include "textchar/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "textchar/error.hpp"
#include "textchar/parallel.hpp"

namespace textchar {
namespace {

double squared_distance(const double* a, const double* b, std::size_t n) noexcept {
    double acc = 0.0;
#pragma omp simd reduction(+ : acc)
    for (std::size_t k = 0; k < n; ++k) {
        const double d = a[k] - b[k];
        acc += d * d;
    }
    return acc;
}

// Per-row sums of scaled weights w' = (d / d_ref)^(ln H) and of w' ln w'.
// The common factor d_ref^(ln H) cancels in every transition probability and
// in the stationary distribution, so only these two sums per row are needed.
struct RowSums {
    std::vector<double> strength;
    std::vector<double> weighted_log;
};

double reference_squared_distance(const EmbeddedCluster& cluster) {
    // Mean squared pairwise distance is 2 * sum of population variances.
    const ClusterStats stats = axis_stats(cluster, StdDivisor::population);
    CompensatedSum acc;
    for (double s : stats.stds) acc.add(s * s);
    return 2.0 * acc.value();
}

RowSums accumulate_rows(const EmbeddedCluster& cluster, std::size_t workers) {
    const std::size_t m = cluster.size();
    const std::size_t dim = cluster.dim();
    const double ref_sq = reference_squared_distance(cluster);
    if (!(ref_sq > 0.0)) {
        throw DegenerateCluster("all " + std::to_string(m) +
                                " points coincide; every pairwise weight is zero");
    }
    const double half_power = 0.5 * std::log(static_cast<double>(dim));
    const double inv_ref = 1.0 / ref_sq;
    const double* data = cluster.values().data();

    // Row i owns pairs (i, j > i). Rows i and m-2-i are bundled into one work
    // item so every item carries m-1 pairs.
    const std::size_t items = m / 2;
    workers = std::max<std::size_t>(1, std::min(resolve_workers(workers), items));
    std::vector<RowSums> partial(workers);

    parallel_chunks(items, workers, [&](std::size_t w, std::size_t begin, std::size_t end) {
        RowSums& acc = partial[w];
        acc.strength.assign(m, 0.0);
        acc.weighted_log.assign(m, 0.0);
        auto do_row = [&](std::size_t i) {
            const double* a = data + i * dim;
            double s_i = 0.0;
            double t_i = 0.0;
            for (std::size_t j = i + 1; j < m; ++j) {
                const double d2 = squared_distance(a, data + j * dim, dim);
                if (d2 == 0.0) continue;
                const double log_w = half_power * std::log(d2 * inv_ref);
                const double wgt = std::exp(log_w);
                const double wlw = wgt * log_w;
                s_i += wgt;
                t_i += wlw;
                acc.strength[j] += wgt;
                acc.weighted_log[j] += wlw;
            }
            acc.strength[i] += s_i;
            acc.weighted_log[i] += t_i;
        };
        for (std::size_t k = begin; k < end; ++k) {
            do_row(k);
            const std::size_t mirror = m - 2 - k;
            if (mirror != k) do_row(mirror);
        }
    });

    RowSums total = std::move(partial[0]);
    for (std::size_t w = 1; w < partial.size(); ++w) {
        for (std::size_t i = 0; i < m; ++i) {
            total.strength[i] += partial[w].strength[i];
            total.weighted_log[i] += partial[w].weighted_log[i];
        }
    }
    return total;
}

std::vector<double> normalize(const std::vector<double>& strength) {
    const double total = pairwise_sum(strength);
    if (!(total > 0.0)) {
        throw DegenerateCluster("every pairwise weight is zero");
    }
    std::vector<double> nu(strength.size());
    for (std::size_t i = 0; i < nu.size(); ++i) nu[i] = strength[i] / total;
    return nu;
}

}  // namespace

ClusterStats axis_stats(const EmbeddedCluster& cluster, StdDivisor divisor) {
    const std::size_t m = cluster.size();
    const std::size_t dim = cluster.dim();
    if (m == 0) throw InvalidCluster("axis statistics need at least one point");

    std::vector<CompensatedSum> sums(dim);
    for (std::size_t i = 0; i < m; ++i) {
        const auto r = cluster.row(i);
        for (std::size_t j = 0; j < dim; ++j) sums[j].add(r[j]);
    }
    ClusterStats stats;
    stats.count = m;
    stats.means.resize(dim);
    for (std::size_t j = 0; j < dim; ++j) stats.means[j] = sums[j].value() / static_cast<double>(m);

    std::vector<CompensatedSum> squares(dim);
    for (std::size_t i = 0; i < m; ++i) {
        const auto r = cluster.row(i);
        for (std::size_t j = 0; j < dim; ++j) {
            const double d = r[j] - stats.means[j];
            squares[j].add(d * d);
        }
    }
    const std::size_t denom = divisor == StdDivisor::population ? m : m - 1;
    stats.stds.resize(dim);
    for (std::size_t j = 0; j < dim; ++j) {
        stats.stds[j] = denom == 0 ? 0.0 : std::sqrt(squares[j].value() / static_cast<double>(denom));
    }
    return stats;
}

double diversity(const ClusterStats& stats) {
    const std::size_t dim = stats.dim();
    if (dim == 0) throw InvalidCluster("diversity needs at least one axis");
    CompensatedSum log_sum;
    for (double s : stats.stds) {
        if (s == 0.0) return 0.0;
        log_sum.add(std::log(s));
    }
    return std::exp(log_sum.value() / static_cast<double>(dim));
}

DensityResult density(const ClusterStats& stats, double sigma_floor) {
    const std::size_t dim = stats.dim();
    if (dim == 0) throw InvalidCluster("density needs at least one axis");
    if (stats.count == 0) throw InvalidCluster("density needs at least one point");
    DensityResult out;
    CompensatedSum log_sum;
    for (double s : stats.stds) {
        if (s < sigma_floor) {
            s = sigma_floor;
            ++out.degenerate_axes;
        }
        log_sum.add(std::log(s));
    }
    out.density_log = std::log(static_cast<double>(stats.count)) -
                      log_sum.value() / std::sqrt(static_cast<double>(dim));
    out.density = std::exp(out.density_log);
    return out;
}

double pairwise_weight(std::span<const double> a, std::span<const double> b, std::size_t dim) {
    if (a.size() != b.size()) {
        throw InvalidCluster("pairwise_weight: vectors of length " + std::to_string(a.size()) +
                             " and " + std::to_string(b.size()));
    }
    const double d2 = squared_distance(a.data(), b.data(), a.size());
    if (d2 == 0.0) return 0.0;
    return std::pow(std::sqrt(d2), std::log(static_cast<double>(dim)));
}

std::vector<double> transition_row(const EmbeddedCluster& cluster, std::size_t i) {
    const std::size_t m = cluster.size();
    if (i >= m) throw InvalidCluster("row " + std::to_string(i) + " out of range");
    std::vector<double> row(m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
        if (j != i) row[j] = pairwise_weight(cluster.row(i), cluster.row(j), cluster.dim());
    }
    const double total = pairwise_sum(row);
    if (!(total > 0.0)) {
        throw DegenerateCluster("row " + std::to_string(i) + " has zero total weight");
    }
    for (double& p : row) p /= total;
    return row;
}

std::vector<double> stationary_distribution(const EmbeddedCluster& cluster, std::size_t workers) {
    if (cluster.size() < 2) {
        throw TooFewSamples("stationary distribution needs at least 2 points, got " +
                            std::to_string(cluster.size()));
    }
    return normalize(accumulate_rows(cluster, workers).strength);
}

MarkovChainSummary entropy_rate(const EmbeddedCluster& cluster, std::size_t workers) {
    const std::size_t m = cluster.size();
    if (m < 2) {
        throw TooFewSamples("entropy rate needs at least 2 points, got " + std::to_string(m));
    }
    const RowSums rows = accumulate_rows(cluster, workers);
    for (std::size_t i = 0; i < m; ++i) {
        if (!(rows.strength[i] > 0.0)) {
            throw DegenerateCluster("point " + std::to_string(i) +
                                    " coincides with every other point (zero row weight)");
        }
    }
    MarkovChainSummary out;
    out.stationary = normalize(rows.strength);
    // Row entropy: -sum_j p_ij ln p_ij = ln s_i - (sum_j w_ij ln w_ij) / s_i.
    std::vector<double> contrib(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double s = rows.strength[i];
        const double row_entropy = std::log(s) - rows.weighted_log[i] / s;
        contrib[i] = out.stationary[i] * row_entropy;
    }
    out.entropy_rate = std::max(0.0, pairwise_sum(contrib));
    out.upper_bound = std::log(static_cast<double>(m - 1));
    return out;
}

double homogeneity(const EmbeddedCluster& cluster, std::size_t workers) {
    const std::size_t m = cluster.size();
    if (m < 3) {
        throw TooFewSamples("homogeneity needs at least 3 points (ln(m-1) > 0), got " +
                            std::to_string(m));
    }
    const MarkovChainSummary chain = entropy_rate(cluster, workers);
    return chain.entropy_rate / chain.upper_bound;
}

MetricReport metric_report(const EmbeddedCluster& cluster, const MetricOptions& options) {
    if (cluster.empty()) throw InvalidCluster("metric report needs at least one point");
    const ClusterStats stats = axis_stats(cluster, options.std_divisor);
    const DensityResult dens = density(stats, options.sigma_floor);

    MetricReport report;
    report.count = cluster.size();
    report.dim = cluster.dim();
    report.diversity = diversity(stats);
    report.density = dens.density;
    report.density_log = dens.density_log;
    report.degenerate_axes = dens.degenerate_axes;

    if (!options.compute_homogeneity) {
        report.homogeneity_skipped_reason = "homogeneity disabled";
    } else if (cluster.size() < 3) {
        report.homogeneity_skipped_reason =
            "too few samples: m = " + std::to_string(cluster.size()) + " < 3";
    } else {
        try {
            report.homogeneity = homogeneity(cluster, options.workers);
        } catch (const DegenerateCluster& e) {
            report.homogeneity_skipped_reason = std::string("degenerate cluster: ") + e.what();
        }
    }
    if (cluster.dim() == 1) {
        report.notes.emplace_back("H = 1: ln(H) = 0 makes every distance weight 1, "
                                  "homogeneity is 1 unless points coincide");
    }
    if (report.degenerate_axes > 0) {
        report.notes.emplace_back(std::to_string(report.degenerate_axes) +
                                  " axes below the sigma floor in density");
    }
    return report;
}

}  // namespace textchar
