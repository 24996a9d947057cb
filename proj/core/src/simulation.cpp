#include "textchar/simulation.hpp"

#include <cmath>
#include <string>

#include "textchar/error.hpp"
#include "textchar/random.hpp"

namespace textchar {
namespace {

std::size_t as_count(double value, const char* what) {
    if (!(value >= 0.0) || value != std::floor(value)) {
        throw InvalidSpec(std::string(what) + " must be a non-negative integer, got " +
                          std::to_string(value));
    }
    return static_cast<std::size_t>(value);
}

}  // namespace

void BlobSpec::validate() const {
    if (count < 1) throw InvalidSpec("blob needs at least one point");
    if (dim < 1) throw InvalidSpec("blob needs at least one dimension");
    if (!(std > 0.0) || !std::isfinite(std)) throw InvalidSpec("blob std must be positive");
    if (!center.empty() && center.size() != dim) {
        throw InvalidSpec("blob center has length " + std::to_string(center.size()) +
                          ", expected " + std::to_string(dim));
    }
}

std::string_view to_string(ScenarioKind kind) noexcept {
    switch (kind) {
        case ScenarioKind::down_sampling: return "down_sampling";
        case ScenarioKind::varying_spread: return "varying_spread";
        case ScenarioKind::outliers: return "outliers";
        case ScenarioKind::sub_clusters: return "sub_clusters";
    }
    return "unknown";
}

std::optional<ScenarioKind> parse_scenario_kind(std::string_view text) noexcept {
    if (text == "downsample" || text == "down_sampling") return ScenarioKind::down_sampling;
    if (text == "spread" || text == "varying_spread") return ScenarioKind::varying_spread;
    if (text == "outliers") return ScenarioKind::outliers;
    if (text == "subclusters" || text == "sub_clusters") return ScenarioKind::sub_clusters;
    return std::nullopt;
}

void ScenarioSpec::validate() const {
    base.validate();
    if (sweep.empty()) throw InvalidSpec("scenario sweep is empty");
    const bool increasing = sweep.size() < 2 || sweep[1] > sweep[0];
    for (std::size_t i = 1; i < sweep.size(); ++i) {
        if (increasing ? !(sweep[i] > sweep[i - 1]) : !(sweep[i] < sweep[i - 1])) {
            throw InvalidSpec("scenario sweep must be strictly monotone");
        }
    }
    if (outlier_radius && !(*outlier_radius > 0.0)) throw InvalidSpec("outlier radius must be positive");
    if (spacing && !(*spacing >= 0.0)) throw InvalidSpec("sub-cluster spacing must be non-negative");
}

EmbeddedCluster gaussian_blob(const BlobSpec& spec) {
    spec.validate();
    RandomStream rng(spec.seed);
    std::vector<double> values(spec.count * spec.dim);
    for (std::size_t i = 0; i < spec.count; ++i) {
        for (std::size_t j = 0; j < spec.dim; ++j) {
            const double offset = spec.center.empty() ? 0.0 : spec.center[j];
            values[i * spec.dim + j] = offset + spec.std * rng.normal();
        }
    }
    return EmbeddedCluster(spec.count, spec.dim, std::move(values));
}

EmbeddedCluster down_sample(const EmbeddedCluster& cluster, double fraction, std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction <= 1.0)) {
        throw InvalidSpec("down-sampling fraction must lie in (0, 1], got " + std::to_string(fraction));
    }
    const auto keep = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(cluster.size())));
    if (keep == 0) {
        throw EmptyResult("down-sampling " + std::to_string(cluster.size()) + " points to fraction " +
                          std::to_string(fraction) + " leaves no points");
    }
    RandomStream rng(seed);
    const auto indices = choose_subset(cluster.size(), keep, rng);
    return cluster.select(indices);
}

EmbeddedCluster sphere_points(std::size_t n, std::size_t dim, double radius, std::uint64_t seed) {
    if (dim < 1) throw InvalidSpec("sphere points need at least one dimension");
    if (!(radius > 0.0)) throw InvalidSpec("sphere radius must be positive");
    RandomStream rng(seed);
    std::vector<double> values(n * dim);
    std::vector<double> draw(dim);
    for (std::size_t i = 0; i < n; ++i) {
        double norm_sq = 0.0;
        while (!(norm_sq > 0.0)) {
            norm_sq = 0.0;
            for (double& x : draw) {
                x = rng.normal();
                norm_sq += x * x;
            }
        }
        const double scale = radius / std::sqrt(norm_sq);
        for (std::size_t j = 0; j < dim; ++j) values[i * dim + j] = draw[j] * scale;
    }
    return EmbeddedCluster(n, dim, std::move(values));
}

EmbeddedCluster add_outliers(const EmbeddedCluster& base, std::size_t count, double radius,
                             std::uint64_t seed) {
    if (count == 0) return base;
    return base.concat(sphere_points(count, base.dim(), radius, seed));
}

EmbeddedCluster sub_clusters(std::size_t k, std::size_t total, std::size_t dim, double std,
                             double spacing, std::uint64_t seed) {
    if (k < 1) throw InvalidSpec("need at least one sub-cluster");
    if (total < k) {
        throw InvalidSpec("cannot split " + std::to_string(total) + " points into " +
                          std::to_string(k) + " sub-clusters");
    }
    EmbeddedCluster out;
    for (std::size_t i = 0; i < k; ++i) {
        BlobSpec blob;
        blob.count = total / k + (i < total % k ? 1 : 0);
        blob.dim = dim;
        blob.std = std;
        blob.center.assign(dim, 0.0);
        blob.center[0] = static_cast<double>(i) * spacing;
        blob.seed = derive_seed(seed, i);
        out = out.concat(gaussian_blob(blob));
    }
    return out;
}

std::vector<double> default_sweep(ScenarioKind kind) {
    std::vector<double> sweep;
    switch (kind) {
        case ScenarioKind::down_sampling:
            for (int i = 10; i >= 1; --i) sweep.push_back(i / 10.0);
            break;
        case ScenarioKind::varying_spread:
            for (int i = 1; i <= 10; ++i) sweep.push_back(i);
            break;
        case ScenarioKind::outliers:
            for (int i = 0; i <= 500; i += 50) sweep.push_back(i);
            break;
        case ScenarioKind::sub_clusters:
            for (int i = 1; i <= 10; ++i) sweep.push_back(i);
            break;
    }
    return sweep;
}

ScenarioSpec make_scenario(ScenarioKind kind, const BlobSpec& base) {
    ScenarioSpec spec;
    spec.kind = kind;
    spec.base = base;
    spec.sweep = default_sweep(kind);
    return spec;
}

ScenarioResult run_scenario(const ScenarioSpec& spec, const MetricOptions& options) {
    spec.validate();
    ScenarioResult result;
    result.spec = spec;
    result.seed = spec.base.seed;

    std::optional<EmbeddedCluster> base;
    if (spec.kind == ScenarioKind::down_sampling || spec.kind == ScenarioKind::outliers) {
        base = gaussian_blob(spec.base);
    }

    for (std::size_t row = 0; row < spec.sweep.size(); ++row) {
        const double param = spec.sweep[row];
        const std::uint64_t row_seed = derive_seed(spec.base.seed, row + 1);
        ScenarioRow out;
        out.parameter = param;
        try {
            EmbeddedCluster cluster;
            switch (spec.kind) {
                case ScenarioKind::down_sampling:
                    cluster = down_sample(*base, param, row_seed);
                    break;
                case ScenarioKind::varying_spread: {
                    BlobSpec blob = spec.base;
                    blob.std = param;
                    blob.seed = row_seed;
                    cluster = gaussian_blob(blob);
                    break;
                }
                case ScenarioKind::outliers:
                    cluster = add_outliers(*base, as_count(param, "outlier count"),
                                           spec.resolved_outlier_radius(), row_seed);
                    break;
                case ScenarioKind::sub_clusters:
                    cluster = sub_clusters(as_count(param, "sub-cluster count"), spec.base.count,
                                           spec.base.dim, spec.base.std, spec.resolved_spacing(),
                                           row_seed);
                    break;
            }
            out.report = metric_report(cluster, options);
        } catch (const Error& e) {
            out.error = e.what();
        }
        result.rows.push_back(std::move(out));
    }
    return result;
}

}  // namespace textchar
