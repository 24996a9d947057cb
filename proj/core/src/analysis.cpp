#include "textchar/analysis.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <set>

#include "textchar/error.hpp"
#include "textchar/parallel.hpp"
#include "textchar/random.hpp"

namespace textchar {
namespace {

std::string shortest(double v) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

MetricReport report_for_group(const EmbeddedCluster& cluster, const ProfileOptions& options,
                              std::uint64_t group_seed) {
    if (!options.homogeneity_cap || cluster.size() <= *options.homogeneity_cap ||
        !options.metrics.compute_homogeneity) {
        return metric_report(cluster, options.metrics);
    }
    const std::size_t cap = *options.homogeneity_cap;
    MetricOptions full = options.metrics;
    full.compute_homogeneity = false;
    MetricReport report = metric_report(cluster, full);
    report.homogeneity_skipped_reason.reset();

    RandomStream rng(group_seed);
    const EmbeddedCluster sample = cluster.select(choose_subset(cluster.size(), cap, rng));
    const MetricReport sampled = metric_report(sample, options.metrics);
    report.homogeneity = sampled.homogeneity;
    report.homogeneity_skipped_reason = sampled.homogeneity_skipped_reason;
    report.notes.push_back("homogeneity computed on a " + std::to_string(cap) + "-point subsample of " +
                           std::to_string(cluster.size()));
    return report;
}

// Distinct texts per class, identified by id, in order of first appearance.
std::map<std::string, std::vector<std::string>> texts_by_class(const LabeledEmbeddings& data) {
    std::map<std::string, std::vector<std::string>> out;
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& rec : data.records) {
        if (seen.emplace(rec.label, rec.id).second) out[rec.label].push_back(rec.id);
    }
    return out;
}

}  // namespace

MetricReport weighted_average(std::span<const MetricReport> reports, std::span<const double> weights) {
    if (reports.empty() || reports.size() != weights.size()) {
        throw DegenerateInput("weighted average needs one weight per report and at least one report");
    }
    CompensatedSum total_weight;
    for (double w : weights) total_weight.add(w);
    const double wsum = total_weight.value();
    if (!(wsum > 0.0)) throw DegenerateInput("weighted average needs a positive total weight");

    MetricReport out;
    out.dim = reports.front().dim;
    CompensatedSum div, dens, hom, hom_weight;
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const double w = weights[i] / wsum;
        div.add(w * reports[i].diversity);
        dens.add(w * reports[i].density);
        out.degenerate_axes = std::max(out.degenerate_axes, reports[i].degenerate_axes);
        if (reports[i].homogeneity) {
            hom.add(weights[i] * *reports[i].homogeneity);
            hom_weight.add(weights[i]);
        }
    }
    out.diversity = div.value();
    out.density = dens.value();
    out.density_log = std::log(out.density);
    if (hom_weight.value() > 0.0) {
        out.homogeneity = hom.value() / hom_weight.value();
    } else {
        out.homogeneity_skipped_reason = "no input report carried a homogeneity value";
    }
    return out;
}

DatasetProfile profile_dataset(const std::map<GroupKey, EmbeddedCluster>& groups,
                               const ProfileOptions& options) {
    if (groups.empty()) throw DegenerateInput("profile needs at least one group");
    DatasetProfile profile;
    profile.homogeneity_cap = options.homogeneity_cap;

    std::map<std::string, std::vector<const MetricReport*>> layers_of;
    std::uint64_t ordinal = 0;
    for (const auto& [key, cluster] : groups) {
        auto [it, inserted] = profile.per_group.emplace(key, report_for_group(cluster, options,
                                                                              derive_seed(options.seed, ordinal++)));
        if (!it->second.homogeneity) profile.homogeneity_skipped.push_back(key);

        auto [size_it, fresh] = profile.class_sizes.emplace(key.label, cluster.size());
        if (!fresh && size_it->second != cluster.size()) {
            throw InconsistentClassSize("label '" + key.label + "' has " + std::to_string(size_it->second) +
                                        " samples in one layer and " + std::to_string(cluster.size()) +
                                        " in layer '" + key.layer + "'");
        }
        layers_of[key.label].push_back(&it->second);
    }

    std::vector<MetricReport> class_reports;
    std::vector<double> class_weights;
    for (const auto& [label, layer_reports] : layers_of) {
        std::vector<MetricReport> reports;
        for (const auto* r : layer_reports) reports.push_back(*r);
        const std::vector<double> equal(reports.size(), 1.0);
        MetricReport avg = weighted_average(reports, equal);
        avg.count = profile.class_sizes[label];
        profile.per_class.emplace(label, avg);
        class_reports.push_back(avg);
        class_weights.push_back(static_cast<double>(avg.count));
    }
    profile.final = weighted_average(class_reports, class_weights);
    std::size_t total = 0;
    for (const auto& [label, n] : profile.class_sizes) total += n;
    profile.final.count = total;
    if (!profile.homogeneity_skipped.empty()) {
        profile.final.notes.push_back(std::to_string(profile.homogeneity_skipped.size()) + " of " +
                                      std::to_string(groups.size()) +
                                      " groups had no homogeneity and were left out of its average");
    }
    return profile;
}

LabeledEmbeddings subsample_embeddings(const LabeledEmbeddings& embeddings, double fraction,
                                       std::uint64_t seed, bool stratified) {
    if (!(fraction > 0.0 && fraction <= 1.0)) {
        throw DegenerateInput("down-sampling fraction must lie in (0, 1], got " + shortest(fraction));
    }
    const auto classes = texts_by_class(embeddings);
    std::set<std::pair<std::string, std::string>> keep;

    if (stratified) {
        std::uint64_t ordinal = 0;
        for (const auto& [label, ids] : classes) {
            const auto k = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(ids.size())));
            if (k == 0) {
                throw EmptyClass("class '" + label + "' (" + std::to_string(ids.size()) +
                                 " texts) is empty at fraction " + shortest(fraction));
            }
            RandomStream rng(derive_seed(seed, ordinal++));
            for (std::size_t i : choose_subset(ids.size(), k, rng)) keep.emplace(label, ids[i]);
        }
    } else {
        std::vector<std::pair<std::string, std::string>> all;
        for (const auto& [label, ids] : classes) {
            for (const auto& id : ids) all.emplace_back(label, id);
        }
        const auto k = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(all.size())));
        RandomStream rng(seed);
        for (std::size_t i : choose_subset(all.size(), k, rng)) keep.insert(all[i]);
        for (const auto& [label, ids] : classes) {
            const auto lo = keep.lower_bound({label, std::string()});
            if (lo == keep.end() || lo->first != label) {
                throw EmptyClass("class '" + label + "' vanished at fraction " + shortest(fraction));
            }
        }
    }

    LabeledEmbeddings out;
    out.dim = embeddings.dim;
    for (const auto& rec : embeddings.records) {
        if (keep.count({rec.label, rec.id})) out.records.push_back(rec);
    }
    return out;
}

SweepTable downsample_sweep(const LabeledEmbeddings& embeddings, std::span<const double> fractions,
                            const SweepOptions& options) {
    if (fractions.empty()) throw DegenerateInput("sweep needs at least one fraction");
    for (std::size_t i = 0; i < fractions.size(); ++i) {
        if (!(fractions[i] > 0.0 && fractions[i] <= 1.0)) {
            throw DegenerateInput("fraction " + shortest(fractions[i]) + " outside (0, 1]");
        }
        if (i > 0 && !(fractions[i] < fractions[i - 1])) {
            throw DegenerateInput("fractions must be strictly decreasing");
        }
    }
    SweepTable table;
    table.seed = options.seed;
    table.stratified = options.stratified;
    for (std::size_t r = 0; r < fractions.size(); ++r) {
        const LabeledEmbeddings subset =
            subsample_embeddings(embeddings, fractions[r], derive_seed(options.seed, r), options.stratified);
        SweepRow row;
        row.fraction = fractions[r];
        std::size_t texts = 0;
        for (const auto& [label, ids] : texts_by_class(subset)) texts += ids.size();
        row.training_set_size = texts;
        row.profile = profile_dataset(group_by_label(subset), options.profile);
        table.rows.push_back(std::move(row));
    }
    return table;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw DegenerateInput("pearson needs equal lengths, got " + std::to_string(x.size()) + " and " +
                              std::to_string(y.size()));
    }
    const std::size_t n = x.size();
    if (n < 2) throw DegenerateInput("pearson needs at least 2 samples, got " + std::to_string(n));
    auto constant = [](std::span<const double> v) {
        return std::all_of(v.begin(), v.end(), [&](double a) { return a == v.front(); });
    };
    if (constant(x) || constant(y)) throw DegenerateInput("pearson input has zero variance");

    CompensatedSum sx, sy;
    for (std::size_t i = 0; i < n; ++i) {
        sx.add(x[i]);
        sy.add(y[i]);
    }
    const double mx = sx.value() / static_cast<double>(n);
    const double my = sy.value() / static_cast<double>(n);
    CompensatedSum sxy, sxx, syy;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy.add(dx * dy);
        sxx.add(dx * dx);
        syy.add(dy * dy);
    }
    const double denom = std::sqrt(sxx.value() * syy.value());
    if (!(denom > 0.0)) throw DegenerateInput("pearson input has zero variance");
    return std::clamp(sxy.value() / denom, -1.0, 1.0);
}

std::optional<double> metric_value(const MetricReport& report, const std::string& metric) {
    if (metric == "diversity") return report.diversity;
    if (metric == "density") return report.density;
    if (metric == "density_log") return report.density_log;
    if (metric == "homogeneity") return report.homogeneity;
    return std::nullopt;
}

CorrelationReport correlation_report(const SweepTable& sweep, const std::vector<std::string>& score_names) {
    CorrelationReport report;
    for (const auto& metric : kCorrelatedMetrics) {
        for (const auto& score : score_names) {
            CorrelationEntry entry;
            entry.metric = metric;
            entry.score = score;
            entry.count = sweep.rows.size();
            std::vector<double> xs, ys;
            for (const auto& row : sweep.rows) {
                const auto m = metric_value(row.profile.final, metric);
                const auto s = row.scores.find(score);
                if (!m) {
                    entry.error = metric + " missing at fraction " + shortest(row.fraction);
                    break;
                }
                if (s == row.scores.end()) {
                    entry.error = "score '" + score + "' missing at fraction " + shortest(row.fraction);
                    break;
                }
                xs.push_back(*m);
                ys.push_back(s->second);
            }
            if (!entry.error) {
                try {
                    entry.pearson_r = pearson(xs, ys);
                } catch (const DegenerateInput& e) {
                    entry.error = std::string("degenerate: ") + e.what();
                }
            }
            report.entries.push_back(std::move(entry));
        }
    }
    return report;
}

void attach_scores(SweepTable& sweep, const ScoreTable& scores) {
    std::vector<std::string> unmatched;
    std::vector<bool> used(scores.rows.size(), false);
    for (auto& row : sweep.rows) {
        bool found = false;
        for (std::size_t k = 0; k < scores.rows.size(); ++k) {
            if (scores.rows[k].first == row.fraction) {
                row.scores = scores.rows[k].second;
                used[k] = true;
                found = true;
                break;
            }
        }
        if (!found) unmatched.push_back(shortest(row.fraction) + " (metrics only)");
    }
    for (std::size_t k = 0; k < scores.rows.size(); ++k) {
        if (!used[k]) unmatched.push_back(shortest(scores.rows[k].first) + " (scores only)");
    }
    if (!unmatched.empty()) {
        std::string msg = "fraction join mismatch:";
        for (const auto& u : unmatched) msg += " " + u;
        throw JoinMismatch(msg);
    }
}

}  // namespace textchar
