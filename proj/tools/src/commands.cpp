#include "commands.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "svg_chart.hpp"
#include "textchar/analysis.hpp"
#include "textchar/analysis_io.hpp"
#include "textchar/error.hpp"
#include "textchar/ingestion.hpp"

namespace textchar::cli {
namespace {

struct SimulateArgs {
    std::string scenario;
    std::size_t dims = 0;
    std::uint64_t seed = 0;
    std::size_t points = 10000;
    double std = 1.0;
    std::string out;
    std::string svg;
    std::optional<double> radius;
    std::optional<double> spacing;
    bool no_homogeneity = false;
};

struct ProfileArgs {
    std::string input;
    std::string format;
    std::string fractions;
    std::uint64_t seed = 0;
    std::string out;
    std::optional<std::size_t> homogeneity_cap;
    bool global_sampling = false;
    bool no_homogeneity = false;
};

struct PoolArgs {
    std::string input;
    std::string out;
};

struct CorrelateArgs {
    std::string metrics;
    std::string scores;
    std::string out;
};

void write_output(const std::string& path, const std::string& content, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << content;
        return;
    }
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError("cannot open '" + path + "' for writing");
    file << content;
    file.flush();
    if (!file) throw IoError("failed writing '" + path + "'");
}

std::string x_label(ScenarioKind kind) {
    switch (kind) {
        case ScenarioKind::down_sampling: return "fraction of base cluster";
        case ScenarioKind::varying_spread: return "per-axis std";
        case ScenarioKind::outliers: return "outliers added";
        case ScenarioKind::sub_clusters: return "sub-clusters";
    }
    return "parameter";
}

std::vector<double> parse_fractions(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        const auto v = parse_decimal(cell);
        if (!v || !(*v > 0.0 && *v <= 1.0)) {
            throw CLI::ValidationError("--fractions", "'" + cell + "' is not a fraction in (0, 1]");
        }
        out.push_back(*v);
    }
    if (out.empty()) throw CLI::ValidationError("--fractions", "empty list");
    return out;
}

int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err) {
    const auto kind = parse_scenario_kind(args.scenario);
    BlobSpec base;
    base.count = args.points;
    base.dim = args.dims;
    base.std = args.std;
    base.seed = args.seed;
    ScenarioSpec spec = make_scenario(*kind, base);
    spec.outlier_radius = args.radius;
    spec.spacing = args.spacing;

    MetricOptions options;
    options.compute_homogeneity = !args.no_homogeneity;
    const ScenarioResult result = run_scenario(spec, options);
    for (const auto& row : result.rows) {
        if (row.error) err << "warning: parameter " << format_decimal(row.parameter) << ": " << *row.error << "\n";
    }
    write_output(args.out, scenario_to_csv(result), out);
    if (!args.svg.empty()) write_output(args.svg, scenario_to_svg(result), out);
    return kOk;
}

int cmd_profile(const ProfileArgs& args, std::ostream& out) {
    const auto format = parse_vector_format(args.format);
    const LabeledEmbeddings data = read_vectors(args.input, *format);

    ProfileOptions profile;
    profile.metrics.compute_homogeneity = !args.no_homogeneity;
    profile.homogeneity_cap = args.homogeneity_cap;
    profile.seed = args.seed;

    if (args.fractions.empty()) {
        write_output(args.out, profile_to_json(profile_dataset(group_by_label(data), profile)), out);
        return kOk;
    }
    SweepOptions sweep;
    sweep.profile = profile;
    sweep.seed = args.seed;
    sweep.stratified = !args.global_sampling;
    const auto fractions = parse_fractions(args.fractions);
    write_output(args.out, sweep_to_json(downsample_sweep(data, fractions, sweep)), out);
    return kOk;
}

int cmd_pool(const PoolArgs& args) {
    LabeledEmbeddings pooled;
    for (const auto& seq : read_token_sequences(args.input)) {
        EmbeddingRecord rec;
        rec.id = seq.id;
        rec.label = seq.label;
        rec.layer = seq.layer;
        rec.vector = mean_pool(seq);
        if (pooled.records.empty()) {
            pooled.dim = rec.vector.size();
        } else if (rec.vector.size() != pooled.dim) {
            throw DimensionMismatch("sequence '" + rec.id + "' pools to " + std::to_string(rec.vector.size()) +
                                    " values, expected " + std::to_string(pooled.dim));
        }
        pooled.records.push_back(std::move(rec));
    }
    write_vectors(pooled, args.out, VectorFormat::jsonl);
    return kOk;
}

int cmd_correlate(const CorrelateArgs& args, std::ostream& out, std::ostream& err) {
    SweepTable sweep = read_sweep_json(args.metrics);
    const ScoreTable scores = read_score_csv(args.scores);
    attach_scores(sweep, scores);
    std::vector<std::string> names = scores.names;
    std::sort(names.begin(), names.end());
    const CorrelationReport report = correlation_report(sweep, names);
    for (const auto& e : report.entries) {
        if (e.error) err << "warning: " << e.metric << " vs " << e.score << ": " << *e.error << "\n";
    }
    write_output(args.out, correlation_to_csv(report), out);
    return kOk;
}

}  // namespace

std::string scenario_to_csv(const ScenarioResult& result) {
    std::string csv = "parameter,diversity,density,density_log,homogeneity\n";
    for (const auto& row : result.rows) {
        csv += format_decimal(row.parameter);
        if (row.report) {
            const auto& r = *row.report;
            csv += "," + format_decimal(r.diversity) + "," + format_decimal(r.density) + "," +
                   format_decimal(r.density_log) + ",";
            if (r.homogeneity) csv += format_decimal(*r.homogeneity);
        } else {
            csv += ",,,,";
        }
        csv += "\n";
    }
    return csv;
}

std::string scenario_to_svg(const ScenarioResult& result) {
    std::vector<double> x;
    ChartSeries div{"diversity", {}}, dens{"density (log)", {}}, hom{"homogeneity", {}};
    for (const auto& row : result.rows) {
        x.push_back(row.parameter);
        if (row.report) {
            div.values.emplace_back(row.report->diversity);
            dens.values.emplace_back(row.report->density_log);
            hom.values.push_back(row.report->homogeneity);
        } else {
            div.values.emplace_back();
            dens.values.emplace_back();
            hom.values.emplace_back();
        }
    }
    const std::string title = std::string(to_string(result.spec.kind)) + ", H = " +
                              std::to_string(result.spec.base.dim) + ", m = " +
                              std::to_string(result.spec.base.count) + ", seed " + std::to_string(result.seed);
    return render_trend_svg(title, x_label(result.spec.kind), x, {div, dens, hom});
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"textchar: diversity, density and homogeneity of embedding collections", "textchar"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Run a synthetic Gaussian-blob scenario and write metric trends");
    simulate->add_option("--scenario", sim.scenario, "Scenario to sweep")
        ->required()
        ->check(CLI::IsMember({"downsample", "spread", "outliers", "subclusters"}));
    simulate->add_option("--dims", sim.dims, "Dimensionality H")->required()->check(CLI::PositiveNumber);
    simulate->add_option("--seed", sim.seed, "Seed of the base blob; rows derive their own streams")->required();
    simulate->add_option("--points", sim.points, "Points in the base blob")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    simulate->add_option("--std", sim.std, "Per-axis std of the base blob")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    simulate->add_option("--out", sim.out, "CSV output file (default: stdout)");
    simulate->add_option("--svg", sim.svg, "Also write an SVG trend chart");
    simulate->add_option("--radius", sim.radius, "Outlier sphere radius (default: 1000 x std)")
        ->check(CLI::PositiveNumber);
    simulate->add_option("--spacing", sim.spacing, "Distance between sub-cluster centers (default: 5 x std)")
        ->check(CLI::NonNegativeNumber);
    simulate->add_flag("--no-homogeneity", sim.no_homogeneity, "Skip the O(m^2) homogeneity metric");

    ProfileArgs prof;
    auto* profile = app.add_subcommand("profile", "Profile an embedding file, optionally over a down-sampling sweep");
    profile->add_option("--input", prof.input, "Embedding file")->required()->check(CLI::ExistingFile);
    profile->add_option("--format", prof.format, "Input format")
        ->required()
        ->check(CLI::IsMember({"csv", "jsonl", "binary"}));
    profile->add_option("--fractions", prof.fractions, "Comma-separated decreasing fractions, e.g. 1.0,0.9,0.8");
    profile->add_option("--seed", prof.seed, "Sampling seed")->capture_default_str();
    profile->add_option("--out", prof.out, "JSON output file (default: stdout)");
    profile->add_option("--homogeneity-cap", prof.homogeneity_cap,
                        "Compute homogeneity on a seeded subsample of at most this many points per group")
        ->check(CLI::Range(std::size_t{3}, std::numeric_limits<std::size_t>::max()));
    profile->add_flag("--global-sampling", prof.global_sampling,
                      "Down-sample texts uniformly over the whole set instead of within each class");
    profile->add_flag("--no-homogeneity", prof.no_homogeneity, "Skip the O(m^2) homogeneity metric");

    PoolArgs pool_args;
    auto* pool = app.add_subcommand("pool", "Mean-pool token-level embeddings into sequence vectors");
    pool->add_option("--input", pool_args.input, "Token-level JSONL file")->required()->check(CLI::ExistingFile);
    pool->add_option("--out", pool_args.out, "Pooled JSONL output file")->required();

    CorrelateArgs corr;
    auto* correlate = app.add_subcommand("correlate", "Pearson correlation of sweep metrics with model scores");
    correlate->add_option("--metrics", corr.metrics, "Sweep JSON written by `profile --fractions`")
        ->required()
        ->check(CLI::ExistingFile);
    correlate->add_option("--scores", corr.scores, "CSV with a `fraction` column plus one column per score")
        ->required()
        ->check(CLI::ExistingFile);
    correlate->add_option("--out", corr.out, "CSV output file (default: stdout)");

    try {
        app.parse(argc, argv);
        if (*profile && !prof.fractions.empty()) parse_fractions(prof.fractions);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        const auto selected = app.get_subcommands();
        err << (selected.empty() ? app.help() : selected.front()->help());
        return kUsageError;
    }

    try {
        if (*simulate) return cmd_simulate(sim, out, err);
        if (*profile) return cmd_profile(prof, out);
        if (*pool) return cmd_pool(pool_args);
        if (*correlate) return cmd_correlate(corr, out, err);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kRuntimeError;
    }
    return kUsageError;
}

}  // namespace textchar::cli
