#include "textchar/analysis_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include <json.hpp>

#include "textchar/error.hpp"

namespace textchar {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json report_json(const MetricReport& r) {
    ordered_json j;
    j["count"] = r.count;
    j["dim"] = r.dim;
    j["diversity"] = r.diversity;
    // JSON has no infinity; an overflowing density is written as null.
    j["density"] = std::isfinite(r.density) ? ordered_json(r.density) : ordered_json(nullptr);
    j["density_log"] = r.density_log;
    j["homogeneity"] = r.homogeneity ? ordered_json(*r.homogeneity) : ordered_json(nullptr);
    j["degenerate_axes"] = r.degenerate_axes;
    if (r.homogeneity_skipped_reason) j["homogeneity_skipped_reason"] = *r.homogeneity_skipped_reason;
    if (!r.notes.empty()) j["notes"] = r.notes;
    return j;
}

MetricReport report_from(const json& j) {
    if (!j.is_object()) throw ParseError("metric report must be a JSON object");
    MetricReport r;
    r.count = j.value("count", std::size_t{0});
    r.dim = j.value("dim", std::size_t{0});
    r.diversity = j.value("diversity", 0.0);
    const bool has_density = j.contains("density") && !j.at("density").is_null();
    const bool has_log = j.contains("density_log") && !j.at("density_log").is_null();
    if (has_density) r.density = j.at("density").get<double>();
    if (has_log) r.density_log = j.at("density_log").get<double>();
    if (has_density && !has_log) r.density_log = std::log(r.density);
    if (!has_density && has_log) r.density = std::exp(r.density_log);
    if (j.contains("homogeneity") && !j.at("homogeneity").is_null()) r.homogeneity = j.at("homogeneity").get<double>();
    r.degenerate_axes = j.value("degenerate_axes", std::size_t{0});
    if (j.contains("homogeneity_skipped_reason")) {
        r.homogeneity_skipped_reason = j.at("homogeneity_skipped_reason").get<std::string>();
    }
    if (j.contains("notes")) r.notes = j.at("notes").get<std::vector<std::string>>();
    return r;
}

ordered_json profile_json(const DatasetProfile& p) {
    ordered_json j;
    ordered_json groups = ordered_json::array();
    for (const auto& [key, report] : p.per_group) {
        groups.push_back({{"label", key.label}, {"layer", key.layer}, {"report", report_json(report)}});
    }
    j["per_group"] = std::move(groups);
    ordered_json classes = ordered_json::object();
    for (const auto& [label, report] : p.per_class) classes[label] = report_json(report);
    j["per_class"] = std::move(classes);
    j["final"] = report_json(p.final);
    ordered_json sizes = ordered_json::object();
    for (const auto& [label, n] : p.class_sizes) sizes[label] = n;
    j["class_sizes"] = std::move(sizes);
    ordered_json skipped = ordered_json::array();
    for (const auto& key : p.homogeneity_skipped) skipped.push_back({{"label", key.label}, {"layer", key.layer}});
    j["homogeneity_skipped"] = std::move(skipped);
    j["homogeneity_cap"] = p.homogeneity_cap ? ordered_json(*p.homogeneity_cap) : ordered_json(nullptr);
    return j;
}

DatasetProfile profile_from(const json& j) {
    if (!j.is_object()) throw ParseError("profile must be a JSON object");
    DatasetProfile p;
    if (!j.contains("final")) throw ParseError("profile lacks a `final` block");
    p.final = report_from(j.at("final"));
    if (j.contains("per_group")) {
        for (const auto& g : j.at("per_group")) {
            GroupKey key{g.at("label").get<std::string>(), g.value("layer", std::string(kDefaultLayer))};
            p.per_group.emplace(key, report_from(g.at("report")));
        }
    }
    if (j.contains("per_class")) {
        for (const auto& [label, r] : j.at("per_class").items()) p.per_class.emplace(label, report_from(r));
    }
    if (j.contains("class_sizes")) {
        for (const auto& [label, n] : j.at("class_sizes").items()) p.class_sizes.emplace(label, n.get<std::size_t>());
    }
    if (j.contains("homogeneity_skipped")) {
        for (const auto& g : j.at("homogeneity_skipped")) {
            p.homogeneity_skipped.push_back({g.at("label").get<std::string>(), g.at("layer").get<std::string>()});
        }
    }
    if (j.contains("homogeneity_cap") && !j.at("homogeneity_cap").is_null()) {
        p.homogeneity_cap = j.at("homogeneity_cap").get<std::size_t>();
    }
    return p;
}

template <typename F>
auto parse_document(const std::string& text, const char* what, F&& build) {
    try {
        return build(json::parse(text));
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed ") + what + " JSON: " + e.what());
    }
}

}  // namespace

std::string profile_to_json(const DatasetProfile& profile) {
    ordered_json j;
    j["kind"] = "profile";
    j["profile"] = profile_json(profile);
    return j.dump(2) + "\n";
}

std::string sweep_to_json(const SweepTable& sweep) {
    ordered_json j;
    j["kind"] = "sweep";
    j["seed"] = sweep.seed;
    j["stratified"] = sweep.stratified;
    ordered_json rows = ordered_json::array();
    for (const auto& row : sweep.rows) {
        ordered_json r;
        r["fraction"] = row.fraction;
        r["training_set_size"] = row.training_set_size;
        if (!row.scores.empty()) r["scores"] = row.scores;
        r["profile"] = profile_json(row.profile);
        rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    return j.dump(2) + "\n";
}

DatasetProfile profile_from_json(const std::string& text) {
    return parse_document(text, "profile", [](const json& j) {
        return profile_from(j.contains("profile") ? j.at("profile") : j);
    });
}

SweepTable sweep_from_json(const std::string& text) {
    return parse_document(text, "sweep", [](const json& j) {
        if (!j.is_object() || !j.contains("rows") || !j.at("rows").is_array()) {
            throw ParseError("sweep document needs a `rows` array");
        }
        SweepTable table;
        table.seed = j.value("seed", std::uint64_t{0});
        table.stratified = j.value("stratified", true);
        for (const auto& r : j.at("rows")) {
            SweepRow row;
            if (!r.contains("fraction")) throw ParseError("sweep row lacks `fraction`");
            row.fraction = r.at("fraction").get<double>();
            row.training_set_size = r.value("training_set_size", std::size_t{0});
            if (r.contains("scores")) row.scores = r.at("scores").get<std::map<std::string, double>>();
            if (!r.contains("profile")) throw ParseError("sweep row lacks `profile`");
            row.profile = profile_from(r.at("profile"));
            table.rows.push_back(std::move(row));
        }
        return table;
    });
}

SweepTable read_sweep_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return sweep_from_json(text);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

ScoreTable read_score_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    std::string line;
    std::size_t line_no = 0;
    auto split = [](const std::string& s) {
        std::vector<std::string> out;
        std::stringstream ss(s);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            const auto a = cell.find_first_not_of(" \t\r");
            const auto b = cell.find_last_not_of(" \t\r");
            out.push_back(a == std::string::npos ? std::string() : cell.substr(a, b - a + 1));
        }
        if (!s.empty() && s.back() == ',') out.emplace_back();
        return out;
    };
    std::vector<std::string> header;
    while (header.empty() && std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") != std::string::npos) header = split(line);
    }
    ScoreTable table;
    const auto frac_it = std::find(header.begin(), header.end(), "fraction");
    if (frac_it == header.end()) throw ParseError(path.string() + ": score CSV needs a `fraction` column");
    const auto frac_col = static_cast<std::size_t>(frac_it - header.begin());
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (c != frac_col) table.names.push_back(header[c]);
    }
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto cells = split(line);
        const std::string where = path.string() + ": line " + std::to_string(line_no) + ": ";
        if (cells.size() != header.size()) {
            throw ParseError(where + "expected " + std::to_string(header.size()) + " fields, found " +
                             std::to_string(cells.size()));
        }
        const auto fraction = parse_decimal(cells[frac_col]);
        if (!fraction) throw ParseError(where + "fraction is not a number: '" + cells[frac_col] + "'");
        std::map<std::string, double> values;
        for (std::size_t c = 0; c < header.size(); ++c) {
            if (c == frac_col) continue;
            const auto v = parse_decimal(cells[c]);
            if (!v || !std::isfinite(*v)) {
                throw ParseError(where + "column `" + header[c] + "` is not a finite number: '" + cells[c] + "'");
            }
            values[header[c]] = *v;
        }
        table.rows.emplace_back(*fraction, std::move(values));
    }
    return table;
}

std::string correlation_to_csv(const CorrelationReport& report) {
    std::string out = "metric,score,pearson_r,n,status\n";
    for (const auto& e : report.entries) {
        out += e.metric + "," + e.score + ",";
        if (e.pearson_r) out += format_decimal(*e.pearson_r);
        out += "," + std::to_string(e.count) + ",";
        if (e.error) {
            std::string status = *e.error;
            std::replace(status.begin(), status.end(), ',', ';');
            std::replace(status.begin(), status.end(), '\n', ' ');
            out += status;
        } else {
            out += "ok";
        }
        out += "\n";
    }
    return out;
}

}  // namespace textchar
