#pragma once

#include <filesystem>
#include <string>

#include "textchar/analysis.hpp"

namespace textchar {

std::string profile_to_json(const DatasetProfile& profile);
std::string sweep_to_json(const SweepTable& sweep);

DatasetProfile profile_from_json(const std::string& text);
/// Accepts documents written by sweep_to_json. Per-group and per-class
/// sections are optional; only rows[].fraction and rows[].profile.final are required.
SweepTable sweep_from_json(const std::string& text);
SweepTable read_sweep_json(const std::filesystem::path& path);

/// Score CSV: a `fraction` column plus one numeric column per score.
ScoreTable read_score_csv(const std::filesystem::path& path);

/// metric,score,pearson_r,n,status with 17-significant-digit numbers.
std::string correlation_to_csv(const CorrelationReport& report);

}  // namespace textchar
