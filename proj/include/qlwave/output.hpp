// CSV and JSON artifacts of a run directory.
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "qlwave/asymptotic.hpp"
#include "qlwave/pipeline.hpp"

namespace qlwave {

/// Numbers are written with 17 significant digits and '.' as separator.
std::string format_number(double x);

nlohmann::json to_json(const InequalityReport& r);
nlohmann::json to_json(const DecayFitReport& r);
nlohmann::json to_json(const EikonalBoundsReport& r);
nlohmann::json to_json(const SummaryRow& r);
nlohmann::json to_json(const Classification& c);
SummaryRow summary_from_json(const nlohmann::json& j);

std::vector<std::string> summary_header();
std::string summary_csv_line(const SummaryRow& r);

/// Writes summary.json, summary.csv, report.json, manifest.json, energy.csv,
/// inequalities.csv, snapshots/*.csv, and for eikonal runs
/// characteristics.csv and eikonal_fields.csv.
void write_run(const RunResult& r, const std::filesystem::path& dir);

void write_summary_table(const std::vector<SummaryRow>& rows, const std::filesystem::path& file);

}  // namespace qlwave
