#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dea/analysis.hpp"
#include "dea/dataset.hpp"
#include "dea/models.hpp"

namespace dea::report {

enum class Format { Csv, Json, Markdown };

std::optional<Format> parse_format(std::string_view token);

struct Cell {
  enum class Kind { Empty, Text, Integer, Real, Score, Rate };

  Kind kind = Kind::Empty;
  std::string text;
  double value = 0;
  long long integer = 0;
  std::optional<int> rank;  // only for ranked columns

  static Cell empty() { return {}; }
  static Cell of_text(std::string s) { return {Kind::Text, std::move(s), 0, 0, {}}; }
  static Cell of_integer(long long v) { return {Kind::Integer, {}, 0, v, {}}; }
  static Cell of_real(double v) { return {Kind::Real, {}, v, 0, {}}; }
  static Cell of_rate(double v) { return {Kind::Rate, {}, v, 0, {}}; }
  static Cell of_score(double v, std::optional<int> rank = {}) {
    return {Kind::Score, {}, v, 0, rank};
  }
};

struct Column {
  std::string name;   // csv/json key
  std::string label;  // markdown header
  /// Emits an extra `<name>_rank` field in csv/json; markdown shows "score/rank".
  bool ranked = false;
};

struct Table {
  std::vector<Column> columns;
  std::vector<std::vector<Cell>> rows;
};

/// csv: RFC-4180 quoting, full precision. json: array of objects, full
/// precision. md: aligned pipe table, scores to 2 decimals, rates to 1
/// decimal with zero rates as a literal "0".
std::string render_table(const Table& table, Format format);

/// Reads a json rendering back into a flat table (ranked columns come back
/// as separate `<name>_rank` integer columns).
Table table_from_json(std::string_view json);

Table stats_table(std::span<const StatsRow> rows);
Table correlation_table(const CorrelationMatrix& corr);
Table evaluation_table(const Dataset& d, std::span<const EfficiencyResult> results,
                       BandThresholds thresholds = {});
Table rank_table(std::span<const EfficiencyResult> results, BandThresholds thresholds = {});
/// Joint layout: EE/EPI with ranks, rate columns per indicator, meta, Mean row.
Table comparison_table(const ComparisonTable& comparison, BandThresholds thresholds = {});

}  // namespace dea::report
