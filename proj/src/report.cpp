#include "dea/report.hpp"

#include <algorithm>
#include <stdexcept>

#include "json.hpp"

#include "text.hpp"

namespace dea::report {

using json = nlohmann::ordered_json;

std::optional<Format> parse_format(std::string_view token) {
  if (token == "csv") return Format::Csv;
  if (token == "json") return Format::Json;
  if (token == "md") return Format::Markdown;
  return std::nullopt;
}

namespace {

// Rates at or below this print as a literal "0" in markdown.
constexpr double kZeroRate = 1e-5;

std::string md_cell(const Cell& c) {
  switch (c.kind) {
    case Cell::Kind::Empty: return "";
    case Cell::Kind::Text: return c.text;
    case Cell::Kind::Integer: return std::to_string(c.integer);
    case Cell::Kind::Real: return detail::format_fixed(c.value, 2);
    case Cell::Kind::Rate: return c.value <= kZeroRate ? "0" : detail::format_fixed(c.value, 1);
    case Cell::Kind::Score: {
      auto s = detail::format_fixed(c.value, 2);
      if (c.rank) s += "/" + std::to_string(*c.rank);
      return s;
    }
  }
  return "";
}

std::string plain_cell(const Cell& c) {
  switch (c.kind) {
    case Cell::Kind::Empty: return "";
    case Cell::Kind::Text: return c.text;
    case Cell::Kind::Integer: return std::to_string(c.integer);
    case Cell::Kind::Real:
    case Cell::Kind::Rate:
    case Cell::Kind::Score: return detail::format_g17(c.value);
  }
  return "";
}

json json_cell(const Cell& c) {
  switch (c.kind) {
    case Cell::Kind::Empty: return nullptr;
    case Cell::Kind::Text: return c.text;
    case Cell::Kind::Integer: return c.integer;
    case Cell::Kind::Real:
    case Cell::Kind::Rate:
    case Cell::Kind::Score: return c.value;
  }
  return nullptr;
}

bool is_numeric(const Table& t, std::size_t col) {
  for (const auto& row : t.rows) {
    const auto k = row[col].kind;
    if (k == Cell::Kind::Text) return false;
  }
  return true;
}

void check_shape(const Table& t) {
  for (const auto& row : t.rows) {
    if (row.size() != t.columns.size()) throw std::invalid_argument("table row width mismatch");
  }
}

std::string render_md(const Table& t) {
  const auto cols = t.columns.size();
  std::vector<std::vector<std::string>> cells;
  std::vector<std::size_t> width(cols, 3);
  for (std::size_t j = 0; j < cols; ++j) width[j] = std::max(width[j], t.columns[j].label.size());
  for (const auto& row : t.rows) {
    auto& out = cells.emplace_back();
    for (std::size_t j = 0; j < cols; ++j) {
      out.push_back(md_cell(row[j]));
      width[j] = std::max(width[j], out.back().size());
    }
  }
  std::vector<bool> right(cols);
  for (std::size_t j = 0; j < cols; ++j) right[j] = is_numeric(t, j);

  auto pad = [&](const std::string& s, std::size_t j) {
    const std::string fill(width[j] - s.size(), ' ');
    return right[j] ? fill + s : s + fill;
  };
  std::string out = "|";
  for (std::size_t j = 0; j < cols; ++j) out += " " + pad(t.columns[j].label, j) + " |";
  out += "\n|";
  for (std::size_t j = 0; j < cols; ++j) {
    out += right[j] ? " " + std::string(width[j] - 1, '-') + ": |"
                    : " " + std::string(width[j], '-') + " |";
  }
  out += "\n";
  for (const auto& row : cells) {
    out += "|";
    for (std::size_t j = 0; j < cols; ++j) out += " " + pad(row[j], j) + " |";
    out += "\n";
  }
  return out;
}

std::string render_csv(const Table& t) {
  std::vector<std::string> header;
  for (const auto& c : t.columns) {
    header.push_back(c.name);
    if (c.ranked) header.push_back(c.name + "_rank");
  }
  auto line = [](const std::vector<std::string>& fields) {
    std::string s;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) s += ',';
      s += detail::csv_quote(fields[i]);
    }
    return s + "\n";
  };
  std::string out = line(header);
  for (const auto& row : t.rows) {
    std::vector<std::string> fields;
    for (std::size_t j = 0; j < t.columns.size(); ++j) {
      fields.push_back(plain_cell(row[j]));
      if (t.columns[j].ranked) fields.push_back(row[j].rank ? std::to_string(*row[j].rank) : "");
    }
    out += line(fields);
  }
  return out;
}

std::string render_json(const Table& t) {
  json arr = json::array();
  for (const auto& row : t.rows) {
    json obj = json::object();
    for (std::size_t j = 0; j < t.columns.size(); ++j) {
      obj[t.columns[j].name] = json_cell(row[j]);
      if (t.columns[j].ranked) {
        obj[t.columns[j].name + "_rank"] = row[j].rank ? json(*row[j].rank) : json(nullptr);
      }
    }
    arr.push_back(std::move(obj));
  }
  return arr.dump(2) + "\n";
}

}  // namespace

std::string render_table(const Table& table, Format format) {
  check_shape(table);
  switch (format) {
    case Format::Csv: return render_csv(table);
    case Format::Json: return render_json(table);
    case Format::Markdown: return render_md(table);
  }
  return {};
}

Table table_from_json(std::string_view text) {
  const auto doc = json::parse(text);
  if (!doc.is_array()) throw std::invalid_argument("table json: expected an array");
  Table t;
  for (const auto& obj : doc) {
    if (!obj.is_object()) throw std::invalid_argument("table json: expected objects");
    if (t.columns.empty()) {
      for (const auto& [key, _] : obj.items()) t.columns.push_back({key, key, false});
    }
    if (obj.size() != t.columns.size()) throw std::invalid_argument("table json: ragged rows");
    auto& row = t.rows.emplace_back();
    for (const auto& col : t.columns) {
      const auto& v = obj.at(col.name);
      if (v.is_null()) row.push_back(Cell::empty());
      else if (v.is_string()) row.push_back(Cell::of_text(v.get<std::string>()));
      else if (v.is_number_integer()) row.push_back(Cell::of_integer(v.get<long long>()));
      else if (v.is_number()) row.push_back(Cell::of_real(v.get<double>()));
      else throw std::invalid_argument("table json: unsupported value for '" + col.name + "'");
    }
  }
  return t;
}

Table stats_table(std::span<const StatsRow> rows) {
  Table t;
  t.columns = {{"indicator", "Indicator"}, {"max", "Max"}, {"min", "Min"},
               {"mean", "Average"}, {"sd", "SD"}};
  for (const auto& r : rows) {
    t.rows.push_back({Cell::of_text(r.indicator), Cell::of_real(r.max), Cell::of_real(r.min),
                      Cell::of_real(r.mean), Cell::of_real(r.sd)});
  }
  return t;
}

Table correlation_table(const CorrelationMatrix& corr) {
  Table t;
  t.columns.push_back({"indicator", std::string(to_string(corr.method))});
  for (const auto& label : corr.labels) t.columns.push_back({label, label});
  for (std::size_t i = 0; i < corr.labels.size(); ++i) {
    auto& row = t.rows.emplace_back();
    row.push_back(Cell::of_text(corr.labels[i]));
    for (std::size_t j = 0; j < corr.labels.size(); ++j) {
      row.push_back(Cell::of_real(corr.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))));
    }
  }
  return t;
}

namespace {

std::vector<int> ranks_of(std::span<const EfficiencyResult> results) {
  std::vector<double> scores;
  for (const auto& r : results) scores.push_back(r.score);
  return rank_scores(scores);
}

std::string reference_set(const Dataset& d, const EfficiencyResult& r) {
  std::string out;
  for (Eigen::Index j = 0; j < r.lambda.size(); ++j) {
    if (r.lambda(j) <= 1e-7) continue;
    if (!out.empty()) out += "; ";
    out += d.dmu_names()[static_cast<std::size_t>(j)] + "(" + detail::format_fixed(r.lambda(j), 4) + ")";
  }
  return out;
}

}  // namespace

Table evaluation_table(const Dataset& d, std::span<const EfficiencyResult> results,
                       BandThresholds thresholds) {
  Table t;
  t.columns = {{"dmu", "DMU"}, {"score", "Score", true}, {"band", "Band"}, {"phi", "Phi"}};
  const auto inputs = d.columns_with(Role::Input);
  const auto good = d.columns_with(Role::DesirableOutput);
  const auto bad = d.columns_with(Role::UndesirableOutput);
  const bool sbm = !results.empty() && results.front().kind == ModelKind::SbmUndesirable;
  auto name = [&](std::size_t j) { return d.indicators()[j].name; };
  for (auto j : inputs) t.columns.push_back({"reduction:" + name(j), name(j) + " reduction (%)"});
  if (sbm) {
    for (auto j : bad) t.columns.push_back({"reduction:" + name(j), name(j) + " reduction (%)"});
  }
  for (auto j : good) t.columns.push_back({"increase:" + name(j), name(j) + " increase (%)"});
  t.columns.push_back({"reference_set", "Reference set"});

  const auto ranks = ranks_of(results);
  ModelSpec spec{ModelKind::SbmUndesirable, ReturnsToScale::crs(), true};
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    const auto rates = improvement_targets(r, build_instance(d, r.dmu, spec));
    auto& row = t.rows.emplace_back();
    row.push_back(Cell::of_text(r.dmu));
    row.push_back(Cell::of_score(r.score, ranks[i]));
    row.push_back(Cell::of_integer(band_of(r.score, thresholds)));
    row.push_back(Cell::of_real(r.phi));
    for (auto v : rates.input_reduction_pct) row.push_back(Cell::of_rate(v));
    if (sbm) {
      for (auto v : rates.bad_reduction_pct) row.push_back(Cell::of_rate(v));
    }
    for (auto v : rates.good_increase_pct) row.push_back(Cell::of_rate(v));
    row.push_back(Cell::of_text(reference_set(d, r)));
  }
  return t;
}

Table rank_table(std::span<const EfficiencyResult> results, BandThresholds thresholds) {
  Table t;
  t.columns = {{"dmu", "DMU"}, {"score", "Score", true}, {"band", "Band"}};
  const auto ranks = ranks_of(results);
  for (std::size_t i = 0; i < results.size(); ++i) {
    t.rows.push_back({Cell::of_text(results[i].dmu), Cell::of_score(results[i].score, ranks[i]),
                      Cell::of_integer(band_of(results[i].score, thresholds))});
  }
  return t;
}

Table comparison_table(const ComparisonTable& cmp, BandThresholds thresholds) {
  Table t;
  t.columns = {{"dmu", "DMU"}, {"ee", "EE", true}, {"epi", "EPI", true}, {"band", "Level"}};
  for (const auto& n : cmp.inputs) {
    t.columns.push_back({"ccr_reduction:" + n, n + " red. CCR (%)"});
    t.columns.push_back({"uom_reduction:" + n, n + " red. UOM (%)"});
  }
  for (const auto& n : cmp.bad_outputs) {
    t.columns.push_back({"uom_reduction:" + n, n + " red. UOM (%)"});
  }
  for (const auto& n : cmp.good_outputs) {
    t.columns.push_back({"ccr_increase:" + n, n + " inc. CCR (%)"});
    t.columns.push_back({"uom_increase:" + n, n + " inc. UOM (%)"});
  }
  const auto meta = cmp.rows.empty() ? cmp.mean.meta : cmp.rows.front().meta;
  for (const auto& [n, _] : meta) t.columns.push_back({"meta:" + n, n});

  auto rate_cells = [&](std::vector<Cell>& row, const Eigen::VectorXd& ccr_in,
                        const Eigen::VectorXd& sbm_in, const Eigen::VectorXd& sbm_bad,
                        const Eigen::VectorXd& ccr_good, const Eigen::VectorXd& sbm_good) {
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(cmp.inputs.size()); ++i) {
      row.push_back(Cell::of_rate(ccr_in(i)));
      row.push_back(Cell::of_rate(sbm_in(i)));
    }
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(cmp.bad_outputs.size()); ++i) {
      row.push_back(Cell::of_rate(sbm_bad(i)));
    }
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(cmp.good_outputs.size()); ++i) {
      row.push_back(Cell::of_rate(ccr_good(i)));
      row.push_back(Cell::of_rate(sbm_good(i)));
    }
  };

  for (const auto& r : cmp.rows) {
    auto& row = t.rows.emplace_back();
    row.push_back(Cell::of_text(r.dmu));
    row.push_back(Cell::of_score(r.ee, r.ee_rank));
    row.push_back(Cell::of_score(r.epi, r.epi_rank));
    row.push_back(Cell::of_integer(band_of(r.epi, thresholds)));
    rate_cells(row, r.ccr_rates.input_reduction_pct, r.sbm_rates.input_reduction_pct,
               r.sbm_rates.bad_reduction_pct, r.ccr_rates.good_increase_pct,
               r.sbm_rates.good_increase_pct);
    for (const auto& [_, v] : r.meta) row.push_back(Cell::of_real(v));
  }
  if (!cmp.rows.empty()) {
    const auto& m = cmp.mean;
    auto& row = t.rows.emplace_back();
    row.push_back(Cell::of_text("Mean"));
    row.push_back(Cell::of_score(m.ee));
    row.push_back(Cell::of_score(m.epi));
    row.push_back(Cell::empty());
    rate_cells(row, m.ccr_input_reduction, m.sbm_input_reduction, m.sbm_bad_reduction,
               m.ccr_good_increase, m.sbm_good_increase);
    for (const auto& [_, v] : m.meta) row.push_back(Cell::of_real(v));
  }
  return t;
}

}  // namespace dea::report
