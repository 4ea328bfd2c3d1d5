#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "dea/dataset.hpp"
#include "text.hpp"

namespace dea {

std::vector<std::string> split_csv_record(std::string_view line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cell.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
    } else {
      cell.push_back(ch);
    }
  }
  if (quoted) throw DataError("unterminated quoted field");
  cells.push_back(std::move(cell));
  return cells;
}

namespace {

struct Record {
  std::size_t line = 0;
  std::vector<std::string> cells;
};

std::vector<Record> read_records(std::istream& in) {
  std::vector<Record> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::trim(line).empty()) continue;
    try {
      records.push_back({line_no, split_csv_record(line)});
    } catch (const DataError& e) {
      throw DataError(e.what(), line_no);
    }
    for (auto& cell : records.back().cells) cell = std::string(detail::trim(cell));
  }
  return records;
}

double parse_cell(const std::string& text, std::size_t row, std::size_t column) {
  double value = 0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (text.empty() || ec != std::errc() || ptr != last) {
    throw DataError("non-numeric cell '" + text + "'", row, column);
  }
  return value;
}

}  // namespace

Dataset load_csv(std::istream& in, const CsvOptions& options) {
  const auto records = read_records(in);
  if (records.empty()) throw DataError("malformed header: empty input");

  const auto& header = records.front();
  if (header.cells.empty() || header.cells.front() != "dmu") {
    throw DataError("malformed header: first column must be 'dmu'", header.line, 1);
  }
  std::vector<Indicator> indicators;
  std::unordered_set<std::string> names;
  for (std::size_t c = 1; c < header.cells.size(); ++c) {
    const auto& h = header.cells[c];
    const auto colon = h.find(':');
    if (colon == std::string::npos) {
      throw DataError("malformed header '" + h + "': expected <role>:<name>", header.line,
                      c + 1);
    }
    const auto role = parse_role(detail::trim(std::string_view(h).substr(0, colon)));
    const auto name = std::string(detail::trim(std::string_view(h).substr(colon + 1)));
    if (!role) {
      throw DataError("malformed header '" + h + "': unknown role", header.line, c + 1);
    }
    if (name.empty()) throw DataError("malformed header: empty indicator name", header.line, c + 1);
    if (!names.insert(name).second) {
      throw DataError("malformed header: duplicate indicator '" + name + "'", header.line, c + 1);
    }
    indicators.push_back({name, *role, ""});
  }
  if (indicators.empty()) throw DataError("malformed header: no indicator columns", header.line);
  if (records.size() < 2) throw DataError("no data rows");

  const auto rows = records.size() - 1;
  const auto cols = indicators.size();
  Eigen::MatrixXd values(rows, cols);
  std::vector<std::string> dmus;
  std::unordered_set<std::string> seen;
  for (std::size_t r = 0; r < rows; ++r) {
    const auto& rec = records[r + 1];
    if (rec.cells.size() != cols + 1) {
      throw DataError("expected " + std::to_string(cols + 1) + " cells, found " +
                          std::to_string(rec.cells.size()),
                      rec.line);
    }
    if (rec.cells.front().empty()) throw DataError("empty dmu name", rec.line, 1);
    if (!seen.insert(rec.cells.front()).second) {
      throw DataError("duplicate dmu '" + rec.cells.front() + "'", rec.line, 1);
    }
    dmus.push_back(rec.cells.front());
    for (std::size_t c = 0; c < cols; ++c) {
      const double v = parse_cell(rec.cells[c + 1], rec.line, c + 2);
      if (!std::isfinite(v)) throw DataError("non-finite value", rec.line, c + 2);
      const bool modelled = indicators[c].role != Role::Meta;
      if (modelled && (v < 0.0 || (v == 0.0 && !options.epsilon_shift))) {
        throw DataError("non-positive value in column '" + indicators[c].name + "'", rec.line,
                        c + 2);
      }
      values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
    }
  }

  if (options.epsilon_shift) {
    for (std::size_t c = 0; c < cols; ++c) {
      if (indicators[c].role == Role::Meta) continue;
      auto col = values.col(static_cast<Eigen::Index>(c));
      const double shift = 1e-6 * col.maxCoeff();
      for (Eigen::Index r = 0; r < col.size(); ++r) {
        if (col(r) != 0.0) continue;
        if (shift <= 0.0) {
          throw DataError("non-positive value: column '" + indicators[c].name + "' is all zero",
                          records[static_cast<std::size_t>(r) + 1].line, c + 2);
        }
        col(r) = shift;
        if (options.on_warning) {
          options.on_warning("epsilon-shift: " + dmus[static_cast<std::size_t>(r)] + " / " +
                             indicators[c].name + " 0 -> " + detail::format_g17(shift));
        }
      }
    }
  }

  Dataset d(std::move(dmus), std::move(indicators), std::move(values));
  require_valid(d);
  return d;
}

Dataset load_csv_file(const std::string& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw DataError("file not found: " + path);
  return load_csv(in, options);
}

std::string render_csv(const Dataset& d) {
  std::string out = "dmu";
  for (const auto& ind : d.indicators()) {
    out += ',';
    out += detail::csv_quote(std::string(role_token(ind.role)) + ":" + ind.name);
  }
  out += '\n';
  for (std::size_t i = 0; i < d.dmu_count(); ++i) {
    out += detail::csv_quote(d.dmu_names()[i]);
    for (std::size_t j = 0; j < d.indicator_count(); ++j) {
      out += ',';
      out += detail::format_g17(
          d.values()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    }
    out += '\n';
  }
  return out;
}

std::vector<StatsSpec> read_stats_spec(std::istream& in) {
  const auto records = read_records(in);
  if (records.empty()) throw DataError("stats spec: empty input");
  const std::vector<std::string> expected{"name", "role", "min", "max", "mean", "sd"};
  if (records.front().cells != expected) {
    throw DataError("stats spec: header must be name,role,min,max,mean,sd", records.front().line);
  }
  std::vector<StatsSpec> specs;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.cells.size() != expected.size()) {
      throw DataError("stats spec: expected 6 fields", rec.line);
    }
    StatsSpec s;
    s.name = rec.cells[0];
    if (s.name.empty()) throw DataError("stats spec: empty name", rec.line, 1);
    const auto role = parse_role(rec.cells[1]);
    if (!role) throw DataError("stats spec: unknown role '" + rec.cells[1] + "'", rec.line, 2);
    s.role = *role;
    s.min = parse_cell(rec.cells[2], rec.line, 3);
    s.max = parse_cell(rec.cells[3], rec.line, 4);
    s.mean = parse_cell(rec.cells[4], rec.line, 5);
    s.sd = parse_cell(rec.cells[5], rec.line, 6);
    specs.push_back(std::move(s));
  }
  return specs;
}

std::vector<StatsSpec> read_stats_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("file not found: " + path);
  return read_stats_spec(in);
}

}  // namespace dea
