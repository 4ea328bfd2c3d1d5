#include "dea/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

namespace dea {

std::string_view role_token(Role role) {
  switch (role) {
    case Role::Input: return "in";
    case Role::DesirableOutput: return "out+";
    case Role::UndesirableOutput: return "out-";
    case Role::Meta: return "meta";
  }
  return "?";
}

std::optional<Role> parse_role(std::string_view token) {
  if (token == "in") return Role::Input;
  if (token == "out+") return Role::DesirableOutput;
  if (token == "out-") return Role::UndesirableOutput;
  if (token == "meta") return Role::Meta;
  return std::nullopt;
}

namespace {

std::string located(const std::string& what, std::optional<std::size_t> row,
                    std::optional<std::size_t> column) {
  if (!row && !column) return what;
  std::string out = what + " (";
  if (row) out += "row " + std::to_string(*row);
  if (row && column) out += ", ";
  if (column) out += "column " + std::to_string(*column);
  return out + ")";
}

}  // namespace

DataError::DataError(const std::string& what, std::optional<std::size_t> row,
                     std::optional<std::size_t> column)
    : std::runtime_error(located(what, row, column)), row_(row), column_(column) {}

Dataset::Dataset(std::vector<std::string> dmu_names, std::vector<Indicator> indicators,
                 Eigen::MatrixXd values)
    : dmu_names_(std::move(dmu_names)),
      indicators_(std::move(indicators)),
      values_(std::move(values)) {}

std::optional<std::size_t> Dataset::dmu_index(std::string_view name) const {
  auto it = std::find(dmu_names_.begin(), dmu_names_.end(), name);
  if (it == dmu_names_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - dmu_names_.begin());
}

std::vector<std::size_t> Dataset::columns_with(Role role) const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < indicators_.size(); ++j) {
    if (indicators_[j].role == role) out.push_back(j);
  }
  return out;
}

std::size_t Dataset::model_indicator_count() const {
  return indicators_.size() - count(Role::Meta);
}

std::vector<Violation> validate(const Dataset& d) {
  std::vector<Violation> out;
  const auto& values = d.values();
  if (static_cast<std::size_t>(values.rows()) != d.dmu_count() ||
      static_cast<std::size_t>(values.cols()) != d.indicator_count()) {
    out.push_back({"dimension mismatch",
                   "matrix " + std::to_string(values.rows()) + "x" +
                       std::to_string(values.cols()) + " vs " +
                       std::to_string(d.dmu_count()) + " dmus, " +
                       std::to_string(d.indicator_count()) + " indicators"});
    return out;
  }

  std::unordered_set<std::string> seen;
  for (const auto& name : d.dmu_names()) {
    if (name.empty()) out.push_back({"empty dmu name", "dmu list"});
    if (!seen.insert(name).second) out.push_back({"duplicate dmu", name});
  }
  seen.clear();
  for (const auto& ind : d.indicators()) {
    if (ind.name.empty()) out.push_back({"empty indicator name", "indicator list"});
    if (!seen.insert(ind.name).second) out.push_back({"duplicate indicator", ind.name});
  }

  if (d.count(Role::Input) == 0) out.push_back({"missing input", "indicator roles"});
  if (d.count(Role::DesirableOutput) == 0) {
    out.push_back({"missing desirable output", "indicator roles"});
  }

  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      const double v = values(i, j);
      const auto& ind = d.indicators()[static_cast<std::size_t>(j)];
      std::string where = d.dmu_names()[static_cast<std::size_t>(i)] + " / " + ind.name;
      if (!std::isfinite(v)) {
        out.push_back({"non-finite value", std::move(where)});
      } else if (ind.role != Role::Meta && v <= 0.0) {
        out.push_back({"non-positive value", std::move(where)});
      }
    }
  }
  return out;
}

void require_valid(const Dataset& d) {
  auto violations = validate(d);
  if (!violations.empty()) {
    throw DataError(violations.front().invariant + ": " + violations.front().location);
  }
}

std::vector<StatsRow> descriptive_stats(const Dataset& d) {
  if (d.dmu_count() < 2) throw DataError("sd undefined: need at least 2 DMUs");
  std::vector<StatsRow> rows;
  const double n = static_cast<double>(d.dmu_count());
  for (std::size_t j = 0; j < d.indicator_count(); ++j) {
    const auto& ind = d.indicators()[j];
    if (ind.role == Role::Meta) continue;
    auto col = d.values().col(static_cast<Eigen::Index>(j));
    StatsRow row;
    row.indicator = ind.name;
    row.max = col.maxCoeff();
    row.min = col.minCoeff();
    row.mean = col.sum() / n;
    // Constant columns give exactly zero, not a rounding residue.
    if (row.max == row.min) {
      row.mean = row.min;
      row.sd = 0.0;
    } else {
      row.sd = std::sqrt((col.array() - row.mean).square().sum() / (n - 1.0));
      row.mean = std::clamp(row.mean, row.min, row.max);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

DiscriminationCheck check_discrimination(const Dataset& d, double threshold) {
  DiscriminationCheck check;
  const auto k = d.model_indicator_count();
  if (k == 0) return check;
  check.ratio = static_cast<double>(d.dmu_count()) / static_cast<double>(k);
  check.ok = check.ratio >= threshold;
  return check;
}

}  // namespace dea
