#include "dea/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace dea {

std::string_view to_string(CorrelationMethod method) {
  return method == CorrelationMethod::Pearson ? "pearson" : "spearman";
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("pearson: need two equal-length series of length >= 2");
  }
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw std::domain_error("pearson: constant series");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson(rx, ry);
}

CorrelationMatrix correlation_matrix(const Dataset& d, CorrelationMethod method) {
  require_valid(d);
  if (d.dmu_count() < 3) throw DataError("correlation needs at least 3 DMUs");

  CorrelationMatrix out;
  out.method = method;
  std::vector<std::vector<double>> columns;
  for (std::size_t j = 0; j < d.indicator_count(); ++j) {
    const auto& ind = d.indicators()[j];
    if (ind.role == Role::Meta) continue;
    const auto col = d.values().col(static_cast<Eigen::Index>(j));
    if (col.maxCoeff() == col.minCoeff()) {
      throw DataError("correlation undefined: column '" + ind.name + "' is constant");
    }
    out.labels.push_back(ind.name);
    columns.emplace_back(col.data(), col.data() + col.size());
  }

  const auto k = static_cast<Eigen::Index>(columns.size());
  out.values = Eigen::MatrixXd::Identity(k, k);
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = a + 1; b < k; ++b) {
      const auto& x = columns[static_cast<std::size_t>(a)];
      const auto& y = columns[static_cast<std::size_t>(b)];
      const double r = method == CorrelationMethod::Pearson ? pearson(x, y) : spearman(x, y);
      out.values(a, b) = r;
      out.values(b, a) = r;
    }
  }
  return out;
}

std::vector<int> rank_scores(std::span<const double> scores, double tie_tolerance) {
  std::vector<int> ranks(scores.size(), 1);
  for (std::size_t i = 0; i < scores.size(); ++i) {
    for (double other : scores) {
      if (other > scores[i] + tie_tolerance) ++ranks[i];
    }
  }
  return ranks;
}

namespace {

Eigen::VectorXd column_mean(const std::vector<ComparisonRecord>& rows,
                            const Eigen::VectorXd RateReport::*field,
                            const RateReport ComparisonRecord::*which) {
  if (rows.empty()) return {};
  Eigen::VectorXd sum = Eigen::VectorXd::Zero((rows.front().*which.*field).size());
  for (const auto& r : rows) {
    const auto& v = r.*which.*field;
    if (v.size() != sum.size()) throw std::invalid_argument("comparison rows have ragged rates");
    sum += v;
  }
  return sum / static_cast<double>(rows.size());
}

}  // namespace

ComparisonTable tabulate(std::vector<ComparisonRecord> rows, std::vector<std::string> inputs,
                         std::vector<std::string> good_outputs,
                         std::vector<std::string> bad_outputs) {
  ComparisonTable table;
  table.inputs = std::move(inputs);
  table.good_outputs = std::move(good_outputs);
  table.bad_outputs = std::move(bad_outputs);

  std::vector<double> ee, epi;
  for (const auto& r : rows) {
    ee.push_back(r.ee);
    epi.push_back(r.epi);
  }
  const auto ee_ranks = rank_scores(ee);
  const auto epi_ranks = rank_scores(epi);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].ee_rank = ee_ranks[i];
    rows[i].epi_rank = epi_ranks[i];
  }

  auto& mean = table.mean;
  if (!rows.empty()) {
    const double n = static_cast<double>(rows.size());
    mean.ee = std::accumulate(ee.begin(), ee.end(), 0.0) / n;
    mean.epi = std::accumulate(epi.begin(), epi.end(), 0.0) / n;
    using CR = ComparisonRecord;
    using RR = RateReport;
    mean.ccr_input_reduction = column_mean(rows, &RR::input_reduction_pct, &CR::ccr_rates);
    mean.ccr_good_increase = column_mean(rows, &RR::good_increase_pct, &CR::ccr_rates);
    mean.sbm_input_reduction = column_mean(rows, &RR::input_reduction_pct, &CR::sbm_rates);
    mean.sbm_bad_reduction = column_mean(rows, &RR::bad_reduction_pct, &CR::sbm_rates);
    mean.sbm_good_increase = column_mean(rows, &RR::good_increase_pct, &CR::sbm_rates);
    mean.meta = rows.front().meta;
    for (std::size_t k = 0; k < mean.meta.size(); ++k) {
      double sum = 0;
      for (const auto& r : rows) {
        if (r.meta.size() != mean.meta.size()) throw std::invalid_argument("ragged meta columns");
        sum += r.meta[k].second;
      }
      mean.meta[k].second = sum / n;
    }
  }
  table.rows = std::move(rows);
  return table;
}

ComparisonTable compare_models(std::span<const EfficiencyResult> ee,
                               std::span<const EfficiencyResult> epi, const Dataset& d) {
  if (ee.size() != epi.size() || ee.size() != d.dmu_count()) {
    throw DataError("DMU set mismatch between EE and EPI results");
  }
  auto names_of = [&](Role role) {
    std::vector<std::string> out;
    for (auto j : d.columns_with(role)) out.push_back(d.indicators()[j].name);
    return out;
  };
  const auto meta_cols = d.columns_with(Role::Meta);

  ModelSpec spec{ModelKind::SbmUndesirable, ReturnsToScale::crs(), true};
  std::vector<ComparisonRecord> rows;
  for (std::size_t i = 0; i < ee.size(); ++i) {
    const auto& name = d.dmu_names()[i];
    if (ee[i].dmu != name || epi[i].dmu != name) {
      throw DataError("DMU set mismatch at position " + std::to_string(i + 1) + ": '" +
                      ee[i].dmu + "' vs '" + epi[i].dmu + "'");
    }
    const auto inst = build_instance(d, name, spec);
    ComparisonRecord rec;
    rec.dmu = name;
    rec.ee = ee[i].score;
    rec.epi = epi[i].score;
    rec.ccr_rates = improvement_targets(ee[i], inst);
    rec.sbm_rates = improvement_targets(epi[i], inst);
    for (auto j : meta_cols) {
      rec.meta.emplace_back(d.indicators()[j].name,
                            d.values()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    }
    rows.push_back(std::move(rec));
  }
  return tabulate(std::move(rows), names_of(Role::Input), names_of(Role::DesirableOutput),
                  names_of(Role::UndesirableOutput));
}

int band_of(double score, BandThresholds thresholds) {
  if (score >= thresholds.upper) return 1;
  if (score >= thresholds.lower) return 2;
  return 3;
}

Bands efficiency_bands(std::span<const ComparisonRecord> records, BandThresholds thresholds,
                       BandScore which) {
  if (!(thresholds.lower > 0.0 && thresholds.upper > thresholds.lower && thresholds.upper <= 1.0)) {
    throw std::invalid_argument("band thresholds: need 0 < t2 < t1 <= 1");
  }
  Bands bands;
  for (const auto& r : records) {
    const double score = which == BandScore::Epi ? r.epi : r.ee;
    bands.levels[static_cast<std::size_t>(band_of(score, thresholds) - 1)].push_back(r.dmu);
  }
  return bands;
}

}  // namespace dea
