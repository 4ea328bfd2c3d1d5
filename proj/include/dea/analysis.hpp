#pragma once

#include <array>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "dea/dataset.hpp"
#include "dea/models.hpp"

namespace dea {

enum class CorrelationMethod { Pearson, Spearman };

std::string_view to_string(CorrelationMethod method);

struct CorrelationMatrix {
  std::vector<std::string> labels;
  Eigen::MatrixXd values;
  CorrelationMethod method = CorrelationMethod::Pearson;
};

double pearson(std::span<const double> x, std::span<const double> y);
double spearman(std::span<const double> x, std::span<const double> y);

/// 1-based ranks, ascending, ties receive the average of their positions.
std::vector<double> average_ranks(std::span<const double> values);

/// Pairwise correlations over the non-Meta indicators. Needs >= 3 DMUs and
/// no constant column.
CorrelationMatrix correlation_matrix(const Dataset& d, CorrelationMethod method);

/// Scores closer than this share a rank (two-decimal reporting).
inline constexpr double kRankTieTolerance = 5e-3;

/// Competition ranking, best (largest) score first: rank = 1 + number of
/// scores strictly better by more than the tie tolerance.
std::vector<int> rank_scores(std::span<const double> scores,
                             double tie_tolerance = kRankTieTolerance);

struct ComparisonRecord {
  std::string dmu;
  double ee = 0;
  double epi = 0;
  int ee_rank = 0;
  int epi_rank = 0;
  RateReport ccr_rates;
  RateReport sbm_rates;
  /// Meta covariates, in indicator order.
  std::vector<std::pair<std::string, double>> meta;
};

/// Column means of a comparison table ("Mean" row). No ranks.
struct MeanRow {
  double ee = 0;
  double epi = 0;
  Eigen::VectorXd ccr_input_reduction, ccr_good_increase;
  Eigen::VectorXd sbm_input_reduction, sbm_bad_reduction, sbm_good_increase;
  std::vector<std::pair<std::string, double>> meta;
};

struct ComparisonTable {
  std::vector<std::string> inputs, good_outputs, bad_outputs;
  std::vector<ComparisonRecord> rows;
  MeanRow mean;
};

/// Attaches ranks and the mean row to already-joined records.
ComparisonTable tabulate(std::vector<ComparisonRecord> rows, std::vector<std::string> inputs,
                         std::vector<std::string> good_outputs,
                         std::vector<std::string> bad_outputs);

/// Joins CCR (EE) and SBM (EPI) results per DMU.
ComparisonTable compare_models(std::span<const EfficiencyResult> ee,
                               std::span<const EfficiencyResult> epi, const Dataset& d);

struct BandThresholds {
  double upper = 0.999;
  double lower = 0.20;
};

enum class BandScore { Epi, Ee };

struct Bands {
  std::array<std::vector<std::string>, 3> levels;
};

/// Level 1: score >= upper, level 2: [lower, upper), level 3: below lower.
Bands efficiency_bands(std::span<const ComparisonRecord> records, BandThresholds thresholds = {},
                       BandScore which = BandScore::Epi);

/// 1, 2 or 3 for a single score.
int band_of(double score, BandThresholds thresholds = {});

}  // namespace dea
