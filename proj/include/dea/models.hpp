#pragma once

#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "dea/dataset.hpp"
#include "dea/linprog.hpp"

namespace dea {

enum class ModelKind { CcrOutput, SbmUndesirable };

std::string_view to_string(ModelKind kind);

/// Bounds L <= sum(lambda) <= U on the intensity vector.
struct ReturnsToScale {
  enum class Kind { Crs, Vrs, Custom };

  Kind kind = Kind::Crs;
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();

  static ReturnsToScale crs() { return {}; }
  static ReturnsToScale vrs() { return {Kind::Vrs, 1.0, 1.0}; }
  /// Throws std::invalid_argument unless 0 <= lower <= upper.
  static ReturnsToScale custom(double lower, double upper);
};

struct ModelSpec {
  ModelKind kind = ModelKind::CcrOutput;
  ReturnsToScale rts;
  /// Lets SbmUndesirable run on data without undesirable outputs (plain SBM).
  bool allow_plain_sbm = false;
};

/// One DMU's evaluation problem, columns are DMUs.
struct ModelInstance {
  std::string dmu;
  Eigen::Index dmu_index = 0;
  Eigen::MatrixXd inputs;  // m x n
  Eigen::MatrixXd good;    // s1 x n
  Eigen::MatrixXd bad;     // s2 x n
  Eigen::VectorXd x0, y0_good, y0_bad;
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();

  Eigen::Index n() const { return inputs.cols(); }
  Eigen::Index m() const { return inputs.rows(); }
  Eigen::Index s1() const { return good.rows(); }
  Eigen::Index s2() const { return bad.rows(); }
  Eigen::Index s() const { return s1() + s2(); }
  bool has_lower_row() const { return lower > 0.0; }
  bool has_upper_row() const { return upper < std::numeric_limits<double>::infinity(); }
};

struct Projection {
  Eigen::VectorXd inputs, good, bad;
};

struct EfficiencyResult {
  std::string dmu;
  ModelKind kind = ModelKind::CcrOutput;
  /// EE for CcrOutput (1 / phi), rho* for SbmUndesirable.
  double score = 0.0;
  /// Radial output expansion; 1 for SBM.
  double phi = 1.0;
  Eigen::VectorXd lambda;
  Eigen::VectorXd slack_in, slack_good, slack_bad;
  Projection projection;

  bool efficient() const { return score == 1.0; }
  double max_slack() const;
};

/// Improvement rates in percent.
struct RateReport {
  std::string dmu;
  Eigen::VectorXd input_reduction_pct;
  Eigen::VectorXd bad_reduction_pct;
  Eigen::VectorXd good_increase_pct;
};

class ModelError : public std::runtime_error {
 public:
  ModelError(const std::string& dmu, const std::string& what)
      : std::runtime_error(dmu.empty() ? what : "DMU '" + dmu + "': " + what), dmu_(dmu) {}
  const std::string& dmu() const { return dmu_; }

 private:
  std::string dmu_;
};

struct EvalOptions {
  lp::SolverOptions solver;
  /// Worker threads for evaluate_all; results are ordered regardless.
  unsigned threads = 1;
  /// Sees every LP solved, with its result. Called from worker threads
  /// when threads > 1.
  std::function<void(const lp::StandardFormLP&, const lp::Solution&)> on_solve;
};

/// Absolute slack level at or below which a DMU counts as efficient.
inline constexpr double kSlackTolerance = 1e-7;

ModelInstance build_instance(const Dataset& d, std::string_view dmu, const ModelSpec& spec);

/// Output-oriented CCR, two stages: max phi, then max slack sum at phi*.
EfficiencyResult evaluate_ccr_output(const Dataset& d, std::string_view dmu, const ModelSpec& spec,
                                     const EvalOptions& options = {});
EfficiencyResult evaluate_ccr_output(const ModelInstance& inst, const EvalOptions& options = {});

/// Column layout of the linearized SBM program (t, Lambda, S-, Sg, Sb, row slacks).
struct SbmLayout {
  Eigen::Index t = 0;
  Eigen::Index lambda = 1;
  Eigen::Index slack_in = 0;
  Eigen::Index slack_good = 0;
  Eigen::Index slack_bad = 0;
  Eigen::Index n = 0, m = 0, s1 = 0, s2 = 0;

  struct Recovered {
    double t = 0;
    Eigen::VectorXd lambda, slack_in, slack_good, slack_bad;
  };
  /// (lambda, s) = (Lambda, S) / t. Throws ModelError when t <= 1e-7.
  Recovered recover(const Eigen::VectorXd& primal, const std::string& dmu) const;
};

struct SbmProgram {
  lp::StandardFormLP lp;
  SbmLayout layout;
};

/// Charnes-Cooper linearization of the SBM fractional program.
SbmProgram linearize_sbm(const ModelInstance& inst);

/// SBM score rho* from recovered slacks, evaluated as the original fraction.
double sbm_ratio(const ModelInstance& inst, const Eigen::VectorXd& slack_in,
                 const Eigen::VectorXd& slack_good, const Eigen::VectorXd& slack_bad);

EfficiencyResult evaluate_sbm_undesirable(const Dataset& d, std::string_view dmu,
                                          const ModelSpec& spec, const EvalOptions& options = {});
EfficiencyResult evaluate_sbm_undesirable(const ModelInstance& inst,
                                          const EvalOptions& options = {});

/// Dispatches on spec.kind.
EfficiencyResult evaluate(const Dataset& d, std::string_view dmu, const ModelSpec& spec,
                          const EvalOptions& options = {});

RateReport improvement_targets(const EfficiencyResult& r, const ModelInstance& inst);

/// One result per DMU in dataset order.
std::vector<EfficiencyResult> evaluate_all(const Dataset& d, const ModelSpec& spec,
                                           const EvalOptions& options = {});

}  // namespace dea
