#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace dea::lp {

/// minimize c'x subject to A x = b, x >= 0.
struct StandardFormLP {
  Eigen::VectorXd c;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;

  Eigen::Index n_vars() const { return A.cols(); }
  Eigen::Index n_constraints() const { return A.rows(); }

  /// Throws std::invalid_argument on inconsistent dimensions or non-finite entries.
  void check() const;
};

enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };

std::string_view to_string(Status status);

struct Solution {
  Status status = Status::Infeasible;
  double objective = 0;
  Eigen::VectorXd primal;
  /// Basic variable per surviving row. Rows found linearly dependent during
  /// phase 1 are dropped, so this may be shorter than n_constraints.
  std::vector<Eigen::Index> basis;
  int iterations = 0;
};

struct Tolerances {
  double pivot = 1e-9;
  double feasibility = 1e-7;
  double optimality = 1e-7;
};

struct SolverOptions {
  int iteration_cap = 10000;
  /// Consecutive degenerate pivots before switching from Dantzig to Bland.
  int bland_after = 50;
  Tolerances tol;
  /// Tableau dump after every pivot when set.
  std::ostream* trace = nullptr;
};

/// Reads DEA_ITER_CAP from the environment; falls back to `fallback`.
/// Throws std::invalid_argument when the variable is set but not a positive integer.
int iteration_cap_from_env(int fallback = 10000);

/// Dense two-phase simplex.
Solution solve(const StandardFormLP& lp, const SolverOptions& options = {});

/// Primal feasibility of `sol` plus nonnegative reduced costs for its basis.
/// Throws std::domain_error("basis not invertible") on a singular basis.
bool verify_optimality(const StandardFormLP& lp, const Solution& sol,
                       const Tolerances& tol = {});

}  // namespace dea::lp
