#include "dea/linprog.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <limits>
#include <ostream>
#include <string>

namespace dea::lp {

void StandardFormLP::check() const {
  if (c.size() != A.cols()) throw std::invalid_argument("lp: |c| != n_vars");
  if (b.size() != A.rows()) throw std::invalid_argument("lp: |b| != n_constraints");
  if (!c.allFinite() || !A.allFinite() || !b.allFinite()) {
    throw std::invalid_argument("lp: non-finite entry");
  }
}

std::string_view to_string(Status status) {
  switch (status) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
    case Status::IterationLimit: return "iteration limit";
  }
  return "?";
}

int iteration_cap_from_env(int fallback) {
  const char* raw = std::getenv("DEA_ITER_CAP");
  if (raw == nullptr || *raw == '\0') return fallback;
  errno = 0;
  char* end = nullptr;
  const long v = std::strtol(raw, &end, 10);
  if (errno != 0 || *end != '\0' || v <= 0 || v > std::numeric_limits<int>::max()) {
    throw std::invalid_argument(std::string("DEA_ITER_CAP must be a positive integer, got '") +
                                raw + "'");
  }
  return static_cast<int>(v);
}

namespace {

using Eigen::Index;

// Constraint rows 0..rows-1, reduced-cost row `rows`, RHS in the last column.
// The objective cell holds -z.
struct Tableau {
  Eigen::MatrixXd t;
  std::vector<Index> basis;

  Index rows() const { return t.rows() - 1; }
  Index rhs() const { return t.cols() - 1; }

  void pivot(Index r, Index e) {
    t.row(r) /= t(r, e);
    for (Index i = 0; i < t.rows(); ++i) {
      if (i == r) continue;
      const double f = t(i, e);
      if (f != 0.0) t.row(i) -= f * t.row(r);
    }
    t(r, e) = 1.0;
    basis[static_cast<std::size_t>(r)] = e;
  }

  void dump(std::ostream& os, std::string_view label) const {
    os << label << "\n" << std::setprecision(6);
    for (Index i = 0; i < t.rows(); ++i) {
      os << (i < rows() ? "x" + std::to_string(basis[static_cast<std::size_t>(i)]) : "z") << "\t";
      for (Index j = 0; j < t.cols(); ++j) os << std::setw(12) << t(i, j);
      os << "\n";
    }
  }
};

class Simplex {
 public:
  Simplex(Tableau& tab, const SolverOptions& opts, int& iterations)
      : tab_(tab), opts_(opts), iterations_(iterations) {}

  // Pivots until optimal over columns [0, allowed). Never returns Infeasible.
  Status run(Index allowed, std::string_view phase) {
    int degenerate_run = 0;
    bool bland = false;
    auto& t = tab_.t;
    const Index obj = tab_.rows();
    const Index rhs = tab_.rhs();
    while (true) {
      Index enter = -1;
      double best = -opts_.tol.optimality;
      for (Index j = 0; j < allowed; ++j) {
        if (t(obj, j) < best) {
          enter = j;
          if (bland) break;
          best = t(obj, j);
        }
      }
      if (enter < 0) return Status::Optimal;
      if (iterations_ >= opts_.iteration_cap) return Status::IterationLimit;

      Index leave = -1;
      double ratio = std::numeric_limits<double>::infinity();
      for (Index i = 0; i < obj; ++i) {
        const double a = t(i, enter);
        if (a <= opts_.tol.pivot) continue;
        const double r = std::max(t(i, rhs), 0.0) / a;
        const bool tie = leave >= 0 && std::abs(r - ratio) <= 1e-12 * (1.0 + ratio);
        if ((!tie && r < ratio) ||
            (tie && tab_.basis[static_cast<std::size_t>(i)] <
                        tab_.basis[static_cast<std::size_t>(leave)])) {
          leave = i;
          ratio = std::min(r, ratio);
        }
      }
      if (leave < 0) return Status::Unbounded;

      if (ratio <= 1e-12) {
        if (++degenerate_run >= opts_.bland_after) bland = true;
      } else {
        degenerate_run = 0;
        bland = false;
      }
      tab_.pivot(leave, enter);
      for (Index i = 0; i < obj; ++i) {
        if (t(i, rhs) < 0.0 && t(i, rhs) > -opts_.tol.feasibility) t(i, rhs) = 0.0;
      }
      ++iterations_;
      if (opts_.trace) {
        tab_.dump(*opts_.trace, std::string(phase) + " pivot " + std::to_string(iterations_) +
                                    ": x" + std::to_string(enter) + " enters, row " +
                                    std::to_string(leave) + (bland ? " (bland)" : ""));
      }
    }
  }

 private:
  Tableau& tab_;
  const SolverOptions& opts_;
  int& iterations_;
};

}  // namespace

Solution solve(const StandardFormLP& lp, const SolverOptions& options) {
  lp.check();
  const Index m = lp.n_constraints();
  const Index n = lp.n_vars();
  Solution sol;

  // Phase 1: one artificial per row, rows flipped so b >= 0.
  Tableau tab;
  tab.t = Eigen::MatrixXd::Zero(m + 1, n + m + 1);
  for (Index i = 0; i < m; ++i) {
    const double sign = lp.b(i) < 0.0 ? -1.0 : 1.0;
    tab.t.row(i).head(n) = sign * lp.A.row(i);
    tab.t(i, n + i) = 1.0;
    tab.t(i, n + m) = sign * lp.b(i);
    tab.basis.push_back(n + i);
  }
  tab.t.row(m).head(n) = -tab.t.topRows(m).leftCols(n).colwise().sum();
  tab.t(m, n + m) = -tab.t.col(n + m).head(m).sum();
  if (options.trace) tab.dump(*options.trace, "phase 1 start");

  Simplex phase1(tab, options, sol.iterations);
  const Status s1 = phase1.run(n + m, "phase 1");
  if (s1 == Status::IterationLimit) {
    sol.status = s1;
    return sol;
  }
  const double infeasibility = -tab.t(m, n + m);
  const double b_norm = m > 0 ? lp.b.lpNorm<Eigen::Infinity>() : 0.0;
  if (infeasibility > options.tol.feasibility * (1.0 + b_norm)) {
    sol.status = Status::Infeasible;
    return sol;
  }

  // Drive remaining artificials out of the basis; rows where that is
  // impossible are linear combinations of others and are dropped.
  std::vector<Index> keep;
  for (Index i = 0; i < m; ++i) {
    if (tab.basis[static_cast<std::size_t>(i)] >= n) {
      Index best = -1;
      double best_abs = options.tol.pivot;
      for (Index j = 0; j < n; ++j) {
        if (std::abs(tab.t(i, j)) > best_abs) {
          best = j;
          best_abs = std::abs(tab.t(i, j));
        }
      }
      if (best < 0) continue;
      tab.pivot(i, best);
    }
    keep.push_back(i);
  }

  // Phase 2 tableau: surviving rows, original columns, original costs.
  const auto k = static_cast<Index>(keep.size());
  Tableau p2;
  p2.t = Eigen::MatrixXd::Zero(k + 1, n + 1);
  for (Index r = 0; r < k; ++r) {
    const Index i = keep[static_cast<std::size_t>(r)];
    p2.t.row(r).head(n) = tab.t.row(i).head(n);
    p2.t(r, n) = std::max(tab.t(i, n + m), 0.0);
    p2.basis.push_back(tab.basis[static_cast<std::size_t>(i)]);
  }
  p2.t.row(k).head(n) = lp.c.transpose();
  for (Index r = 0; r < k; ++r) {
    const double cb = lp.c(p2.basis[static_cast<std::size_t>(r)]);
    if (cb != 0.0) p2.t.row(k) -= cb * p2.t.row(r);
  }
  if (options.trace) p2.dump(*options.trace, "phase 2 start");

  Simplex phase2(p2, options, sol.iterations);
  sol.status = phase2.run(n, "phase 2");
  if (sol.status != Status::Optimal) return sol;

  sol.primal = Eigen::VectorXd::Zero(n);
  for (Index r = 0; r < k; ++r) {
    sol.primal(p2.basis[static_cast<std::size_t>(r)]) = std::max(p2.t(r, n), 0.0);
  }
  sol.basis = std::move(p2.basis);
  sol.objective = lp.c.dot(sol.primal);
  return sol;
}

bool verify_optimality(const StandardFormLP& lp, const Solution& sol, const Tolerances& tol) {
  lp.check();
  const Index n = lp.n_vars();
  if (sol.status != Status::Optimal || sol.primal.size() != n) return false;

  const auto& x = sol.primal;
  if (n > 0 && x.minCoeff() < -1e-9) return false;
  const double b_norm = lp.b.size() > 0 ? lp.b.lpNorm<Eigen::Infinity>() : 0.0;
  if (lp.b.size() > 0 && (lp.A * x - lp.b).lpNorm<Eigen::Infinity>() > tol.feasibility * (1.0 + b_norm)) {
    return false;
  }
  if (std::abs(lp.c.dot(x) - sol.objective) > 1e-9 * (1.0 + std::abs(sol.objective))) return false;

  const auto k = static_cast<Index>(sol.basis.size());
  std::vector<bool> basic(static_cast<std::size_t>(n), false);
  for (Index v : sol.basis) {
    if (v < 0 || v >= n || basic[static_cast<std::size_t>(v)]) {
      throw std::domain_error("basis not invertible");
    }
    basic[static_cast<std::size_t>(v)] = true;
  }
  const double x_norm = n > 0 ? x.lpNorm<Eigen::Infinity>() : 0.0;
  for (Index j = 0; j < n; ++j) {
    if (!basic[static_cast<std::size_t>(j)] && std::abs(x(j)) > tol.feasibility * (1.0 + x_norm)) {
      return false;
    }
  }

  Eigen::MatrixXd B(lp.n_constraints(), k);
  Eigen::VectorXd cb(k);
  for (Index r = 0; r < k; ++r) {
    B.col(r) = lp.A.col(sol.basis[static_cast<std::size_t>(r)]);
    cb(r) = lp.c(sol.basis[static_cast<std::size_t>(r)]);
  }
  // Equilibrate rows then columns so the rank test is not fooled by units:
  // Bs = Dr B Dc, and B' y = cb becomes Bs' z = Dc cb with y = Dr z.
  Eigen::VectorXd dr = Eigen::VectorXd::Ones(B.rows()), dc = Eigen::VectorXd::Ones(k);
  for (Index i = 0; i < B.rows(); ++i) {
    const double big = k > 0 ? B.row(i).cwiseAbs().maxCoeff() : 0.0;
    if (big > 0.0) dr(i) = 1.0 / big;
  }
  Eigen::MatrixXd Bs = dr.asDiagonal() * B;
  for (Index r = 0; r < k; ++r) {
    const double big = Bs.col(r).cwiseAbs().maxCoeff();
    if (big > 0.0) dc(r) = 1.0 / big;
  }
  Bs = Bs * dc.asDiagonal();
  const Eigen::VectorXd rhs = dc.cwiseProduct(cb);
  Eigen::VectorXd z;
  if (k == lp.n_constraints()) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(Bs.transpose());
    lu.setThreshold(1e-10);
    if (!lu.isInvertible()) throw std::domain_error("basis not invertible");
    z = lu.solve(rhs);
  } else {
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(Bs.transpose());
    cod.setThreshold(1e-10);
    if (cod.rank() < k) throw std::domain_error("basis not invertible");
    z = cod.solve(rhs);
  }
  const Eigen::VectorXd duals = dr.cwiseProduct(z);
  const Eigen::VectorXd reduced = lp.c - lp.A.transpose() * duals;
  return n == 0 || reduced.minCoeff() >= -tol.optimality;
}

}  // namespace dea::lp
