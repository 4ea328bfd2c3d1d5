#include "dea/models.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <optional>
#include <thread>

namespace dea {

using Eigen::Index;

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::CcrOutput: return "ccr";
    case ModelKind::SbmUndesirable: return "sbm-u";
  }
  return "?";
}

ReturnsToScale ReturnsToScale::custom(double lower, double upper) {
  if (!(lower >= 0.0) || !(upper >= lower)) {
    throw std::invalid_argument("returns to scale: need 0 <= L <= U");
  }
  return {Kind::Custom, lower, upper};
}

double EfficiencyResult::max_slack() const {
  double worst = 0.0;
  for (const auto* v : {&slack_in, &slack_good, &slack_bad}) {
    if (v->size() > 0) worst = std::max(worst, v->cwiseAbs().maxCoeff());
  }
  return worst;
}

namespace {

Eigen::MatrixXd slice_columns(const Dataset& d, const std::vector<std::size_t>& cols) {
  Eigen::MatrixXd out(static_cast<Index>(cols.size()), static_cast<Index>(d.dmu_count()));
  for (std::size_t r = 0; r < cols.size(); ++r) {
    out.row(static_cast<Index>(r)) = d.values().col(static_cast<Index>(cols[r])).transpose();
  }
  return out;
}

void require_optimal(const lp::Solution& sol, const std::string& dmu, std::string_view stage) {
  if (sol.status != lp::Status::Optimal) {
    throw ModelError(dmu, std::string(stage) + " LP " + std::string(lp::to_string(sol.status)));
  }
}

Eigen::VectorXd nonnegative(Eigen::VectorXd v) { return v.cwiseMax(0.0); }

// Appends L*scale <= e'lambda <= U*scale rows as equalities with a surplus
// and a slack column. `scale_col` < 0 means the bounds are constants.
void add_intensity_rows(const ModelInstance& inst, Index lambda_col, Index scale_col,
                        Eigen::MatrixXd& A, Eigen::VectorXd& b, Index& row, Index& col) {
  const Index n = inst.n();
  if (inst.has_lower_row()) {
    A.row(row).segment(lambda_col, n).setOnes();
    A(row, col++) = -1.0;
    if (scale_col >= 0) A(row, scale_col) = -inst.lower;
    else b(row) = inst.lower;
    ++row;
  }
  if (inst.has_upper_row()) {
    A.row(row).segment(lambda_col, n).setOnes();
    A(row, col++) = 1.0;
    if (scale_col >= 0) A(row, scale_col) = -inst.upper;
    else b(row) = inst.upper;
    ++row;
  }
}

Index intensity_rows(const ModelInstance& inst) {
  return (inst.has_lower_row() ? 1 : 0) + (inst.has_upper_row() ? 1 : 0);
}

// CCR envelopment rows. With `phi` unset the phi column sits at index 0;
// otherwise phi is fixed and moved to the right-hand side.
lp::StandardFormLP ccr_program(const ModelInstance& inst, std::optional<double> phi) {
  const Index n = inst.n(), m = inst.m(), s1 = inst.s1();
  const Index extra = intensity_rows(inst);
  const Index off = phi ? 0 : 1;
  const Index lambda = off, s_in = off + n, s_good = s_in + m;
  const Index vars = s_good + s1 + extra;
  const Index rows = m + s1 + extra;

  lp::StandardFormLP lp;
  lp.A = Eigen::MatrixXd::Zero(rows, vars);
  lp.b = Eigen::VectorXd::Zero(rows);
  lp.c = Eigen::VectorXd::Zero(vars);
  for (Index i = 0; i < m; ++i) {
    lp.A.row(i).segment(lambda, n) = inst.inputs.row(i);
    lp.A(i, s_in + i) = 1.0;
    lp.b(i) = inst.x0(i);
  }
  for (Index r = 0; r < s1; ++r) {
    lp.A.row(m + r).segment(lambda, n) = inst.good.row(r);
    lp.A(m + r, s_good + r) = -1.0;
    if (phi) lp.b(m + r) = *phi * inst.y0_good(r);
    else lp.A(m + r, 0) = -inst.y0_good(r);
  }
  Index row = m + s1, col = s_good + s1;
  add_intensity_rows(inst, lambda, -1, lp.A, lp.b, row, col);

  if (phi) lp.c.segment(s_in, m + s1).setConstant(-1.0);
  else lp.c(0) = -1.0;
  return lp;
}

}  // namespace

ModelInstance build_instance(const Dataset& d, std::string_view dmu, const ModelSpec& spec) {
  require_valid(d);
  const auto idx = d.dmu_index(dmu);
  if (!idx) throw ModelError(std::string(dmu), "unknown DMU");
  if (d.count(Role::Input) == 0) throw ModelError(std::string(dmu), "no Input columns");
  if (d.count(Role::DesirableOutput) == 0) {
    throw ModelError(std::string(dmu), "no DesirableOutput columns");
  }
  if (spec.kind == ModelKind::SbmUndesirable && d.count(Role::UndesirableOutput) == 0 &&
      !spec.allow_plain_sbm) {
    throw ModelError(std::string(dmu), "SBM with undesirable outputs needs an out- column");
  }
  const auto& rts = spec.rts;
  if (!(rts.lower >= 0.0) || !(rts.upper >= rts.lower)) {
    throw std::invalid_argument("returns to scale: need 0 <= L <= U");
  }

  ModelInstance inst;
  inst.dmu = std::string(dmu);
  inst.dmu_index = static_cast<Index>(*idx);
  inst.inputs = slice_columns(d, d.columns_with(Role::Input));
  inst.good = slice_columns(d, d.columns_with(Role::DesirableOutput));
  inst.bad = slice_columns(d, d.columns_with(Role::UndesirableOutput));
  inst.x0 = inst.inputs.col(inst.dmu_index);
  inst.y0_good = inst.good.col(inst.dmu_index);
  inst.y0_bad = inst.bad.col(inst.dmu_index);
  inst.lower = rts.lower;
  inst.upper = rts.upper;
  return inst;
}

EfficiencyResult evaluate_ccr_output(const ModelInstance& inst, const EvalOptions& options) {
  const Index n = inst.n(), m = inst.m(), s1 = inst.s1();

  const auto program1 = ccr_program(inst, std::nullopt);
  const auto stage1 = lp::solve(program1, options.solver);
  if (options.on_solve) options.on_solve(program1, stage1);
  require_optimal(stage1, inst.dmu, "CCR stage 1");
  double phi = -stage1.objective;
  if (phi <= 1.0 + 1e-9) phi = 1.0;

  const auto program2 = ccr_program(inst, phi);
  const auto stage2 = lp::solve(program2, options.solver);
  if (options.on_solve) options.on_solve(program2, stage2);
  require_optimal(stage2, inst.dmu, "CCR stage 2");

  EfficiencyResult r;
  r.dmu = inst.dmu;
  r.kind = ModelKind::CcrOutput;
  r.phi = phi;
  r.score = 1.0 / phi;
  r.lambda = stage2.primal.head(n);
  r.slack_in = nonnegative(stage2.primal.segment(n, m));
  r.slack_good = nonnegative(stage2.primal.segment(n + m, s1));
  r.slack_bad = Eigen::VectorXd(0);
  r.projection.inputs = inst.x0 - r.slack_in;
  r.projection.good = phi * inst.y0_good + r.slack_good;
  r.projection.bad = Eigen::VectorXd(0);
  return r;
}

EfficiencyResult evaluate_ccr_output(const Dataset& d, std::string_view dmu, const ModelSpec& spec,
                                     const EvalOptions& options) {
  if (spec.kind != ModelKind::CcrOutput) throw std::invalid_argument("spec.kind must be CcrOutput");
  return evaluate_ccr_output(build_instance(d, dmu, spec), options);
}

SbmLayout::Recovered SbmLayout::recover(const Eigen::VectorXd& primal,
                                        const std::string& dmu) const {
  Recovered out;
  out.t = primal(t);
  if (!(out.t > 1e-7)) throw ModelError(dmu, "degenerate Charnes-Cooper scale");
  out.lambda = primal.segment(lambda, n) / out.t;
  out.slack_in = primal.segment(slack_in, m) / out.t;
  out.slack_good = primal.segment(slack_good, s1) / out.t;
  out.slack_bad = primal.segment(slack_bad, s2) / out.t;
  return out;
}

SbmProgram linearize_sbm(const ModelInstance& inst) {
  const Index n = inst.n(), m = inst.m(), s1 = inst.s1(), s2 = inst.s2();
  const double s = static_cast<double>(inst.s());

  SbmLayout lay;
  lay.n = n;
  lay.m = m;
  lay.s1 = s1;
  lay.s2 = s2;
  lay.t = 0;
  lay.lambda = 1;
  lay.slack_in = 1 + n;
  lay.slack_good = lay.slack_in + m;
  lay.slack_bad = lay.slack_good + s1;

  const Index extra = intensity_rows(inst);
  const Index vars = lay.slack_bad + s2 + extra;
  const Index rows = 1 + m + s1 + s2 + extra;

  lp::StandardFormLP lp;
  lp.A = Eigen::MatrixXd::Zero(rows, vars);
  lp.b = Eigen::VectorXd::Zero(rows);
  lp.c = Eigen::VectorXd::Zero(vars);

  // t + (1/s)(sum Sg/y0g + sum Sb/y0b) = 1
  lp.A(0, lay.t) = 1.0;
  for (Index r = 0; r < s1; ++r) lp.A(0, lay.slack_good + r) = 1.0 / (s * inst.y0_good(r));
  for (Index r = 0; r < s2; ++r) lp.A(0, lay.slack_bad + r) = 1.0 / (s * inst.y0_bad(r));
  lp.b(0) = 1.0;

  Index row = 1;
  for (Index i = 0; i < m; ++i, ++row) {
    lp.A.row(row).segment(lay.lambda, n) = inst.inputs.row(i);
    lp.A(row, lay.slack_in + i) = 1.0;
    lp.A(row, lay.t) = -inst.x0(i);
  }
  for (Index r = 0; r < s1; ++r, ++row) {
    lp.A.row(row).segment(lay.lambda, n) = inst.good.row(r);
    lp.A(row, lay.slack_good + r) = -1.0;
    lp.A(row, lay.t) = -inst.y0_good(r);
  }
  for (Index r = 0; r < s2; ++r, ++row) {
    lp.A.row(row).segment(lay.lambda, n) = inst.bad.row(r);
    lp.A(row, lay.slack_bad + r) = 1.0;
    lp.A(row, lay.t) = -inst.y0_bad(r);
  }
  Index col = lay.slack_bad + s2;
  add_intensity_rows(inst, lay.lambda, lay.t, lp.A, lp.b, row, col);

  // min t - (1/m) sum S-/x0
  lp.c(lay.t) = 1.0;
  for (Index i = 0; i < m; ++i) {
    lp.c(lay.slack_in + i) = -1.0 / (static_cast<double>(m) * inst.x0(i));
  }
  return {std::move(lp), lay};
}

double sbm_ratio(const ModelInstance& inst, const Eigen::VectorXd& slack_in,
                 const Eigen::VectorXd& slack_good, const Eigen::VectorXd& slack_bad) {
  const double num =
      1.0 - slack_in.cwiseQuotient(inst.x0).sum() / static_cast<double>(inst.m());
  const double den = 1.0 + (slack_good.cwiseQuotient(inst.y0_good).sum() +
                            slack_bad.cwiseQuotient(inst.y0_bad).sum()) /
                               static_cast<double>(inst.s());
  return num / den;
}

EfficiencyResult evaluate_sbm_undesirable(const ModelInstance& inst, const EvalOptions& options) {
  const auto program = linearize_sbm(inst);
  const auto sol = lp::solve(program.lp, options.solver);
  if (options.on_solve) options.on_solve(program.lp, sol);
  require_optimal(sol, inst.dmu, "SBM");
  auto rec = program.layout.recover(sol.primal, inst.dmu);

  EfficiencyResult r;
  r.dmu = inst.dmu;
  r.kind = ModelKind::SbmUndesirable;
  r.phi = 1.0;
  r.lambda = std::move(rec.lambda);
  r.slack_in = nonnegative(std::move(rec.slack_in));
  r.slack_good = nonnegative(std::move(rec.slack_good));
  r.slack_bad = nonnegative(std::move(rec.slack_bad));
  if (r.max_slack() <= kSlackTolerance) {
    r.score = 1.0;
    r.slack_in.setZero();
    r.slack_good.setZero();
    r.slack_bad.setZero();
  } else {
    r.score = std::min(sol.objective, 1.0);
  }
  r.projection.inputs = inst.x0 - r.slack_in;
  r.projection.good = inst.y0_good + r.slack_good;
  r.projection.bad = inst.y0_bad - r.slack_bad;
  return r;
}

EfficiencyResult evaluate_sbm_undesirable(const Dataset& d, std::string_view dmu,
                                          const ModelSpec& spec, const EvalOptions& options) {
  if (spec.kind != ModelKind::SbmUndesirable) {
    throw std::invalid_argument("spec.kind must be SbmUndesirable");
  }
  return evaluate_sbm_undesirable(build_instance(d, dmu, spec), options);
}

EfficiencyResult evaluate(const Dataset& d, std::string_view dmu, const ModelSpec& spec,
                          const EvalOptions& options) {
  const auto inst = build_instance(d, dmu, spec);
  return spec.kind == ModelKind::CcrOutput ? evaluate_ccr_output(inst, options)
                                           : evaluate_sbm_undesirable(inst, options);
}

RateReport improvement_targets(const EfficiencyResult& r, const ModelInstance& inst) {
  RateReport out;
  out.dmu = r.dmu;
  out.input_reduction_pct = (100.0 * r.slack_in.cwiseQuotient(inst.x0)).cwiseMax(0.0);
  out.good_increase_pct =
      (100.0 * ((r.phi - 1.0) + r.slack_good.cwiseQuotient(inst.y0_good).array())).matrix().cwiseMax(0.0);
  if (r.slack_bad.size() == inst.s2() && inst.s2() > 0) {
    out.bad_reduction_pct = (100.0 * r.slack_bad.cwiseQuotient(inst.y0_bad)).cwiseMax(0.0);
  } else {
    out.bad_reduction_pct = Eigen::VectorXd(0);
  }
  return out;
}

std::vector<EfficiencyResult> evaluate_all(const Dataset& d, const ModelSpec& spec,
                                           const EvalOptions& options) {
  require_valid(d);
  const auto& names = d.dmu_names();
  std::vector<EfficiencyResult> results(names.size());
  std::vector<std::exception_ptr> errors(names.size());

  const unsigned workers =
      std::clamp<unsigned>(options.threads, 1, static_cast<unsigned>(std::max<std::size_t>(names.size(), 1)));
  if (workers == 1) {
    for (std::size_t i = 0; i < names.size(); ++i) results[i] = evaluate(d, names[i], spec, options);
    return results;
  }

  // Shared ostreams are not safe to interleave, so tracing is serial-only.
  EvalOptions local = options;
  local.solver.trace = nullptr;
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < names.size(); i = next++) {
        try {
          results[i] = evaluate(d, names[i], spec, local);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

}  // namespace dea
