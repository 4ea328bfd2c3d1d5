#include <gtest/gtest.h>

#include <random>

#include "dea/models.hpp"
#include "oracles.hpp"

using namespace dea;

namespace {

Dataset canonical(bool with_bad = true) {
  std::vector<Indicator> inds{{"x", Role::Input, ""}, {"yg", Role::DesirableOutput, ""}};
  Eigen::MatrixXd v(2, with_bad ? 3 : 2);
  if (with_bad) {
    inds.push_back({"yb", Role::UndesirableOutput, ""});
    v << 1, 2, 1, 1, 1, 2;
  } else {
    v << 1, 2, 1, 1;
  }
  return Dataset({"A", "B"}, inds, v);
}

const ModelSpec kCcr{ModelKind::CcrOutput, ReturnsToScale::crs(), false};
const ModelSpec kSbm{ModelKind::SbmUndesirable, ReturnsToScale::crs(), false};

// n DMUs, m inputs, one good and one bad output, values in [0.5, 10].
Dataset random_dataset(std::mt19937_64& rng, int n, int m) {
  std::uniform_real_distribution<double> u(0.5, 10.0);
  std::vector<std::string> names;
  for (int j = 0; j < n; ++j) names.push_back("D" + std::to_string(j));
  std::vector<Indicator> inds;
  for (int i = 0; i < m; ++i) inds.push_back({"x" + std::to_string(i), Role::Input, ""});
  inds.push_back({"g", Role::DesirableOutput, ""});
  inds.push_back({"b", Role::UndesirableOutput, ""});
  Eigen::MatrixXd v(n, m + 2);
  for (auto& x : v.reshaped()) x = u(rng);
  return Dataset(names, inds, v);
}

void check_certificates(const EfficiencyResult& r, const ModelInstance& inst) {
  EXPECT_GT(r.score, 0.0);
  EXPECT_LE(r.score, 1.0);
  EXPECT_GE(r.lambda.minCoeff(), 0.0);
  // projection stays inside the production possibility set
  const Eigen::VectorXd xp = inst.inputs * r.lambda;
  EXPECT_LE((xp - r.projection.inputs).cwiseAbs().maxCoeff(), 1e-6 * (1 + inst.x0.maxCoeff()));
}

}  // namespace

TEST(BuildInstance, ShapesAndBounds) {
  const auto inst = build_instance(canonical(), "B", kSbm);
  EXPECT_EQ(inst.n(), 2);
  EXPECT_EQ(inst.m(), 1);
  EXPECT_EQ(inst.s1(), 1);
  EXPECT_EQ(inst.s2(), 1);
  EXPECT_EQ(inst.dmu_index, 1);
  EXPECT_EQ(inst.x0(0), 1.0);
  EXPECT_EQ(inst.y0_bad(0), 2.0);
  EXPECT_FALSE(inst.has_lower_row());
  EXPECT_FALSE(inst.has_upper_row());

  const auto vrs = build_instance(canonical(), "A", {ModelKind::SbmUndesirable, ReturnsToScale::vrs(), false});
  EXPECT_EQ(vrs.lower, 1.0);
  EXPECT_EQ(vrs.upper, 1.0);
}

TEST(BuildInstance, ProvinceShape) {
  Eigen::MatrixXd v = Eigen::MatrixXd::Constant(11, 7, 2.0);
  std::vector<Indicator> inds{{"p", Role::Input, ""}, {"f", Role::Input, ""}, {"b", Role::Input, ""},
                              {"h", Role::Input, ""}, {"w", Role::UndesirableOutput, ""},
                              {"g", Role::DesirableOutput, ""}, {"gdp", Role::Meta, ""}};
  std::vector<std::string> names;
  for (int i = 0; i < 11; ++i) names.push_back("P" + std::to_string(i));
  const auto inst = build_instance(Dataset(names, inds, v), "P3", kSbm);
  EXPECT_EQ(inst.m(), 4);
  EXPECT_EQ(inst.s1(), 1);
  EXPECT_EQ(inst.s2(), 1);
  EXPECT_EQ(inst.n(), 11);
  EXPECT_EQ(inst.lower, 0.0);
  EXPECT_EQ(inst.upper, std::numeric_limits<double>::infinity());
}

TEST(BuildInstance, Errors) {
  EXPECT_THROW(build_instance(canonical(), "Z", kCcr), ModelError);
  EXPECT_THROW(build_instance(canonical(false), "A", kSbm), ModelError);
  EXPECT_NO_THROW(build_instance(canonical(false), "A", {ModelKind::SbmUndesirable, ReturnsToScale::crs(), true}));
  EXPECT_THROW(ReturnsToScale::custom(2, 1), std::invalid_argument);
  EXPECT_THROW(ReturnsToScale::custom(-1, 1), std::invalid_argument);
}

TEST(Ccr, CanonicalPair) {
  const auto d = canonical();
  const auto a = evaluate_ccr_output(d, "A", kCcr);
  const auto b = evaluate_ccr_output(d, "B", kCcr);
  EXPECT_NEAR(a.score, 1.0, 1e-6);
  EXPECT_EQ(a.max_slack(), 0.0);
  EXPECT_TRUE(a.efficient());
  EXPECT_NEAR(b.score, 0.5, 1e-6);
  EXPECT_NEAR(b.phi, 2.0, 1e-6);
  const auto rates = improvement_targets(b, build_instance(d, "B", kCcr));
  EXPECT_NEAR(rates.good_increase_pct(0), 100.0, 1e-6);
  EXPECT_NEAR(rates.input_reduction_pct(0), 0.0, 1e-6);
  EXPECT_EQ(rates.bad_reduction_pct.size(), 0);
}

TEST(Ccr, MatchesRatioOracleSingleInputOutput) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.5, 10.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 6;
    std::vector<double> x(n), y(n);
    Eigen::MatrixXd v(n, 2);
    std::vector<std::string> names;
    for (int j = 0; j < n; ++j) {
      x[j] = v(j, 0) = u(rng);
      y[j] = v(j, 1) = u(rng);
      names.push_back("D" + std::to_string(j));
    }
    Dataset d(names, {{"x", Role::Input, ""}, {"y", Role::DesirableOutput, ""}}, v);
    for (int j = 0; j < n; ++j) {
      EXPECT_NEAR(evaluate_ccr_output(d, names[j], kCcr).score, oracle::ccr_ratio(x, y, j), 1e-9);
    }
  }
}

TEST(Ccr, EnumerationOracleMultiInput) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 40; ++trial) {
    const auto d = random_dataset(rng, 3, 2);
    const auto inst = build_instance(d, "D0", kCcr);
    for (int j = 0; j < 3; ++j) {
      const auto r = evaluate_ccr_output(d, d.dmu_names()[j], kCcr);
      EXPECT_NEAR(r.score, oracle::ccr_output_by_enumeration(inst.inputs, inst.good, j), 1e-6);
    }
  }
}

TEST(Sbm, LinearizedDimensions) {
  const auto crs = linearize_sbm(build_instance(canonical(), "B", kSbm));
  EXPECT_EQ(crs.lp.n_vars(), 6);
  EXPECT_EQ(crs.lp.n_constraints(), 4);
  const auto vrs = linearize_sbm(
      build_instance(canonical(), "B", {ModelKind::SbmUndesirable, ReturnsToScale::vrs(), false}));
  EXPECT_EQ(vrs.lp.n_constraints(), 6);
  EXPECT_EQ(vrs.lp.n_vars(), 8);
  const auto lower_only = linearize_sbm(build_instance(
      canonical(), "B", {ModelKind::SbmUndesirable, ReturnsToScale::custom(0.5, std::numeric_limits<double>::infinity()), false}));
  EXPECT_EQ(lower_only.lp.n_constraints(), 5);
}

TEST(Sbm, CanonicalPair) {
  const auto d = canonical();
  const auto inst_b = build_instance(d, "B", kSbm);
  const auto ref = oracle::sbm_by_grid(inst_b.inputs, inst_b.good, inst_b.bad, 1);
  EXPECT_NEAR(ref, 4.0 / 11.0, 1e-6);

  const auto b = evaluate_sbm_undesirable(d, "B", kSbm);
  EXPECT_NEAR(b.score, 4.0 / 11.0, 1e-6);
  EXPECT_NEAR(b.lambda(0), 0.5, 1e-6);
  EXPECT_NEAR(b.lambda(1), 0.0, 1e-6);
  EXPECT_NEAR(b.slack_in(0), 0.5, 1e-6);
  EXPECT_NEAR(b.slack_good(0), 0.0, 1e-6);
  EXPECT_NEAR(b.slack_bad(0), 1.5, 1e-6);
  EXPECT_NEAR(sbm_ratio(inst_b, b.slack_in, b.slack_good, b.slack_bad), b.score, 1e-9);

  const auto rates = improvement_targets(b, inst_b);
  EXPECT_NEAR(rates.input_reduction_pct(0), 50.0, 1e-6);
  EXPECT_NEAR(rates.bad_reduction_pct(0), 75.0, 1e-6);
  EXPECT_NEAR(rates.good_increase_pct(0), 0.0, 1e-6);

  const auto a = evaluate_sbm_undesirable(d, "A", kSbm);
  EXPECT_EQ(a.score, 1.0);
  EXPECT_EQ(a.max_slack(), 0.0);
  const auto ra = improvement_targets(a, build_instance(d, "A", kSbm));
  EXPECT_EQ(ra.input_reduction_pct.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(ra.bad_reduction_pct.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(ra.good_increase_pct.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Sbm, RecoverRejectsVanishingScale) {
  const auto prog = linearize_sbm(build_instance(canonical(), "B", kSbm));
  Eigen::VectorXd primal = Eigen::VectorXd::Zero(prog.lp.n_vars());
  primal(prog.layout.t) = 1e-9;
  try {
    prog.layout.recover(primal, "B");
    FAIL() << "expected ModelError";
  } catch (const ModelError& e) {
    EXPECT_NE(std::string(e.what()).find("degenerate Charnes-Cooper scale"), std::string::npos);
    EXPECT_EQ(e.dmu(), "B");
  }
}

TEST(Sbm, SingleDmuIsEfficient) {
  Eigen::MatrixXd v(1, 3);
  v << 3, 4, 5;
  Dataset d({"solo"}, {{"x", Role::Input, ""}, {"g", Role::DesirableOutput, ""}, {"b", Role::UndesirableOutput, ""}}, v);
  const auto r = evaluate_sbm_undesirable(d, "solo", kSbm);
  EXPECT_EQ(r.score, 1.0);
  EXPECT_NEAR(r.lambda(0), 1.0, 1e-9);
  EXPECT_EQ(evaluate_ccr_output(d, "solo", kCcr).score, 1.0);
}

TEST(EvaluateAll, CanonicalPairBothModels) {
  const auto d = canonical();
  const auto sbm = evaluate_all(d, kSbm);
  ASSERT_EQ(sbm.size(), 2u);
  EXPECT_NEAR(sbm[0].score, 1.0, 1e-9);
  EXPECT_NEAR(sbm[1].score, 4.0 / 11.0, 1e-6);
  const auto ccr = evaluate_all(d, kCcr);
  EXPECT_NEAR(ccr[0].score, 1.0, 1e-9);
  EXPECT_NEAR(ccr[1].score, 0.5, 1e-6);
  EXPECT_EQ(sbm[1].dmu, "B");
  EXPECT_EQ(ccr[1].kind, ModelKind::CcrOutput);
}

TEST(EvaluateAll, IdenticalDmusAreAllEfficient) {
  Eigen::MatrixXd v = Eigen::MatrixXd::Constant(5, 3, 2.5);
  Dataset d({"a", "b", "c", "d", "e"},
            {{"x", Role::Input, ""}, {"g", Role::DesirableOutput, ""}, {"b", Role::UndesirableOutput, ""}}, v);
  for (const auto& spec : {kCcr, kSbm}) {
    for (const auto& r : evaluate_all(d, spec)) EXPECT_EQ(r.score, 1.0) << r.dmu;
  }
}

TEST(EvaluateAll, ParallelMatchesSerial) {
  std::mt19937_64 rng(31);
  const auto d = random_dataset(rng, 15, 3);
  for (const auto& spec : {kCcr, kSbm}) {
    EvalOptions serial, parallel;
    parallel.threads = 4;
    const auto a = evaluate_all(d, spec, serial);
    const auto b = evaluate_all(d, spec, parallel);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t j = 0; j < a.size(); ++j) {
      EXPECT_EQ(a[j].dmu, b[j].dmu);
      EXPECT_EQ(a[j].score, b[j].score);
      EXPECT_TRUE((a[j].lambda.array() == b[j].lambda.array()).all());
    }
  }
}

TEST(EvaluateAll, VrsScoresDominateCrs) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const auto d = random_dataset(rng, 6, 2);
    for (auto kind : {ModelKind::CcrOutput, ModelKind::SbmUndesirable}) {
      const auto crs = evaluate_all(d, {kind, ReturnsToScale::crs(), false});
      const auto vrs = evaluate_all(d, {kind, ReturnsToScale::vrs(), false});
      for (std::size_t j = 0; j < crs.size(); ++j) {
        EXPECT_GE(vrs[j].score, crs[j].score - 1e-7);
        EXPECT_NEAR(vrs[j].lambda.sum(), 1.0, 1e-7);
      }
    }
  }
}

TEST(Properties, SbmMatchesGridOracle) {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + trial % 2, m = 1 + (trial / 2) % 2;
    const auto d = random_dataset(rng, n, m);
    for (int j = 0; j < n; ++j) {
      const auto inst = build_instance(d, d.dmu_names()[j], kSbm);
      const auto r = evaluate_sbm_undesirable(inst);
      const double ref = oracle::sbm_by_grid(inst.inputs, inst.good, inst.bad, j);
      // the grid can only overestimate the minimum
      EXPECT_LE(r.score, ref + 1e-9);
      EXPECT_NEAR(r.score, ref, 5e-3) << "trial " << trial << " dmu " << j;
    }
  }
}

TEST(Properties, UnitsInvariance) {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> scale(1e-3, 1e3);
  for (int trial = 0; trial < 30; ++trial) {
    const auto d = random_dataset(rng, 6, 2);
    Eigen::MatrixXd v = d.values();
    for (Eigen::Index c = 0; c < v.cols(); ++c) v.col(c) *= scale(rng);
    const Dataset scaled(d.dmu_names(), d.indicators(), v);
    for (const auto& spec : {kCcr, kSbm}) {
      const auto a = evaluate_all(d, spec), b = evaluate_all(scaled, spec);
      for (std::size_t j = 0; j < a.size(); ++j) EXPECT_NEAR(a[j].score, b[j].score, 1e-7);
    }
  }
}

TEST(Properties, EfficiencyMeansNoSlack) {
  std::mt19937_64 rng(67);
  for (int trial = 0; trial < 30; ++trial) {
    const auto d = random_dataset(rng, 8, 2);
    for (const auto& spec : {kCcr, kSbm}) {
      for (const auto& r : evaluate_all(d, spec)) {
        const bool no_slack = r.max_slack() <= kSlackTolerance;
        if (spec.kind == ModelKind::SbmUndesirable) {
          EXPECT_EQ(r.score == 1.0, no_slack) << r.dmu;
        } else {
          // CCR efficiency: phi = 1 and no residual slack
          EXPECT_EQ(r.score == 1.0 && no_slack, r.efficient() && no_slack);
          if (r.score < 1.0) EXPECT_GT(r.phi, 1.0);
        }
      }
    }
  }
}

TEST(Properties, ReferenceSetIsEfficient) {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 30; ++trial) {
    const auto d = random_dataset(rng, 8, 2);
    for (const auto& spec : {kCcr, kSbm}) {
      const auto all = evaluate_all(d, spec);
      for (const auto& r : all) {
        for (Eigen::Index j = 0; j < r.lambda.size(); ++j) {
          if (r.lambda(j) > 1e-7) EXPECT_NEAR(all[static_cast<std::size_t>(j)].score, 1.0, 1e-7);
        }
      }
    }
  }
}

TEST(Properties, ProjectionsAreConsistent) {
  std::mt19937_64 rng(73);
  const auto d = random_dataset(rng, 8, 2);
  for (const auto& spec : {kCcr, kSbm}) {
    for (const auto& r : evaluate_all(d, spec)) {
      check_certificates(r, build_instance(d, r.dmu, spec));
    }
  }
}
