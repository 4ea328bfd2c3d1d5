#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "dea/dataset.hpp"
#include "published_data.hpp"

using namespace dea;

namespace {

Dataset parse(const std::string& text, CsvOptions opts = {}) {
  std::istringstream in(text);
  return load_csv(in, opts);
}

Dataset small(std::vector<std::string> names, Eigen::MatrixXd values) {
  return Dataset(std::move(names),
                 {{"x", Role::Input, ""}, {"y", Role::DesirableOutput, ""}},
                 std::move(values));
}

}  // namespace

TEST(LoadCsv, ParsesRolesAndValues) {
  auto d = parse("dmu,in:x,out+:y\nA,1,2\nB,1,1\nC,2,1\n");
  ASSERT_EQ(d.dmu_count(), 3u);
  EXPECT_EQ(d.indicators()[0].role, Role::Input);
  EXPECT_EQ(d.indicators()[1].role, Role::DesirableOutput);
  EXPECT_EQ(d.values()(2, 0), 2.0);
  EXPECT_EQ(d.dmu_names()[1], "B");
}

TEST(LoadCsv, ProvinceShapedHeader) {
  auto d = parse(
      "dmu,in:Personnel,in:Fishing vessels,in:Berths,in:Hotel rooms,out-:Waste water,"
      "out+:Gross ocean product,meta:GDP per capita\n"
      "P1,1,2,3,4,5,6,7\nP2,2,3,4,5,6,7,8\n");
  EXPECT_EQ(d.count(Role::Input), 4u);
  EXPECT_EQ(d.count(Role::DesirableOutput), 1u);
  EXPECT_EQ(d.count(Role::UndesirableOutput), 1u);
  EXPECT_EQ(d.count(Role::Meta), 1u);
  EXPECT_EQ(d.model_indicator_count(), 6u);
}

TEST(LoadCsv, RejectsZeroWithCoordinates) {
  try {
    parse("dmu,in:x,out+:y\nA,1,2\nB,0,1\n");
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("non-positive value"), std::string::npos);
    EXPECT_EQ(e.row(), 3u);
    EXPECT_EQ(e.column(), 2u);
  }
}

TEST(LoadCsv, MetaColumnsMayBeNonPositive) {
  auto d = parse("dmu,in:x,out+:y,meta:g\nA,1,2,-1\nB,1,1,0\n");
  EXPECT_EQ(d.values()(0, 2), -1.0);
}

TEST(LoadCsv, EpsilonShiftReplacesZerosAndWarns) {
  std::vector<std::string> warnings;
  CsvOptions opts;
  opts.epsilon_shift = true;
  opts.on_warning = [&](const std::string& w) { warnings.push_back(w); };
  auto d = parse("dmu,in:x,out+:y\nA,4,2\nB,0,1\n", opts);
  EXPECT_DOUBLE_EQ(d.values()(1, 0), 4e-6);
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_NE(warnings[0].find("B"), std::string::npos);
  EXPECT_THROW(parse("dmu,in:x,out+:y\nA,4,2\nB,-1,1\n", opts), DataError);
}

TEST(LoadCsv, MalformedInputs) {
  EXPECT_THROW(parse("name,in:x,out+:y\nA,1,1\n"), DataError);
  EXPECT_THROW(parse("dmu,x,out+:y\nA,1,1\n"), DataError);
  EXPECT_THROW(parse("dmu,input:x,out+:y\nA,1,1\n"), DataError);
  EXPECT_THROW(parse("dmu,in:x,out+:y\nA,1,abc\n"), DataError);
  EXPECT_THROW(parse("dmu,in:x,out+:y\nA,1,1,000\n"), DataError);
  EXPECT_THROW(parse("dmu,in:x,out+:y\nA,1,1\nA,2,2\n"), DataError);
  EXPECT_THROW(parse("dmu,in:x,in:y\nA,1,1\n"), DataError);  // no desirable output
  EXPECT_THROW(parse(""), DataError);
}

TEST(LoadCsv, QuotedNamesAndCrlf) {
  auto d = parse("dmu,in:x,out+:y\r\n\"Smith, J\",1,2\r\n\"say \"\"hi\"\"\",3,4\r\n");
  EXPECT_EQ(d.dmu_names()[0], "Smith, J");
  EXPECT_EQ(d.dmu_names()[1], "say \"hi\"");
}

TEST(RenderCsv, RoundTripIsBitExact) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(1e-3, 1e6);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd v(5, 3);
    for (auto& x : v.reshaped()) x = u(rng);
    Dataset d({"a", "b,c", "d\"e", "f", "g"},
              {{"x", Role::Input, ""}, {"y", Role::DesirableOutput, ""}, {"z", Role::UndesirableOutput, ""}},
              v);
    auto back = parse(render_csv(d));
    EXPECT_EQ(back.dmu_names(), d.dmu_names());
    for (std::size_t j = 0; j < 3; ++j) {
      EXPECT_EQ(back.indicators()[j].name, d.indicators()[j].name);
      EXPECT_EQ(back.indicators()[j].role, d.indicators()[j].role);
    }
    EXPECT_TRUE((back.values().array() == d.values().array()).all());
  }
}

TEST(Validate, ReportsViolations) {
  Eigen::MatrixXd v(3, 2);
  v << 1, 2, 1, 1, 2, 1;
  EXPECT_TRUE(validate(small({"A", "B", "C"}, v)).empty());

  auto dup = validate(small({"A", "A", "C"}, v));
  ASSERT_EQ(dup.size(), 1u);
  EXPECT_EQ(dup[0].invariant, "duplicate dmu");

  Eigen::MatrixXd w(2, 3);
  w << 1, 2, 3, 1, 1, -1;
  Dataset bad({"A", "B"},
              {{"x", Role::Input, ""}, {"y", Role::DesirableOutput, ""}, {"b", Role::UndesirableOutput, ""}},
              w);
  auto neg = validate(bad);
  ASSERT_EQ(neg.size(), 1u);
  EXPECT_EQ(neg[0].invariant, "non-positive value");
  EXPECT_EQ(neg[0].location, "B / b");

  EXPECT_EQ(validate(small({"A", "B"}, v)).front().invariant, "dimension mismatch");
}

TEST(DescriptiveStats, SmallColumns) {
  Eigen::MatrixXd v(3, 2);
  v << 1, 5, 2, 5, 3, 5;
  Dataset d({"A", "B", "C"}, {{"x", Role::Input, ""}, {"y", Role::DesirableOutput, ""}}, v);
  auto rows = descriptive_stats(d);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].max, 3);
  EXPECT_EQ(rows[0].min, 1);
  EXPECT_DOUBLE_EQ(rows[0].mean, 2);
  EXPECT_DOUBLE_EQ(rows[0].sd, 1);
  EXPECT_EQ(rows[1].sd, 0.0);
}

TEST(DescriptiveStats, SkipsMetaAndNeedsTwoRows) {
  auto d = parse("dmu,in:x,meta:g,out+:y\nA,1,9,2\nB,3,9,4\n");
  auto rows = descriptive_stats(d);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1].indicator, "y");
  EXPECT_THROW(descriptive_stats(parse("dmu,in:x,out+:y\nA,1,2\n")), DataError);
}

TEST(DescriptiveStats, PermutationInvariant) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.5, 100.0);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 3 + trial % 9;
    Eigen::MatrixXd v(n, 2);
    for (auto& x : v.reshaped()) x = u(rng);
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i) names.push_back("d" + std::to_string(i));
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Eigen::MatrixXd p(n, 2);
    for (int i = 0; i < n; ++i) p.row(i) = v.row(perm[i]);
    auto a = descriptive_stats(small(names, v));
    auto b = descriptive_stats(small(names, p));
    for (std::size_t j = 0; j < a.size(); ++j) {
      EXPECT_EQ(a[j].max, b[j].max);
      EXPECT_EQ(a[j].min, b[j].min);
      EXPECT_NEAR(a[j].mean, b[j].mean, 1e-12 * a[j].max);
      EXPECT_NEAR(a[j].sd, b[j].sd, 1e-12 * a[j].max);
      EXPECT_LE(a[j].min, a[j].mean);
      EXPECT_LE(a[j].mean, a[j].max);
    }
  }
}

TEST(Synthesize, ThreeRowsIsDetermined) {
  std::vector<StatsSpec> spec{{"x", Role::Input, 1, 3, 2, 1}, {"y", Role::DesirableOutput, 1, 3, 2, 1}};
  auto d = synthesize_matching(spec, 3, 5);
  std::vector<double> col(d.values().col(0).data(), d.values().col(0).data() + 3);
  std::sort(col.begin(), col.end());
  EXPECT_EQ(col, (std::vector<double>{1, 2, 3}));
}

TEST(Synthesize, DegenerateSpec) {
  std::vector<StatsSpec> spec{{"x", Role::Input, 5, 5, 5, 0}, {"y", Role::DesirableOutput, 1, 3, 2, 1}};
  auto d = synthesize_matching(spec, 4, 1);
  EXPECT_TRUE((d.values().col(0).array() == 5.0).all());
}

TEST(Synthesize, SummaryTableRoundTrip) {
  const auto spec = published::summary_spec();
  auto d = synthesize_matching(spec, 11, 42);
  EXPECT_TRUE(validate(d).empty());
  const auto stats = descriptive_stats(d);
  ASSERT_EQ(stats.size(), spec.size());
  for (std::size_t j = 0; j < spec.size(); ++j) {
    SCOPED_TRACE(spec[j].name);
    EXPECT_EQ(stats[j].min, spec[j].min);
    EXPECT_EQ(stats[j].max, spec[j].max);
    EXPECT_NEAR(stats[j].mean, spec[j].mean, kSynthesisTolerance * spec[j].mean);
    EXPECT_NEAR(stats[j].sd, spec[j].sd, kSynthesisTolerance * spec[j].sd);
  }
}

TEST(Synthesize, DeterministicPerSeed) {
  const auto spec = published::summary_spec();
  EXPECT_EQ(render_csv(synthesize_matching(spec, 11, 42)), render_csv(synthesize_matching(spec, 11, 42)));
  EXPECT_NE(render_csv(synthesize_matching(spec, 11, 42)), render_csv(synthesize_matching(spec, 11, 43)));
}

TEST(Synthesize, OutputAlwaysValidAcrossSeeds) {
  const auto spec = published::summary_spec();
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    EXPECT_TRUE(validate(synthesize_matching(spec, 11, seed)).empty()) << "seed " << seed;
  }
}

TEST(Synthesize, InfeasibleSpecNamesIndicator) {
  // sd far above what [1, 2] allows
  std::vector<StatsSpec> spec{{"wide", Role::Input, 1, 2, 1.5, 10}, {"y", Role::DesirableOutput, 1, 3, 2, 1}};
  try {
    synthesize_matching(spec, 4, 1);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("wide"), std::string::npos);
  }
  std::vector<StatsSpec> narrow{{"x", Role::Input, 1, 3, 2, 1e-6}, {"y", Role::DesirableOutput, 1, 3, 2, 1}};
  EXPECT_THROW(synthesize_matching(narrow, 5, 1), DataError);
  std::vector<StatsSpec> off{{"x", Role::Input, 1, 3, 2.9, 0.5}, {"y", Role::DesirableOutput, 1, 3, 2, 1}};
  EXPECT_THROW(synthesize_matching(off, 3, 1), DataError);
  EXPECT_THROW(synthesize_matching(spec, 2, 1), DataError);
}

TEST(StatsSpecFile, Parses) {
  std::istringstream in("name,role,min,max,mean,sd\nx,in,1,3,2,1\ny,out+,1,3,2,1\n");
  auto spec = read_stats_spec(in);
  ASSERT_EQ(spec.size(), 2u);
  EXPECT_EQ(spec[1].role, Role::DesirableOutput);
  std::istringstream bad("name,role,min,max,mean,sd\nx,input,1,3,2,1\n");
  EXPECT_THROW(read_stats_spec(bad), DataError);
}

TEST(Discrimination, RuleOfThumb) {
  auto make = [](int n, int k) {
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i) names.push_back("d" + std::to_string(i));
    std::vector<Indicator> inds;
    for (int j = 0; j < k; ++j) inds.push_back({"i" + std::to_string(j), j == 0 ? Role::DesirableOutput : Role::Input, ""});
    inds.push_back({"meta", Role::Meta, ""});
    return Dataset(names, inds, Eigen::MatrixXd::Ones(n, k + 1));
  };
  auto a = check_discrimination(make(11, 6));
  EXPECT_NEAR(a.ratio, 11.0 / 6.0, 1e-12);
  EXPECT_TRUE(a.ok);
  auto b = check_discrimination(make(11, 10));
  EXPECT_DOUBLE_EQ(b.ratio, 1.1);
  EXPECT_FALSE(b.ok);
  auto c = check_discrimination(make(12, 6));
  EXPECT_DOUBLE_EQ(c.ratio, 2.0);
  EXPECT_TRUE(c.ok);
  EXPECT_FALSE(check_discrimination(make(12, 6), 2.5).ok);
}
