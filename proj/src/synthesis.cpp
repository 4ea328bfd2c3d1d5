#include <algorithm>
#include <cmath>
#include <random>

#include "dea/dataset.hpp"

namespace dea {

namespace {

class Uniform01 {
 public:
  explicit Uniform01(std::uint64_t seed) : engine_(seed) {}
  // 53 random mantissa bits; independent of the standard library's
  // distribution implementations so output is stable across toolchains.
  double next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }

 private:
  std::mt19937_64 engine_;
};

bool within(double actual, double target) {
  return std::abs(actual - target) <= kSynthesisTolerance * std::abs(target);
}

[[noreturn]] void infeasible(const StatsSpec& s, const std::string& why) {
  throw DataError("infeasible stats spec for '" + s.name + "': " + why);
}

Eigen::VectorXd synthesize_column(const StatsSpec& s, std::size_t n, Uniform01& rng) {
  const auto len = static_cast<Eigen::Index>(n);
  if (!std::isfinite(s.min) || !std::isfinite(s.max) || !std::isfinite(s.mean) ||
      !std::isfinite(s.sd)) {
    infeasible(s, "non-finite target");
  }
  if (s.min > s.max) infeasible(s, "min exceeds max");
  if (s.sd < 0.0) infeasible(s, "negative sd");

  if (s.min == s.max) {
    if (s.mean != s.min || s.sd != 0.0) infeasible(s, "min == max requires mean == min, sd == 0");
    return Eigen::VectorXd::Constant(len, s.min);
  }
  if (!(s.mean > s.min && s.mean < s.max)) infeasible(s, "mean must lie strictly inside (min, max)");
  if (s.sd == 0.0) infeasible(s, "sd 0 with min < max");

  const auto k = static_cast<double>(n - 2);
  const double interior_mean = (static_cast<double>(n) * s.mean - s.min - s.max) / k;
  if (interior_mean < s.min || interior_mean > s.max) {
    infeasible(s, "mean not reachable with the remaining " + std::to_string(n - 2) + " values");
  }
  // Sum of squared deviations the interior points must contribute about
  // their own mean.
  double spread = s.sd * s.sd * static_cast<double>(n - 1) - (s.min - s.mean) * (s.min - s.mean) -
                  (s.max - s.mean) * (s.max - s.mean) -
                  k * (interior_mean - s.mean) * (interior_mean - s.mean);
  const double max_spread = k * (interior_mean - s.min) * (s.max - interior_mean);
  const double total = s.sd * s.sd * static_cast<double>(n - 1);
  if (spread < -kSynthesisTolerance * total) infeasible(s, "sd too small for min/max/mean");
  if (spread > max_spread * (1.0 + 1e-12)) infeasible(s, "sd too large for min/max/mean");
  spread = std::clamp(spread, 0.0, max_spread);

  const std::size_t at_min = rng.index(n);
  std::size_t at_max = rng.index(n - 1);
  if (at_max >= at_min) ++at_max;

  Eigen::VectorXd interior(static_cast<Eigen::Index>(n - 2));
  for (auto& z : interior) z = s.min + (s.max - s.min) * rng.next();

  auto clamp_all = [&] {
    for (auto& z : interior) z = std::clamp(z, s.min, s.max);
  };
  for (int iter = 0; iter < 1000; ++iter) {
    interior.array() += interior_mean - interior.mean();
    clamp_all();
    const Eigen::VectorXd dev = interior.array() - interior_mean;
    const double ss = dev.squaredNorm();
    if (ss > 0.0) {
      interior = (dev * std::sqrt(spread / ss)).array() + interior_mean;
      clamp_all();
    }
    const double mean_err = std::abs(interior.mean() - interior_mean);
    const double ss_err = std::abs((interior.array() - interior_mean).square().sum() - spread);
    if (mean_err <= 1e-12 * (s.max - s.min) && ss_err <= 1e-12 * (total + 1.0)) break;
  }

  Eigen::VectorXd col(len);
  std::size_t next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == at_min) col(static_cast<Eigen::Index>(i)) = s.min;
    else if (i == at_max) col(static_cast<Eigen::Index>(i)) = s.max;
    else col(static_cast<Eigen::Index>(i)) = interior(static_cast<Eigen::Index>(next++));
  }

  const double mean = col.mean();
  const double sd = std::sqrt((col.array() - mean).square().sum() / static_cast<double>(n - 1));
  if (!within(mean, s.mean) || !within(sd, s.sd)) {
    infeasible(s, "could not match mean/sd within tolerance");
  }
  return col;
}

}  // namespace

Dataset synthesize_matching(std::span<const StatsSpec> spec, std::size_t n, std::uint64_t seed) {
  if (n < 3) throw DataError("synthesis needs n >= 3");
  if (spec.empty()) throw DataError("synthesis needs at least one indicator");

  Uniform01 rng(seed);
  Eigen::MatrixXd values(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(spec.size()));
  std::vector<Indicator> indicators;
  for (std::size_t j = 0; j < spec.size(); ++j) {
    values.col(static_cast<Eigen::Index>(j)) = synthesize_column(spec[j], n, rng);
    indicators.push_back({spec[j].name, spec[j].role, ""});
  }

  const auto width = std::to_string(n).size();
  std::vector<std::string> names;
  for (std::size_t i = 1; i <= n; ++i) {
    auto digits = std::to_string(i);
    names.push_back("DMU" + std::string(width - digits.size(), '0') + digits);
  }

  Dataset d(std::move(names), std::move(indicators), std::move(values));
  require_valid(d);
  return d;
}

}  // namespace dea
