#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace dea {

enum class Role { Input, DesirableOutput, UndesirableOutput, Meta };

/// CSV header token for a role: `in`, `out+`, `out-` or `meta`.
std::string_view role_token(Role role);
std::optional<Role> parse_role(std::string_view token);

struct Indicator {
  std::string name;
  Role role = Role::Input;
  std::string units;
};

/// Raised when input data cannot be turned into a usable Dataset.
/// Carries the 1-based file row and column when the problem has a location.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what, std::optional<std::size_t> row = {},
                     std::optional<std::size_t> column = {});

  std::optional<std::size_t> row() const { return row_; }
  std::optional<std::size_t> column() const { return column_; }

 private:
  std::optional<std::size_t> row_;
  std::optional<std::size_t> column_;
};

/// DMU-by-indicator value matrix. Rows are DMUs, columns are indicators.
///
/// Construction only stores the pieces; `validate` reports invariant
/// violations, and every loader/generator in this library refuses to hand
/// out a Dataset that has any.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::vector<std::string> dmu_names, std::vector<Indicator> indicators,
          Eigen::MatrixXd values);

  const std::vector<std::string>& dmu_names() const { return dmu_names_; }
  const std::vector<Indicator>& indicators() const { return indicators_; }
  const Eigen::MatrixXd& values() const { return values_; }

  std::size_t dmu_count() const { return dmu_names_.size(); }
  std::size_t indicator_count() const { return indicators_.size(); }

  std::optional<std::size_t> dmu_index(std::string_view name) const;

  /// Column indices of every indicator with `role`, in indicator order.
  std::vector<std::size_t> columns_with(Role role) const;
  std::size_t count(Role role) const { return columns_with(role).size(); }

  /// Number of indicators that take part in models (everything but Meta).
  std::size_t model_indicator_count() const;

 private:
  std::vector<std::string> dmu_names_;
  std::vector<Indicator> indicators_;
  Eigen::MatrixXd values_;
};

struct Violation {
  std::string invariant;  // e.g. "duplicate dmu", "non-positive value"
  std::string location;
};

/// Empty iff every Dataset invariant holds.
std::vector<Violation> validate(const Dataset& d);

/// Throws DataError describing the first violation, if any.
void require_valid(const Dataset& d);

// ---------------------------------------------------------------------------
// CSV I/O

struct CsvOptions {
  /// Replace zeros in non-Meta columns with 1e-6 * column max instead of
  /// rejecting them. Each replacement is reported through `on_warning`.
  bool epsilon_shift = false;
  std::function<void(const std::string&)> on_warning;
};

Dataset load_csv(std::istream& in, const CsvOptions& options = {});
Dataset load_csv_file(const std::string& path, const CsvOptions& options = {});

/// Dataset CSV with 17 significant digits, so load_csv(render_csv(d)) == d.
std::string render_csv(const Dataset& d);

/// Splits one CSV record honouring RFC-4180 quoting. Exposed for the
/// stats-spec reader and tests.
std::vector<std::string> split_csv_record(std::string_view line);

// ---------------------------------------------------------------------------
// Summaries

struct StatsRow {
  std::string indicator;
  double max = 0;
  double min = 0;
  double mean = 0;
  double sd = 0;  // sample standard deviation (divisor n - 1)
};

/// One row per non-Meta indicator, indicator order. Needs at least 2 DMUs.
std::vector<StatsRow> descriptive_stats(const Dataset& d);

/// Target moments for one synthesized column.
struct StatsSpec {
  std::string name;
  Role role = Role::Input;
  double min = 0;
  double max = 0;
  double mean = 0;
  double sd = 0;
};

/// Reads `name,role,min,max,mean,sd` records (header row required).
std::vector<StatsSpec> read_stats_spec(std::istream& in);
std::vector<StatsSpec> read_stats_spec_file(const std::string& path);

/// Relative tolerance within which synthesized mean and sd must land.
inline constexpr double kSynthesisTolerance = 5e-3;

/// Generates an n-row dataset whose columns have exactly the requested
/// min/max and mean/sd within kSynthesisTolerance. Deterministic per seed.
Dataset synthesize_matching(std::span<const StatsSpec> spec, std::size_t n,
                            std::uint64_t seed);

struct DiscriminationCheck {
  double ratio = 0;
  bool ok = false;
};

/// Rule of thumb: about two DMUs per indicator. `ratio` is DMUs per
/// non-Meta indicator, `ok` is ratio >= threshold.
DiscriminationCheck check_discrimination(const Dataset& d, double threshold = 1.5);

}  // namespace dea
