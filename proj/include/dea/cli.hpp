#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "dea/analysis.hpp"
#include "dea/models.hpp"
#include "dea/report.hpp"

namespace dea::cli {

enum class Command { Stats, Corr, Evaluate, Rank, Synth, Report };

struct RunConfig {
  Command command = Command::Stats;
  std::string input;
  std::optional<ModelKind> model;
  ReturnsToScale rts = ReturnsToScale::crs();
  report::Format format = report::Format::Markdown;
  CorrelationMethod method = CorrelationMethod::Pearson;
  std::string spec_path;
  std::optional<std::size_t> n;
  std::uint64_t seed = 42;
  BandThresholds thresholds;
  bool epsilon_shift = false;
  bool verbose = false;
};

/// Exit codes: 0 success, 1 data/model error, 2 usage error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitData = 1;
inline constexpr int kExitUsage = 2;

/// Runs one command; rendered output goes to `out`, diagnostics to `err`.
int dispatch(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Parses argv into a RunConfig and dispatches.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dea::cli
