#include "dea/cli.hpp"

#include <chrono>
#include <map>
#include <ostream>

#include "CLI11.hpp"
#include "dea/dataset.hpp"

namespace dea::cli {

namespace {

// Usage problems discovered after parsing (missing --model and friends).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string_view command_name(Command c) {
  switch (c) {
    case Command::Stats: return "stats";
    case Command::Corr: return "corr";
    case Command::Evaluate: return "evaluate";
    case Command::Rank: return "rank";
    case Command::Synth: return "synth";
    case Command::Report: return "report";
  }
  return "?";
}

Dataset load(const RunConfig& cfg, std::ostream& err) {
  if (cfg.input.empty()) throw UsageError(std::string(command_name(cfg.command)) + ": --input is required");
  CsvOptions opts;
  opts.epsilon_shift = cfg.epsilon_shift;
  opts.on_warning = [&err](const std::string& w) { err << "warning: " << w << "\n"; };
  return load_csv_file(cfg.input, opts);
}

EvalOptions eval_options(const RunConfig& cfg, std::ostream& err) {
  EvalOptions opts;
  try {
    opts.solver.iteration_cap = lp::iteration_cap_from_env(opts.solver.iteration_cap);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (cfg.verbose) opts.solver.trace = &err;
  return opts;
}

ModelKind require_model(const RunConfig& cfg) {
  if (!cfg.model) throw UsageError(std::string(command_name(cfg.command)) + ": --model is required");
  return *cfg.model;
}

void warn_discrimination(const Dataset& d, std::ostream& err) {
  const auto check = check_discrimination(d);
  if (!check.ok) {
    err << "warning: " << d.dmu_count() << " DMUs for " << d.model_indicator_count()
        << " indicators (ratio " << check.ratio << "); discrimination may be weak\n";
  }
}

}  // namespace

int dispatch(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (cfg.command == Command::Synth) {
      if (cfg.spec_path.empty() || !cfg.n) throw UsageError("synth: --spec and --n are required");
      const auto spec = read_stats_spec_file(cfg.spec_path);
      out << render_csv(synthesize_matching(spec, *cfg.n, cfg.seed));
      return kExitOk;
    }

    if (cfg.command == Command::Evaluate || cfg.command == Command::Rank) require_model(cfg);
    const auto opts = eval_options(cfg, err);
    const auto d = load(cfg, err);
    report::Table table;
    switch (cfg.command) {
      case Command::Stats: {
        const auto rows = descriptive_stats(d);
        table = report::stats_table(rows);
        break;
      }
      case Command::Corr:
        table = report::correlation_table(correlation_matrix(d, cfg.method));
        break;
      case Command::Evaluate:
      case Command::Rank: {
        warn_discrimination(d, err);
        const ModelSpec spec{*cfg.model, cfg.rts, false};
        const auto results = evaluate_all(d, spec, opts);
        table = cfg.command == Command::Evaluate
                    ? report::evaluation_table(d, results, cfg.thresholds)
                    : report::rank_table(results, cfg.thresholds);
        break;
      }
      case Command::Report: {
        warn_discrimination(d, err);
        const auto ee = evaluate_all(d, {ModelKind::CcrOutput, cfg.rts, false}, opts);
        const auto epi = evaluate_all(d, {ModelKind::SbmUndesirable, cfg.rts, false}, opts);
        table = report::comparison_table(compare_models(ee, epi, d), cfg.thresholds);
        break;
      }
      case Command::Synth: break;
    }
    out << report::render_table(table, cfg.format);
    return kExitOk;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Data envelopment analysis: CCR and SBM-with-undesirable-outputs efficiency"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string model, rts = "crs", format = "md", method = "pearson";
  std::size_t n = 0;

  app.add_option("--input", cfg.input, "Dataset CSV (dmu, <role>:<name> ...)");
  app.add_option("--model", model, "Model for evaluate/rank")
      ->check(CLI::IsMember({"ccr", "sbm-u"}));
  app.add_option("--rts", rts, "Returns to scale")->check(CLI::IsMember({"crs", "vrs"}));
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json", "md"}));
  app.add_option("--method", method, "Correlation method")
      ->check(CLI::IsMember({"pearson", "spearman"}));
  app.add_option("--spec", cfg.spec_path, "Stats spec CSV for synth");
  auto* n_opt = app.add_option("--n", n, "Number of DMUs to synthesize")->check(CLI::PositiveNumber);
  app.add_option("--seed", cfg.seed, "Synthesis seed");
  app.add_option("--t1", cfg.thresholds.upper, "Band 1 threshold");
  app.add_option("--t2", cfg.thresholds.lower, "Band 2 threshold");
  app.add_flag("--epsilon-shift", cfg.epsilon_shift, "Replace zeros by 1e-6 x column max");
  app.add_flag("--verbose", cfg.verbose, "Trace simplex pivots on stderr");

  const std::map<std::string, Command> commands{
      {"stats", Command::Stats}, {"corr", Command::Corr},   {"evaluate", Command::Evaluate},
      {"rank", Command::Rank},   {"synth", Command::Synth}, {"report", Command::Report}};
  const std::map<std::string, std::string> help{
      {"stats", "Descriptive statistics per indicator"},
      {"corr", "Correlation matrix over indicators"},
      {"evaluate", "Scores, slacks-derived rates and reference sets for one model"},
      {"rank", "Scores, competition ranks and efficiency levels for one model"},
      {"synth", "Generate a dataset matching target statistics"},
      {"report", "Joint CCR / SBM table with ranks, rates and a mean row"}};
  for (const auto& [name, _] : commands) app.add_subcommand(name, help.at(name))->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  cfg.command = commands.at(app.get_subcommands().front()->get_name());
  if (!model.empty()) cfg.model = model == "ccr" ? ModelKind::CcrOutput : ModelKind::SbmUndesirable;
  cfg.rts = rts == "vrs" ? ReturnsToScale::vrs() : ReturnsToScale::crs();
  cfg.format = *report::parse_format(format);
  cfg.method = method == "spearman" ? CorrelationMethod::Spearman : CorrelationMethod::Pearson;
  if (n_opt->count() > 0) cfg.n = n;
  if (!(cfg.thresholds.lower > 0.0 && cfg.thresholds.upper > cfg.thresholds.lower &&
        cfg.thresholds.upper <= 1.0)) {
    err << "error: need 0 < --t2 < --t1 <= 1\n";
    return kExitUsage;
  }
  return dispatch(cfg, out, err);
}

}  // namespace dea::cli
