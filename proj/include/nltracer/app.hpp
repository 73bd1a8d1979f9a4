#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "nltracer/config.hpp"
#include "nltracer/diagnostics.hpp"
#include "nltracer/grid.hpp"

namespace nltracer {

inline constexpr int kReportSchemaVersion = 1;

enum ExitCode : int {
  kExitOk = 0,
  kExitVerdictFailure = 1,
  kExitUsage = 2,
  kExitSolverFailure = 3,
};

struct CommandOptions {
  std::optional<std::filesystem::path> out;  // overrides output.directory
  std::optional<std::size_t> jobs;           // overrides sweep.jobs
  bool force = false;                        // run despite validation errors
  bool write = true;                         // write artifacts to disk
};

struct CommandResult {
  int exit_code = kExitOk;
  nlohmann::json report;
};

/// Static checks only; exit 0 iff validation produced no errors.
CommandResult cmd_check(const RunConfig& cfg, const CommandOptions& options = {});

/// Validates, runs the selected backend(s), evaluates the diagnostics and
/// writes config.json, report.json, trace.csv and snapshots/ to the output
/// directory.
CommandResult cmd_run(const RunConfig& cfg, const CommandOptions& options = {});

/// Convolution-lemma harness over the sample catalogue and an interval ladder.
CommandResult cmd_lemma(const RunConfig& cfg, const CommandOptions& options = {});

/// One cmd_run per sweep value, in parallel, plus summary.csv.
CommandResult cmd_sweep(const RunConfig& cfg, const CommandOptions& options = {});

// --- pieces shared with the bindings and tests ----------------------------------

ValidationOptions validation_options(const RunConfig& cfg);

/// s-grid implied by the numerics block (defaults filled in).
SGrid resolve_sgrid(const RunConfig& cfg);

/// Static checks plus the numerics findings (CFL, step counts, snapshot times).
ValidationResult check_config(const RunConfig& cfg);

/// Intervals starting at 0 followed by intervals starting later.
std::vector<std::pair<double, double>> default_lemma_intervals();

/// Grid on which lemma constants are searched and verified.
std::vector<double> lemma_search_grid(const Kernel& kernel, double tail_tol = 1e-10);

/// Header t,c_norm_sq,eta_norm_sq_mu,total; the eta column is empty for the
/// direct backend.
std::string trace_csv(const EnergyTrace& trace);

nlohmann::json to_json(const ConditionReport& report);
nlohmann::json to_json(const Alpha0Result& a);
nlohmann::json to_json(const ValidationResult& v);

}  // namespace nltracer
