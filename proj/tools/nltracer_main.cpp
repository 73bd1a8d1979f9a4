#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "nltracer/app.hpp"
#include "nltracer/config.hpp"
#include "nltracer/error.hpp"

namespace {

void print_summary(const std::string& verb, const nltracer::CommandResult& r) {
  const auto& rep = r.report;
  std::cout << verb << ": " << rep.value("status", "?") << " (exit " << r.exit_code << ")\n";
  if (rep.contains("alpha0")) std::cout << "  alpha0 = " << rep["alpha0"]["alpha0"].get<double>() << "\n";
  if (rep.contains("validation"))
    for (const auto& f : rep["validation"]["findings"])
      if (f["severity"] != "info")
        std::cout << "  " << f["severity"].get<std::string>() << " " << f["code"].get<std::string>() << ": "
                  << f["message"].get<std::string>() << "\n";
  if (rep.contains("verdicts"))
    for (const auto& f : rep["verdicts"]["failures"]) std::cout << "  failed: " << f.get<std::string>() << "\n";
  if (rep.contains("error")) std::cout << "  error: " << rep["error"]["message"].get<std::string>() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Advection-diffusion with fading memory: checks, runs, lemma harness and sweeps"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::size_t jobs = 0;
  bool force = false, seedless = false, quiet = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Run config (JSON)")->required();
    sub->add_option("--out", out_dir, "Output directory (overrides output.directory)");
    sub->add_flag("--seedless", seedless, "Accepted for compatibility; the tool uses no randomness");
    sub->add_flag("--quiet", quiet, "Suppress the summary on stdout");
  };
  auto* check = app.add_subcommand("check", "Validate a config and print the condition report");
  auto* run = app.add_subcommand("run", "Run a simulation and write trace, snapshots and report");
  auto* lemma = app.add_subcommand("lemma", "Check the convolution lemma on the sample functions");
  auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep");
  for (auto* s : {check, run, lemma, sweep}) add_common(s);
  run->add_flag("--force", force, "Run even when validation reports errors");
  sweep->add_flag("--force", force, "Run points even when validation reports errors");
  sweep->add_option("--jobs", jobs, "Worker threads (overrides sweep.jobs)")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : nltracer::kExitUsage;
  }

  try {
    const auto cfg = nltracer::load_config(config_path);
    nltracer::CommandOptions opts;
    if (!out_dir.empty()) opts.out = std::filesystem::path(out_dir);
    if (jobs > 0) opts.jobs = jobs;
    opts.force = force;

    nltracer::CommandResult r;
    std::string verb;
    if (*check) {
      verb = "check";
      r = nltracer::cmd_check(cfg, opts);
      if (!quiet) std::cout << r.report.dump(2) << "\n";
    } else if (*run) {
      verb = "run";
      r = nltracer::cmd_run(cfg, opts);
    } else if (*lemma) {
      verb = "lemma";
      r = nltracer::cmd_lemma(cfg, opts);
    } else {
      verb = "sweep";
      r = nltracer::cmd_sweep(cfg, opts);
    }
    if (!quiet && verb != "check") print_summary(verb, r);
    if (quiet && verb == "check" && r.exit_code != 0) print_summary(verb, r);
    return r.exit_code;
  } catch (const nltracer::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.code()) {
      case nltracer::ErrorCode::ParseError:
      case nltracer::ErrorCode::IoError:
      case nltracer::ErrorCode::InvalidArgument:
      case nltracer::ErrorCode::ValidationError: return nltracer::kExitUsage;
      default: return nltracer::kExitSolverFailure;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return nltracer::kExitSolverFailure;
  }
}
