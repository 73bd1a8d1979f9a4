#include "nltracer/app.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

#include "nltracer/csv.hpp"
#include "nltracer/error.hpp"
#include "nltracer/solver_direct.hpp"
#include "nltracer/solver_memory.hpp"

namespace nltracer {

using nlohmann::json;

namespace {

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::filesystem::path output_dir(const RunConfig& cfg, const CommandOptions& options) {
  return options.out ? *options.out : std::filesystem::path(cfg.output.directory);
}

void add(ValidationResult& v, Severity s, std::string code, std::string message,
         std::optional<double> value = std::nullopt) {
  v.findings.push_back(Finding{s, std::move(code), std::move(message), value});
}

std::string step_name(std::size_t step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%08zu", step);
  return buf;
}

struct SnapshotPlan {
  std::vector<std::size_t> steps;
  bool contains(std::size_t s) const { return std::binary_search(steps.begin(), steps.end(), s); }
};

SnapshotPlan snapshot_plan(const RunConfig& cfg) {
  SnapshotPlan plan;
  const double dt = cfg.numerics.dt;
  for (double t : cfg.output.snapshot_times) {
    const double r = t / dt;
    plan.steps.push_back(static_cast<std::size_t>(std::llround(std::max(0.0, r))));
  }
  std::sort(plan.steps.begin(), plan.steps.end());
  plan.steps.erase(std::unique(plan.steps.begin(), plan.steps.end()), plan.steps.end());
  return plan;
}

json error_json(const Error& e) {
  return {{"code", std::string(to_string(e.code()))}, {"message", e.message()}};
}

}  // namespace

// --- shared pieces ------------------------------------------------------------

ValidationOptions validation_options(const RunConfig& cfg) {
  ValidationOptions o;
  o.theorem = cfg.theorem;
  o.memory_backend = cfg.backend != Backend::Direct;
  o.cross_validation = cfg.backend == Backend::Both;
  o.delta = cfg.numerics.delta;
  o.boundary_tol = cfg.numerics.boundary_tol;
  o.condition_tol = cfg.numerics.condition_tol;
  o.tail_tol = cfg.numerics.tail_tol;
  if (o.memory_backend) o.s_max = resolve_sgrid(cfg).s_max();
  return o;
}

SGrid resolve_sgrid(const RunConfig& cfg) {
  const double s_max =
      cfg.numerics.s_max ? *cfg.numerics.s_max : weight_truncation_depth(cfg.problem.kernel, cfg.numerics.tail_tol);
  const std::size_t n_s =
      cfg.numerics.n_s ? *cfg.numerics.n_s
                       : std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(s_max / cfg.numerics.dt + 1e-9)));
  return SGrid(s_max, n_s);
}

ValidationResult check_config(const RunConfig& cfg) {
  ValidationResult v = validate(cfg.problem, validation_options(cfg));
  const auto& n = cfg.numerics;
  const Grid1D grid(cfg.problem.half_width, n.n_x);

  double umax = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) umax = std::max(umax, std::abs(cfg.problem.velocity.u(grid.x(i))));
  const double cfl = umax * n.dt / grid.dx();
  if (cfl > 1.0)
    add(v, Severity::Error, "numerics.cfl", "advection CFL max|U| dt/dx exceeds 1", cfl);

  std::optional<std::size_t> steps;
  try {
    steps = step_count(cfg.problem.t_final, n.dt);
  } catch (const Error& e) {
    add(v, Severity::Error, "numerics.dt", e.message());
  }
  if (steps && *steps % n.trace_stride != 0)
    add(v, Severity::Error, "numerics.trace_stride", "trace_stride must divide the number of steps",
        static_cast<double>(*steps));

  if (cfg.backend != Backend::Direct) {
    const SGrid sg = resolve_sgrid(cfg);
    if (n.dt > sg.ds() * (1.0 + 1e-12))
      add(v, Severity::Error, "numerics.history_cfl", "memory backend needs dt <= ds", n.dt / sg.ds());
  }
  if (cfg.theorem == Theorem::Theorem2 && cfg.backend == Backend::Direct)
    add(v, Severity::Warning, "checks.theorem2_direct",
        "history-norm diagnostics need the memory backend; only C-based checks run");

  for (double t : cfg.output.snapshot_times) {
    const double r = t / n.dt;
    const double s = std::round(r);
    const bool on_grid = t >= 0.0 && std::abs(r - s) <= 1e-9 * std::max(1.0, r);
    const bool in_range = t <= cfg.problem.t_final * (1.0 + 1e-12);
    const bool on_stride = on_grid && static_cast<std::size_t>(s) % n.trace_stride == 0;
    if (!on_grid || !in_range || !on_stride)
      add(v, Severity::Error, "output.snapshot_times",
          "snapshot times must be stride multiples of dt within [0, t_final]", t);
  }
  return v;
}

std::vector<std::pair<double, double>> default_lemma_intervals() {
  return {{0, 1}, {0, 2}, {0, 5}, {0, 10}, {0, 30}, {1, 2}, {2, 3}, {5, 6}, {1, 10}, {5, 30}};
}

std::vector<double> lemma_search_grid(const Kernel& kernel, double tail_tol) {
  if (const auto* tab = std::get_if<TabulatedKernel>(&kernel.family())) {
    std::vector<double> g;
    const double lo = tab->t.front();
    const double hi = tab->t.back();
    for (std::size_t i = 0; i <= 4000; ++i) g.push_back(lo + (hi - lo) * static_cast<double>(i) / 4000.0);
    return g;
  }
  return uniform_grid(std::max(kernel.horizon(tail_tol), 1.0), 4000);
}

std::string trace_csv(const EnergyTrace& trace) {
  CsvWriter w({"t", "c_norm_sq", "eta_norm_sq_mu", "total"});
  for (const auto& r : trace.rows)
    w.row_cells({format_double(r.t), format_double(r.c_norm_sq),
                 r.eta_norm_sq_mu ? format_double(*r.eta_norm_sq_mu) : std::string(), format_double(r.total())});
  return w.str();
}

json to_json(const ConditionReport& report) {
  json arr = json::array();
  for (const auto& e : report.entries)
    arr.push_back({{"id", e.id},
                   {"statement", e.statement},
                   {"verdict", std::string(to_string(e.verdict))},
                   {"worst_margin", e.worst_margin},
                   {"witness", opt(e.witness)},
                   {"tolerance", e.tolerance},
                   {"strict", e.strict},
                   {"note", e.note}});
  return arr;
}

json to_json(const Alpha0Result& a) {
  return {{"alpha0", a.alpha0}, {"sup_uprime", a.sup_uprime}, {"argmax_x", a.argmax_x}, {"holds", a.holds}};
}

json to_json(const ValidationResult& v) {
  json findings = json::array();
  for (const auto& f : v.findings)
    findings.push_back({{"severity", std::string(to_string(f.severity))},
                        {"code", f.code},
                        {"message", f.message},
                        {"value", opt(f.value)}});
  return {{"has_errors", v.has_errors()}, {"findings", findings}};
}

namespace {

json report_header(const char* command, const RunConfig& cfg) {
  return {{"schema", "nltracer.report"},
          {"schema_version", kReportSchemaVersion},
          {"command", command},
          {"config", config_to_json(cfg)}};
}

void add_validation(json& report, const ValidationResult& v) {
  report["validation"] = to_json(v);
  report["alpha0"] = to_json(v.alpha0);
  report["delta"] = opt(v.delta);
  report["conditions"] = to_json(v.conditions);
}

// --- trace diagnostics ---------------------------------------------------------

struct TraceVerdicts {
  json summary;
  std::optional<bool> monotone;
  std::optional<bool> inequality;
  std::optional<bool> decaying;
  std::optional<bool> nakao;
  std::optional<double> b;
  std::optional<double> r_squared;
};

json monotone_json(const MonotoneResult& m) {
  json j = {{"holds", m.holds}, {"worst_increase", m.worst_increase}, {"tolerance", m.tolerance}};
  j["first_violation"] = m.first_violation ? json(*m.first_violation) : json(nullptr);
  return j;
}

json inequality_json(const EnergyInequalityResult& r) {
  return {{"holds", r.holds},
          {"gronwall_form", r.gronwall_form},
          {"worst_margin", r.worst_margin},
          {"worst_interval", r.worst_index ? json({r.intervals[*r.worst_index].t0, r.intervals[*r.worst_index].t1})
                                           : json(nullptr)},
          {"violations", r.violations},
          {"intervals", r.intervals.size()},
          {"tolerance", r.tolerance}};
}

json fit_json(const EnergyTrace& trace, TraceQuantity q, std::optional<double>& b, std::optional<double>& r2) {
  const bool all_zero = std::all_of(trace.rows.begin(), trace.rows.end(), [q](const EnergySample& s) {
    return (q == TraceQuantity::Total ? s.total() : s.c_norm_sq) == 0.0;
  });
  if (all_zero) return {{"status", "all_zero"}, {"non_decaying", true}, {"a", nullptr}, {"b", nullptr}};
  try {
    const auto f = fit_decay(trace, std::nullopt, q);
    b = f.b;
    r2 = f.r_squared;
    return {{"status", "ok"},      {"a", f.a},         {"b", f.b},
            {"r_squared", f.r_squared}, {"window", {f.t_lo, f.t_hi}}, {"samples", f.samples},
            {"non_decaying", f.non_decaying}};
  } catch (const Error& e) {
    return {{"status", "failed"}, {"error", error_json(e)}, {"non_decaying", true}};
  }
}

TraceVerdicts diagnose(const EnergyTrace& trace, const ValidationResult& v, double tol) {
  TraceVerdicts out;
  json& s = out.summary;
  const double a0 = v.alpha0.alpha0;

  const auto mono = check_monotone(trace, tol);
  s["monotone"] = monotone_json(mono);
  out.monotone = mono.holds;

  const auto ineq = check_energy_inequality(trace, a0, std::nullopt, tol);
  s["energy_inequality"] = inequality_json(ineq);
  out.inequality = ineq.holds;

  if (trace.has_eta()) {
    const auto mono_total = check_monotone(trace, tol, TraceQuantity::Total);
    s["monotone_total"] = monotone_json(mono_total);
    if (v.delta) {
      const auto g = check_energy_inequality(trace, a0, v.delta, tol);
      s["gronwall_inequality"] = inequality_json(g);
    } else {
      s["gronwall_inequality"] = {{"status", "not-applicable"}, {"reason", "no delta available"}};
    }
  }

  const double span = trace.rows.back().t - trace.rows.front().t;
  if (a0 > 0.0 && span >= 1.0 - 1e-12) {
    const auto n = check_nakao_hypothesis(trace, a0, tol);
    s["nakao"] = {{"holds", n.holds},
                  {"windows", n.windows.size()},
                  {"violations", n.violations},
                  {"worst_excess", n.worst_excess},
                  {"tolerance", n.tolerance}};
    out.nakao = n.holds;
  } else {
    s["nakao"] = {{"status", "not-applicable"}, {"reason", a0 > 0.0 ? "trace shorter than one unit" : "alpha0 <= 0"}};
  }

  s["decay_fit"] = fit_json(trace, TraceQuantity::CNormSq, out.b, out.r_squared);
  out.decaying = out.b && *out.b > 0.0;
  if (trace.has_eta()) {
    std::optional<double> bt, rt;
    s["decay_fit_total"] = fit_json(trace, TraceQuantity::Total, bt, rt);
  }
  return out;
}

void snapshot_observer(RunOptions& ro, const SnapshotPlan& plan, const Grid1D& grid, const SGrid* sgrid,
                       const std::filesystem::path& dir, const std::string& prefix, bool eta_slices) {
  if (plan.steps.empty()) return;
  ro.observers.push_back([&plan, grid, sgrid, dir, prefix, eta_slices](const Observation& o) {
    if (!plan.contains(o.step)) return;
    CsvWriter c({"x", "c"});
    for (std::size_t i = 0; i < grid.size(); ++i) c.row({grid.x(i), o.c[i]});
    write_text(dir / "snapshots" / (prefix + "_c_" + step_name(o.step) + ".csv"), c.str());
    if (eta_slices && sgrid && o.eta_columns > 0) {
      CsvWriter e({"s", "eta_l2_sq"});
      for (std::size_t j = 0; j < o.eta_columns; ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
          const double val = o.eta[i * o.eta_columns + j];
          acc += val * val;
        }
        e.row({sgrid->s(j), acc * grid.dx()});
      }
      write_text(dir / "snapshots" / (prefix + "_eta_" + step_name(o.step) + ".csv"), e.str());
    }
  });
}

}  // namespace

// --- commands ------------------------------------------------------------------

CommandResult cmd_check(const RunConfig& cfg, const CommandOptions& options) {
  CommandResult r;
  r.report = report_header("check", cfg);
  const auto v = check_config(cfg);
  add_validation(r.report, v);
  r.exit_code = v.has_errors() ? kExitVerdictFailure : kExitOk;
  r.report["status"] = v.has_errors() ? "invalid" : "ok";
  if (options.write && options.out) write_text(*options.out / "report.json", r.report.dump(2) + "\n");
  return r;
}

CommandResult cmd_run(const RunConfig& cfg, const CommandOptions& options) {
  const auto t_start = std::chrono::steady_clock::now();
  CommandResult r;
  json& report = r.report;
  report = report_header("run", cfg);
  const auto dir = output_dir(cfg, options);

  const auto v = check_config(cfg);
  add_validation(report, v);
  auto finish = [&](int code, const char* status) {
    r.exit_code = code;
    report["status"] = status;
    report["timing"]["total_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    if (options.write) {
      write_text(dir / "config.json", serialize_config(cfg));
      write_text(dir / "report.json", report.dump(2) + "\n");
    }
    return r;
  };
  if (v.has_errors() && !options.force) return finish(kExitVerdictFailure, "invalid");

  const auto& n = cfg.numerics;
  const Grid1D grid(cfg.problem.half_width, n.n_x);
  const bool use_memory = cfg.backend != Backend::Direct;
  const std::optional<SGrid> sgrid = use_memory ? std::optional<SGrid>(resolve_sgrid(cfg)) : std::nullopt;
  const auto plan = snapshot_plan(cfg);

  report["resolved"] = {{"n_x", grid.size()}, {"dx", grid.dx()}, {"dt", n.dt}};
  if (sgrid) {
    report["resolved"]["s_max"] = sgrid->s_max();
    report["resolved"]["n_s"] = sgrid->intervals();
    report["resolved"]["ds"] = sgrid->ds();
  }

  std::optional<DirectRun> direct;
  std::optional<MemoryRun> memory;
  try {
    if (cfg.backend != Backend::Memory) {
      RunOptions ro{n.trace_stride, {}};
      if (options.write) snapshot_observer(ro, plan, grid, nullptr, dir, "direct", false);
      direct = run_direct(cfg.problem, grid, n.dt, ro);
    }
    if (use_memory) {
      RunOptions ro{n.trace_stride, {}};
      if (options.write) snapshot_observer(ro, plan, grid, &*sgrid, dir, "memory", cfg.output.eta_slices);
      memory = run_memory(cfg.problem, grid, *sgrid, n.dt, ro);
    }
    if (cfg.backend == Backend::Both) {
      const auto cv = cross_validate(cfg.problem, grid, *sgrid, n.dt);
      report["cross_validation"] = {{"max_rel_diff", cv.max_rel_diff},
                                    {"refined_max_rel_diff", cv.refined_max_rel_diff},
                                    {"ratio", opt(cv.ratio)},
                                    {"convergence_order", opt(cv.convergence_order)}};
    }
  } catch (const Error& e) {
    report["error"] = error_json(e);
    return finish(kExitSolverFailure, "solver_failure");
  }

  const double tol = n.inequality_tol;
  json checked = json::array();
  auto verdict = [&](const std::string& name, const std::optional<bool>& holds) {
    checked.push_back({{"name", name}, {"holds", holds ? json(*holds) : json(nullptr)}});
  };

  if (direct) {
    auto d = diagnose(direct->trace, v, tol);
    d.summary["steps"] = direct->steps;
    d.summary["wall_seconds"] = direct->wall_seconds;
    d.summary["final_c_norm_sq"] = direct->trace.rows.back().c_norm_sq;
    report["runs"]["direct"] = d.summary;
    report["timing"]["direct_seconds"] = direct->wall_seconds;
    if (cfg.theorem != Theorem::None && (cfg.theorem == Theorem::Theorem1 || !memory)) {
      verdict("direct.monotone", d.monotone);
      verdict("direct.energy_inequality", d.inequality);
      verdict("direct.decay_rate_positive", d.decaying);
      if (cfg.theorem == Theorem::Theorem1) verdict("direct.nakao", d.nakao);
    }
  }
  if (memory) {
    auto m = diagnose(memory->trace, v, tol);
    m.summary["steps"] = memory->steps;
    m.summary["wall_seconds"] = memory->wall_seconds;
    m.summary["final_c_norm_sq"] = memory->trace.rows.back().c_norm_sq;
    m.summary["final_eta_norm_sq_mu"] = memory->trace.rows.back().eta_norm_sq_mu.value_or(0.0);
    m.summary["max_tail_term"] = memory->max_tail_term;
    report["timing"]["memory_seconds"] = memory->wall_seconds;
    if (cfg.theorem == Theorem::Theorem1 && !direct) {
      verdict("memory.monotone", m.monotone);
      verdict("memory.energy_inequality", m.inequality);
      verdict("memory.decay_rate_positive", m.decaying);
      verdict("memory.nakao", m.nakao);
    }
    if (cfg.theorem == Theorem::Theorem2) {
      verdict("memory.monotone_total", m.summary["monotone_total"]["holds"].get<bool>());
      const auto& g = m.summary["gronwall_inequality"];
      verdict("memory.gronwall_inequality",
              g.contains("holds") ? std::optional<bool>(g["holds"].get<bool>()) : std::nullopt);
      const auto& ft = m.summary["decay_fit_total"];
      verdict("memory.decay_rate_positive", ft.contains("b") && ft["b"].is_number() && ft["b"].get<double>() > 0.0);
    }
    report["runs"]["memory"] = m.summary;
  }

  json failures = json::array();
  for (const auto& c : checked)
    if (!c["holds"].is_boolean() || !c["holds"].get<bool>()) failures.push_back(c["name"]);
  report["verdicts"] = {{"theorem", std::string(to_string(cfg.theorem))}, {"checked", checked}, {"failures", failures}};

  if (options.write) {
    if (memory) {
      write_text(dir / "trace.csv", trace_csv(memory->trace));
      if (direct) write_text(dir / "trace_direct.csv", trace_csv(direct->trace));
    } else {
      write_text(dir / "trace.csv", trace_csv(direct->trace));
    }
  }
  const bool ok = failures.empty() && !v.has_errors();
  return finish(ok ? kExitOk : kExitVerdictFailure, ok ? "ok" : "verdict_failure");
}

CommandResult cmd_lemma(const RunConfig& cfg, const CommandOptions& options) {
  CommandResult r;
  json& report = r.report;
  report = report_header("lemma", cfg);
  const auto dir = output_dir(cfg, options);
  const LemmaConfig lc = cfg.lemma.value_or(LemmaConfig{});
  const auto& kernel = cfg.problem.kernel;

  auto finish = [&](int code, const char* status) {
    r.exit_code = code;
    report["status"] = status;
    if (options.write) write_text(dir / "report.json", report.dump(2) + "\n");
    return r;
  };

  LemmaConstants constants;
  try {
    const auto grid = lemma_search_grid(kernel, cfg.numerics.tail_tol);
    constants = lc.beta0 ? lemma_constants_for(kernel, *lc.beta0, *lc.gamma, grid, cfg.numerics.tail_tol)
                         : lemma_constants(kernel, grid, cfg.numerics.tail_tol);
  } catch (const Error& e) {
    report["error"] = error_json(e);
    return finish(kExitVerdictFailure,
                  e.code() == ErrorCode::NotApplicable ? "not_applicable" : "no_valid_constants");
  }
  report["constants"] = {{"beta0", constants.beta0},
                         {"gamma", constants.gamma},
                         {"big_k", constants.big_k},
                         {"bound_factor", constants.bound_factor},
                         {"min_margin", constants.min_margin}};

  const auto intervals = lc.intervals.empty() ? default_lemma_intervals() : lc.intervals;
  json rows = json::array();
  CsvWriter csv({"function", "t0", "t1", "lhs", "rhs", "lhs_error", "rhs_error", "holds"});
  bool all_hold = true;
  for (const auto& f : sample_catalogue()) {
    for (const auto& [t0, t1] : intervals) {
      const auto s = staffans_check(kernel, constants, f.y, t0, t1, lc.quad_n);
      all_hold = all_hold && s.holds;
      rows.push_back({{"function", f.name},
                      {"t0", t0},
                      {"t1", t1},
                      {"lhs", s.lhs},
                      {"rhs", s.rhs},
                      {"lhs_error", s.lhs_error},
                      {"rhs_error", s.rhs_error},
                      {"holds", s.holds}});
      csv.row_cells({f.name, format_double(t0), format_double(t1), format_double(s.lhs), format_double(s.rhs),
                     format_double(s.lhs_error), format_double(s.rhs_error), s.holds ? "true" : "false"});
    }
  }
  report["checks"] = rows;
  report["all_hold"] = all_hold;
  if (options.write) write_text(dir / "lemma.csv", csv.str());
  return finish(all_hold ? kExitOk : kExitVerdictFailure, all_hold ? "ok" : "verdict_failure");
}

CommandResult cmd_sweep(const RunConfig& cfg, const CommandOptions& options) {
  if (!cfg.sweep) throw Error(ErrorCode::InvalidArgument, "config has no sweep block");
  const auto& sw = *cfg.sweep;
  const auto dir = output_dir(cfg, options);
  RunConfig base = cfg;
  base.sweep.reset();

  struct Point {
    double value = 0.0;
    int exit_code = kExitOk;
    std::string status;
    json row;
  };
  std::vector<Point> points(sw.values.size());
  std::atomic<std::size_t> next{0};

  auto work = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      Point& p = points[i];
      p.value = sw.values[i];
      char name[32];
      std::snprintf(name, sizeof name, "point_%03zu", i);
      try {
        RunConfig pc = with_parameter(base, sw.parameter, p.value);
        pc.output.directory = (dir / name).string();
        CommandOptions po = options;
        po.out = dir / name;
        const auto res = cmd_run(pc, po);
        p.exit_code = res.exit_code;
        p.status = res.report.value("status", "");
        p.row = res.report;
      } catch (const Error& e) {
        p.exit_code = kExitUsage;
        p.status = "error: " + e.message();
      }
    }
  };
  const std::size_t jobs = std::max<std::size_t>(1, std::min(options.jobs.value_or(sw.jobs), points.size()));
  {
    std::vector<std::jthread> pool;
    for (std::size_t j = 0; j + 1 < jobs; ++j) pool.emplace_back(work);
    work();
  }

  CsvWriter csv({"value", "alpha0", "B", "r_squared", "monotone", "status"});
  json summary = json::array();
  int code = kExitOk;
  for (const auto& p : points) {
    std::string a0, b, r2, mono;
    if (p.row.contains("alpha0")) a0 = format_double(p.row["alpha0"]["alpha0"].get<double>());
    const char* run = cfg.backend == Backend::Direct ? "direct" : "memory";
    if (p.row.contains("runs") && p.row["runs"].contains(run)) {
      const auto& rr = p.row["runs"][run];
      const auto& fit = rr[cfg.backend == Backend::Direct ? "decay_fit" : "decay_fit_total"];
      if (fit.contains("b") && fit["b"].is_number()) b = format_double(fit["b"].get<double>());
      if (fit.contains("r_squared")) r2 = format_double(fit["r_squared"].get<double>());
      const auto& m = rr[cfg.backend == Backend::Direct ? "monotone" : "monotone_total"];
      mono = m["holds"].get<bool>() ? "holds" : "fails";
    }
    csv.row_cells({format_double(p.value), a0, b, r2, mono, p.status});
    summary.push_back({{"value", p.value}, {"exit_code", p.exit_code}, {"status", p.status}});
    if (p.exit_code != kExitOk) code = kExitVerdictFailure;
  }

  CommandResult r;
  r.report = report_header("sweep", cfg);
  r.report["points"] = summary;
  r.report["jobs"] = jobs;
  r.report["status"] = code == kExitOk ? "ok" : "point_failures";
  r.exit_code = code;
  if (options.write) {
    write_text(dir / "summary.csv", csv.str());
    write_text(dir / "report.json", r.report.dump(2) + "\n");
  }
  return r;
}

}  // namespace nltracer
