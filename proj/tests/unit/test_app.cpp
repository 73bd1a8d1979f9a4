#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "nltracer/app.hpp"
#include "nltracer/error.hpp"

using namespace nltracer;

namespace {

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / "nltracer_app_test" / name;
  std::filesystem::remove_all(p);
  return p;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig small_config() {
  RunConfig cfg;
  cfg.problem.velocity = VelocityField(TanhShear{0.2, 1.0, 0.0});
  cfg.problem.t_final = 2.0;
  cfg.numerics.n_x = 100;
  cfg.numerics.dt = 0.01;
  return cfg;
}

}  // namespace

TEST_CASE("check on an admissible config") {
  auto cfg = small_config();
  cfg.theorem = Theorem::Theorem1;
  const auto r = cmd_check(cfg, {});
  CHECK(r.exit_code == 0);
  CHECK(r.report["alpha0"]["alpha0"].get<double>() == doctest::Approx(0.4));
  CHECK(r.report["schema_version"] == kReportSchemaVersion);
}

TEST_CASE("check flags C2 for a decaying kernel under Theorem 2") {
  auto cfg = small_config();
  cfg.problem.kernel = Kernel::exponential_decay(1.0, 1.0);
  cfg.theorem = Theorem::Theorem2;
  cfg.backend = Backend::Memory;
  const auto r = cmd_check(cfg, {});
  CHECK(r.exit_code != 0);
  bool c2 = false;
  for (const auto& f : r.report["validation"]["findings"])
    if (f["code"] == "condition.C2" && f["severity"] == "error") c2 = true;
  CHECK(c2);
}

TEST_CASE("check reports numerics problems") {
  auto cfg = small_config();
  cfg.numerics.dt = 0.03;  // 2.0 is not a multiple
  CHECK(cmd_check(cfg, {}).exit_code == kExitVerdictFailure);
  cfg = small_config();
  cfg.backend = Backend::Memory;
  cfg.numerics.n_s = 10000;  // ds < dt
  cfg.numerics.s_max = 10.0;
  CHECK(cmd_check(cfg, {}).exit_code == kExitVerdictFailure);
}

TEST_CASE("run writes the artifact layout and is deterministic") {
  auto cfg = small_config();
  cfg.theorem = Theorem::Theorem1;
  cfg.output.snapshot_times = {0.0, 1.0};
  const auto a = scratch("run_a");
  const auto b = scratch("run_b");
  CommandOptions oa;
  oa.out = a;
  CommandOptions ob;
  ob.out = b;
  const auto ra = cmd_run(cfg, oa);
  cmd_run(cfg, ob);
  CHECK(std::filesystem::exists(a / "config.json"));
  CHECK(std::filesystem::exists(a / "report.json"));
  CHECK(std::filesystem::exists(a / "snapshots" / "direct_c_00000100.csv"));
  const auto trace = slurp(a / "trace.csv");
  CHECK(trace.rfind("t,c_norm_sq,eta_norm_sq_mu,total\n", 0) == 0);
  CHECK(trace == slurp(b / "trace.csv"));
  CHECK(ra.report["runs"]["direct"]["monotone"]["holds"] == true);
  CHECK(ra.report["runs"]["direct"]["decay_fit"]["b"].get<double>() > 0.0);
  CHECK(parse_config(slurp(a / "config.json")) == cfg);
}

TEST_CASE("zero initial condition is handled as the all-zero case") {
  auto cfg = small_config();
  cfg.problem.initial_condition = Profile(BoxPulse{0.0, 0.0, 1.0});
  CommandOptions o;
  o.write = false;
  const auto r = cmd_run(cfg, o);
  CHECK(r.exit_code == 0);
  const auto& fit = r.report["runs"]["direct"]["decay_fit"];
  CHECK(fit["status"] == "all_zero");
  CHECK(fit["non_decaying"] == true);
}

TEST_CASE("backend both reports the cross-validation") {
  auto cfg = small_config();
  cfg.problem.t_final = 0.5;
  cfg.backend = Backend::Both;
  cfg.numerics.s_max = 12.0;
  cfg.numerics.n_s = 1200;
  CommandOptions o;
  o.write = false;
  const auto r = cmd_run(cfg, o);
  REQUIRE(r.report.contains("cross_validation"));
  CHECK(r.report["cross_validation"]["max_rel_diff"].get<double>() < 0.05);
}

TEST_CASE("solver failure maps to exit 3") {
  auto cfg = small_config();
  cfg.problem.kernel = Kernel::tabulated({0.0, 0.1, 0.2, 0.3, 0.4, 0.5}, {1.0, 1.1, 1.2, 1.3, 1.4, 1.5});
  CommandOptions o;
  o.write = false;
  o.force = true;
  const auto r = cmd_run(cfg, o);
  CHECK(r.exit_code == kExitSolverFailure);
  CHECK(r.report["error"]["code"] == "OutOfRange");
}

TEST_CASE("lemma command") {
  RunConfig cfg;
  cfg.problem.kernel = Kernel::exponential_decay(1.0, 1.0);
  cfg.lemma = LemmaConfig{0.5, 1.0, 400, {{0.0, 10.0}}};
  CommandOptions o;
  o.write = false;
  const auto r = cmd_lemma(cfg, o);
  CHECK(r.exit_code == 0);
  CHECK(r.report["constants"]["bound_factor"].get<double>() == doctest::Approx(2.5));

  cfg.problem.kernel = Kernel::saturating_exponential(1.0, 0.5, 2.0);
  const auto na = cmd_lemma(cfg, o);
  CHECK(na.exit_code != 0);
  CHECK(na.report["status"] == "not_applicable");
}

TEST_CASE("sweep over u_max") {
  auto cfg = small_config();
  cfg.sweep = SweepConfig{"problem.velocity.u_max", {0.0, 0.2, 0.6}, 1};
  const auto d1 = scratch("sweep1");
  const auto d4 = scratch("sweep4");
  CommandOptions o1;
  o1.out = d1;
  o1.jobs = 1;
  CommandOptions o4;
  o4.out = d4;
  o4.jobs = 4;
  const auto r = cmd_sweep(cfg, o1);
  cmd_sweep(cfg, o4);
  CHECK(r.exit_code == 0);
  const auto summary = slurp(d1 / "summary.csv");
  CHECK(summary == slurp(d4 / "summary.csv"));
  std::istringstream in(summary);
  std::string line;
  std::getline(in, line);
  CHECK(line == "value,alpha0,B,r_squared,monotone,status");
  std::vector<std::string> alpha;
  while (std::getline(in, line)) {
    const auto a = line.find(',');
    alpha.push_back(line.substr(a + 1, line.find(',', a + 1) - a - 1));
  }
  CHECK(std::stod(alpha.at(0)) == doctest::Approx(0.5));
  CHECK(std::stod(alpha.at(1)) == doctest::Approx(0.4));
  CHECK(std::stod(alpha.at(2)) == doctest::Approx(0.2));

  // A single-point sweep reproduces cmd_run.
  auto single = cfg;
  single.sweep = SweepConfig{"problem.velocity.u_max", {0.2}, 1};
  const auto ds = scratch("sweep_single");
  CommandOptions os;
  os.out = ds;
  cmd_sweep(single, os);
  const auto dr = scratch("sweep_run");
  CommandOptions orun;
  orun.out = dr;
  auto plain = cfg;
  plain.sweep.reset();
  cmd_run(plain, orun);
  CHECK(slurp(ds / "point_000" / "trace.csv") == slurp(dr / "trace.csv"));
}

TEST_CASE("sweep point failures are recorded and the sweep continues") {
  auto cfg = small_config();
  cfg.sweep = SweepConfig{"problem.velocity.u_max", {0.2, 100.0}, 2};
  CommandOptions o;
  o.out = scratch("sweep_fail");
  const auto r = cmd_sweep(cfg, o);
  CHECK(r.exit_code == kExitVerdictFailure);
  CHECK(r.report["points"][0]["status"] == "ok");
  CHECK(r.report["points"][1]["status"] != "ok");
}

TEST_CASE("sweep without a sweep block is a usage error") {
  CHECK_THROWS_AS(cmd_sweep(small_config(), {}), Error);
}
