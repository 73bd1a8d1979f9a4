#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nltracer/diagnostics.hpp"
#include "nltracer/error.hpp"
#include "nltracer/solver_direct.hpp"

using namespace nltracer;

namespace {

ProblemSpec heat_spec() {
  ProblemSpec s;
  s.kernel = Kernel::exponential_decay(0.0, 1.0);
  s.velocity = VelocityField(ConstantVelocity{0.0});
  s.diffusivity = 0.1;
  s.t_final = 1.0;
  return s;
}

double rel_l2(std::span<const double> a, std::span<const double> b, const Grid1D& g) {
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return std::sqrt(l2_norm_sq(d, g) / l2_norm_sq(b, g));
}

}  // namespace

TEST_CASE("grid geometry") {
  const Grid1D g(20.0, 799);
  CHECK(g.dx() == doctest::Approx(0.05));
  CHECK(g.x(0) == doctest::Approx(-19.95));
  CHECK(g.x(798) == doctest::Approx(19.95));
  const SGrid s(2.0, 4);
  CHECK(s.size() == 5);
  const auto w = s.trapezoid_weights();
  CHECK(w.front() == doctest::Approx(0.25));
  CHECK(w[2] == doctest::Approx(0.5));
}

TEST_CASE("zero is a fixed point") {
  ProblemSpec spec;
  spec.velocity = VelocityField(TanhShear{0.2, 1.0, 0.0});
  spec.initial_condition = Profile(BoxPulse{0.0, 0.0, 1.0});
  spec.t_final = 0.5;
  const auto run = run_direct(spec, Grid1D(20.0, 100), 0.05);
  for (double v : run.final_state.values) CHECK(v == 0.0);
}

TEST_CASE("first step of pure damping is implicit Euler") {
  ProblemSpec spec;
  spec.diffusivity = 0.0;
  spec.velocity = VelocityField(ConstantVelocity{0.0});
  spec.kernel = Kernel::saturating_exponential(1.0, 0.5, 2.0);  // kappa = k(0) = 0.5
  const Grid1D grid(20.0, 50);
  const double dt = 0.1;
  DirectStepper stepper(spec, grid, dt);
  HistoryBuffer history(grid.size(), dt);
  const auto c0 = initial_field(spec, grid);
  history.append(c0);
  const auto c1 = stepper.step(c0, history);
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(c1.values[i] == doctest::Approx(c0.values[i] / 1.05).epsilon(1e-14));
  CHECK(history.size() == 2);
  CHECK(c1.t == doctest::Approx(0.1));
}

TEST_CASE("heat-equation reduction matches the spreading Gaussian") {
  const auto spec = heat_spec();
  const Grid1D grid(20.0, 800);
  const auto run = run_direct(spec, grid, 1e-3);
  const double var = 1.0 + 2.0 * 0.1 * 1.0;
  std::vector<double> exact(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    exact[i] = std::exp(-grid.x(i) * grid.x(i) / (2 * var)) / std::sqrt(var);
  CHECK(rel_l2(run.final_state.values, exact, grid) < 0.01);
}

TEST_CASE("k = 0 and U = 0 obey the discrete maximum principle") {
  auto spec = heat_spec();
  spec.initial_condition = Profile(BoxPulse{1.0, 0.0, 4.0});
  const Grid1D grid(10.0, 200);
  const auto run = run_direct(spec, grid, 1e-2);
  const auto [lo, hi] = std::minmax_element(run.final_state.values.begin(), run.final_state.values.end());
  CHECK(*lo >= 0.0);
  CHECK(*hi <= 1.0);
}

TEST_CASE("zero final time gives a single trace entry") {
  ProblemSpec spec;
  spec.t_final = 0.0;
  const Grid1D grid(20.0, 200);
  const auto run = run_direct(spec, grid, 1e-2);
  REQUIRE(run.trace.size() == 1);
  CHECK(run.trace.rows[0].c_norm_sq == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-6));
}

TEST_CASE("advective CFL is enforced") {
  ProblemSpec spec;
  spec.velocity = VelocityField(ConstantVelocity{10.0});
  const Grid1D grid(20.0, 400);
  CHECK_THROWS_AS(DirectStepper(spec, grid, 0.1), Error);
  try {
    DirectStepper(spec, grid, 0.1);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CflViolation);
  }
}

TEST_CASE("scheme is linear") {
  ProblemSpec a;
  a.velocity = VelocityField(TanhShear{0.2, 1.0, 0.0});
  a.t_final = 0.5;
  ProblemSpec b = a;
  b.initial_condition = Profile(BoxPulse{1.0, 1.0, 2.0});
  const Grid1D grid(20.0, 100);
  const auto ra = run_direct(a, grid, 0.05);
  const auto rb = run_direct(b, grid, 0.05);
  DirectStepper step(a, grid, 0.05);
  FieldState mix;
  mix.values.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    mix.values[i] = 2.0 * initial_field(a, grid).values[i] - 3.0 * initial_field(b, grid).values[i];
  HistoryBuffer h(grid.size(), 0.05);
  h.append(mix);
  for (int n = 0; n < 10; ++n) mix = step.step(mix, h);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double expect = 2.0 * ra.final_state.values[i] - 3.0 * rb.final_state.values[i];
    CHECK(mix.values[i] == doctest::Approx(expect).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("admissible spec gives a nonincreasing norm") {
  ProblemSpec spec;
  spec.velocity = VelocityField(TanhShear{0.2, 1.0, 0.0});
  spec.t_final = 5.0;
  const auto run = run_direct(spec, Grid1D(20.0, 200), 1e-2);
  CHECK(check_monotone(run.trace).holds);
}

TEST_CASE("first-order self-convergence in dt") {
  ProblemSpec spec;
  spec.velocity = VelocityField(TanhShear{0.2, 1.0, 0.0});
  spec.t_final = 1.0;
  const Grid1D grid(20.0, 100);
  const auto c1 = run_direct(spec, grid, 0.02).final_state.values;
  const auto c2 = run_direct(spec, grid, 0.01).final_state.values;
  const auto c4 = run_direct(spec, grid, 0.005).final_state.values;
  std::vector<double> d12(grid.size()), d24(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    d12[i] = c1[i] - c2[i];
    d24[i] = c2[i] - c4[i];
  }
  const double ratio = std::sqrt(l2_norm_sq(d12, grid) / l2_norm_sq(d24, grid));
  CHECK(ratio == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("runs are deterministic and observers see every stride") {
  ProblemSpec spec;
  spec.velocity = VelocityField(TanhShear{0.2, 1.0, 0.0});
  spec.t_final = 1.0;
  const Grid1D grid(20.0, 100);
  std::vector<std::size_t> seen;
  RunOptions o{5, {[&](const Observation& ob) { seen.push_back(ob.step); }}};
  const auto a = run_direct(spec, grid, 0.01, o);
  const auto b = run_direct(spec, grid, 0.01, o);
  CHECK(a.final_state.values == b.final_state.values);
  CHECK(a.trace.size() == 21);
  CHECK(seen.front() == 0);
  CHECK(seen[1] == 5);
}

TEST_CASE("errors during a run carry the step index") {
  ProblemSpec spec;
  spec.kernel = Kernel::tabulated({0.0, 0.1, 0.2, 0.3, 0.4, 0.5}, {1.0, 1.1, 1.2, 1.3, 1.4, 1.5});
  spec.t_final = 1.0;
  try {
    run_direct(spec, Grid1D(20.0, 50), 0.1);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OutOfRange);
    CHECK(e.message().rfind("step 7:", 0) == 0);
  }
  CHECK_THROWS_AS(step_count(1.0, 0.3), Error);
}
