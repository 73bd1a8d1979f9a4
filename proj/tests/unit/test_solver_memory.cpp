#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "nltracer/diagnostics.hpp"
#include "nltracer/error.hpp"
#include "nltracer/solver_direct.hpp"
#include "nltracer/solver_memory.hpp"

using namespace nltracer;

namespace {

ProblemSpec admissible() {
  ProblemSpec s;
  s.velocity = VelocityField(TanhShear{0.2, 1.0, 0.0});
  return s;
}

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an nltracer::Error");
  return ErrorCode::InvalidArgument;
}

// Max error of the transported eta against e^{-t}(e^s - 1) at t = 1, scaled by max |exact|.
double manufactured_error(double ds, double dt) {
  const double s_max = 1.0;
  const SGrid sg(s_max, static_cast<std::size_t>(std::llround(s_max / ds)));
  std::vector<double> eta(sg.size());
  for (std::size_t j = 0; j < sg.size(); ++j) eta[j] = std::exp(sg.s(j)) - 1.0;
  const auto steps = static_cast<std::size_t>(std::llround(1.0 / dt));
  for (std::size_t n = 0; n < steps; ++n) {
    const std::vector<double> src{std::exp(-static_cast<double>(n) * dt)};
    transport_eta(eta, sg.size(), src, dt, sg.ds());
  }
  double err = 0.0, scale = 0.0;
  for (std::size_t j = 0; j < sg.size(); ++j) {
    const double exact = std::exp(-1.0) * (std::exp(sg.s(j)) - 1.0);
    err = std::max(err, std::abs(eta[j] - exact));
    scale = std::max(scale, std::abs(exact));
  }
  return err / scale;
}

}  // namespace

TEST_CASE("init_eta") {
  const Grid1D grid(5.0, 20);
  const SGrid sg(4.0, 8);
  SUBCASE("zero prehistory") {
    for (double v : init_eta(ZeroPrehistory{}, grid, sg)) CHECK(v == 0.0);
  }
  SUBCASE("constant-in-time prehistory integrates exactly") {
    const ConstantInTime p{Profile(GaussianPulse{1.0, 0.0, std::sqrt(0.5)}), 4.0};
    const auto eta = init_eta(p, grid, sg);
    for (std::size_t i = 0; i < grid.size(); ++i)
      for (std::size_t j = 0; j < sg.size(); ++j) {
        const double g = std::exp(-grid.x(i) * grid.x(i));
        CHECK(eta[i * sg.size() + j] == doctest::Approx(g * sg.s(j)).epsilon(1e-14));
      }
    // Spot value at s = 2.
    CHECK(eta[10 * sg.size() + 4] == doctest::Approx(2.0 * std::exp(-grid.x(10) * grid.x(10))));
  }
  SUBCASE("short tabulated prehistory") {
    TabulatedInTime tab;
    tab.tau = {-1.0, 0.0};
    tab.x = {-5.0, 5.0};
    tab.values = {1.0, 1.0, 1.0, 1.0};
    CHECK(code_of([&] { init_eta(tab, grid, sg); }) == ErrorCode::InsufficientPrehistoryDepth);
  }
}

TEST_CASE("history weights require k'' <= 0") {
  const SGrid sg(5.0, 50);
  const auto mu = history_weights(Kernel::saturating_exponential(1.0, 0.5, 2.0), sg);
  CHECK(mu[0] == doctest::Approx(2.0));
  CHECK(mu.back() == doctest::Approx(2.0 * std::exp(-10.0)));
  CHECK(code_of([&] { history_weights(Kernel::exponential_decay(1.0, 1.0), sg); }) == ErrorCode::NegativeWeight);
}

TEST_CASE("transport keeps the inflow node at zero and enforces dt <= ds") {
  std::vector<double> eta(3 * 11, 0.5);
  const std::vector<double> src{1.0, 2.0, 3.0};
  transport_eta(eta, 11, src, 0.05, 0.1);
  for (std::size_t i = 0; i < 3; ++i) CHECK(eta[i * 11] == 0.0);
  CHECK(code_of([&] { transport_eta(eta, 11, src, 0.2, 0.1); }) == ErrorCode::CflViolation);
  CHECK(code_of([&] { transport_eta(eta, 10, src, 0.05, 0.1); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("manufactured e^{-t} transport converges at first order") {
  const double e1 = manufactured_error(0.02, 0.01);
  const double e2 = manufactured_error(0.01, 0.005);
  const double e3 = manufactured_error(0.005, 0.0025);
  CHECK(e1 <= 3.0 * (0.02 + 0.01));
  CHECK(std::log2(e1 / e2) >= 0.9);
  CHECK(std::log2(e2 / e3) >= 0.9);
}

TEST_CASE("eta_oracle examples") {
  const Grid1D grid(1.0, 1);
  SUBCASE("t = 0 with zero prehistory") {
    HistoryBuffer h(1, 0.1);
    h.append(FieldState{{3.0}, 0.0, 0});
    for (double v : eta_oracle(h, ZeroPrehistory{}, 0.0, grid, SGrid(1.0, 10))) CHECK(v == 0.0);
  }
  SUBCASE("constant history") {
    HistoryBuffer h(1, 0.1);
    for (std::size_t n = 0; n <= 20; ++n) h.append(FieldState{{1.5}, 0.1 * n, n});
    const SGrid sg(2.0, 8);
    const auto eta = eta_oracle(h, ZeroPrehistory{}, 2.0, grid, sg);
    for (std::size_t j = 0; j < sg.size(); ++j) CHECK(eta[j] == doctest::Approx(1.5 * sg.s(j)).epsilon(1e-13));
  }
  SUBCASE("e^{-tau} history at t = 1, s = 1") {
    const double dt = 1e-3;
    HistoryBuffer h(1, dt);
    for (std::size_t n = 0; n <= 1000; ++n) h.append(FieldState{{std::exp(-dt * n)}, dt * n, n});
    const auto eta = eta_oracle(h, ZeroPrehistory{}, 1.0, grid, SGrid(1.0, 4));
    CHECK(eta.back() == doctest::Approx(std::exp(-1.0) * (std::exp(1.0) - 1.0)).epsilon(1e-6));
    CHECK(eta.back() == doctest::Approx(0.6321).epsilon(1e-4));
  }
  SUBCASE("requests past the stored history fail") {
    HistoryBuffer h(1, 0.1);
    h.append(FieldState{{1.0}, 0.0, 0});
    CHECK(code_of([&] { eta_oracle(h, ZeroPrehistory{}, 0.5, grid, SGrid(1.0, 4)); }) ==
          ErrorCode::InsufficientHistory);
  }
}

TEST_CASE("memory stepper") {
  const Grid1D grid(20.0, 100);
  SUBCASE("zero state stays zero") {
    auto spec = admissible();
    spec.initial_condition = Profile(BoxPulse{0.0, 0.0, 1.0});
    spec.t_final = 0.5;
    const auto run = run_memory(spec, grid, SGrid(6.0, 300), 0.01);
    for (double v : run.final_state.c.values) CHECK(v == 0.0);
    for (double v : run.final_state.eta) CHECK(v == 0.0);
  }
  SUBCASE("dt > ds is rejected") {
    CHECK(code_of([&] { MemoryStepper(admissible(), grid, SGrid(6.0, 60), 0.2); }) == ErrorCode::CflViolation);
  }
  SUBCASE("transported eta tracks the quadrature oracle") {
    auto spec = admissible();
    spec.t_final = 2.0;
    const double dt = 0.005;
    const SGrid sg(4.0, 800);
    HistoryBuffer h(grid.size(), dt);
    MemoryStepper m(spec, grid, sg, dt);
    auto st = m.initial_state();
    h.append(st.c);
    for (int n = 0; n < 400; ++n) {
      m.advance(st);
      h.append(st.c);
      for (std::size_t i = 0; i < grid.size(); ++i) REQUIRE(st.eta[i * sg.size()] == 0.0);
    }
    const auto oracle = eta_oracle(h, spec.prehistory, 2.0, grid, sg);
    double err = 0.0, scale = 0.0;
    for (std::size_t k = 0; k < oracle.size(); ++k) {
      err = std::max(err, std::abs(st.eta[k] - oracle[k]));
      scale = std::max(scale, std::abs(oracle[k]));
    }
    CHECK(err / scale < 3.0 * (sg.ds() + dt) / sg.s_max() * 10.0);
  }
  SUBCASE("total energy is nonincreasing with a history source") {
    auto spec = admissible();
    spec.prehistory = ConstantInTime{Profile(), 12.0};
    spec.t_final = 3.0;
    const auto run = run_memory(spec, grid, SGrid(11.5, 1150), 0.01);
    CHECK(check_monotone(run.trace, 1e-6, TraceQuantity::Total).holds);
    CHECK(run.trace.has_eta());
  }
  SUBCASE("weight tail at the default cut is negligible") {
    auto spec = admissible();
    spec.t_final = 2.0;
    const auto sg = default_sgrid(spec.kernel, 0.01);
    CHECK(sg.ds() >= 0.01);
    const auto run = run_memory(spec, grid, sg, 0.01);
    // mu(s_max) = tail_tol mu(0), and ||eta(s_max)||^2 <= (t ||C0||)^2 since ||C|| decays.
    const double envelope = 1e-10 * 2.0 * 4.0 * run.trace.rows.front().c_norm_sq;
    CHECK(run.max_tail_term < envelope);
    CHECK(run.max_tail_term > 0.0);
  }
}
