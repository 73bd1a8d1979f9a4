#include "nltracer/solver_direct.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "nltracer/diagnostics.hpp"
#include "nltracer/error.hpp"

namespace nltracer {

FieldState initial_field(const ProblemSpec& spec, const Grid1D& grid) {
  FieldState s;
  s.values.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) s.values[i] = spec.initial_condition(grid.x(i));
  require_finite(s, "initial condition");
  return s;
}

std::size_t step_count(double t_final, double dt) {
  if (!(dt > 0.0) || t_final < 0.0) throw Error(ErrorCode::InvalidArgument, "need dt > 0 and t_final >= 0");
  const double ratio = t_final / dt;
  const double n = std::round(ratio);
  if (std::abs(ratio - n) > 1e-9 * std::max(1.0, ratio)) {
    std::ostringstream os;
    os << "t_final = " << t_final << " is not a multiple of dt = " << dt;
    throw Error(ErrorCode::InvalidArgument, os.str());
  }
  return static_cast<std::size_t>(n);
}

DirectStepper::DirectStepper(const ProblemSpec& spec, const Grid1D& grid, double dt)
    : kernel_(spec.kernel), grid_(grid), op_(spec, grid, dt), memory_(grid.size(), 0.0) {}

double DirectStepper::kernel_slope(std::size_t lag) {
  while (slope_table_.size() <= lag)
    slope_table_.push_back(kernel_.eval(static_cast<double>(slope_table_.size()) * op_.dt(), 1));
  return slope_table_[lag];
}

void DirectStepper::memory_term(const HistoryBuffer& history, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  if (history.size() < 2) return;  // zero-length interval
  const std::size_t n = history.size() - 1;
  const double dt = op_.dt();
  kernel_slope(n);
  for (std::size_t j = 0; j <= n; ++j) {
    const double w = (j == 0 || j == n) ? 0.5 * dt : dt;
    const double coeff = w * slope_table_[n - j];
    const auto snap = history.snapshot(j);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += coeff * snap[i];
  }
}

FieldState DirectStepper::step(const FieldState& state, HistoryBuffer& history) {
  if (history.size() != state.step + 1)
    throw Error(ErrorCode::InvalidArgument, "history does not match the state's step index");
  memory_term(history, memory_);
  FieldState next;
  next.values.resize(state.values.size());
  op_.advance(state.values, memory_, next.values);
  next.step = state.step + 1;
  next.t = static_cast<double>(next.step) * op_.dt();
  require_finite(next, "direct step");
  history.append(next);
  return next;
}

DirectRun run_direct(const ProblemSpec& spec, const Grid1D& grid, double dt, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const std::size_t steps = step_count(spec.t_final, dt);
  const std::size_t stride = options.stride == 0 ? 1 : options.stride;
  if (steps % stride != 0)
    throw Error(ErrorCode::InvalidArgument, "trace stride must divide the number of steps");

  DirectStepper stepper(spec, grid, dt);
  HistoryBuffer history(grid.size(), dt);
  history.reserve(steps + 1);

  DirectRun run;
  FieldState state = initial_field(spec, grid);
  history.append(state);

  auto observe = [&](const FieldState& s) {
    run.trace.rows.push_back(EnergySample{s.t, l2_norm_sq(s, grid), std::nullopt});
    Observation obs{s.step, s.t, s.values, {}, 0};
    for (const auto& o : options.observers) o(obs);
  };
  observe(state);

  for (std::size_t n = 0; n < steps; ++n) {
    try {
      state = stepper.step(state, history);
    } catch (const Error& e) {
      std::ostringstream os;
      os << "step " << n + 1 << ": " << e.message();
      throw Error(e.code(), os.str());
    }
    if (state.step % stride == 0) observe(state);
  }
  run.final_state = std::move(state);
  run.steps = steps;
  run.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return run;
}

}  // namespace nltracer
