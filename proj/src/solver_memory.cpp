#include "nltracer/solver_memory.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "nltracer/diagnostics.hpp"
#include "nltracer/error.hpp"
#include "nltracer/solver_direct.hpp"

namespace nltracer {

std::vector<double> history_weights(const Kernel& kernel, const SGrid& sgrid) {
  std::vector<double> mu(sgrid.size());
  for (std::size_t j = 0; j < mu.size(); ++j) {
    mu[j] = -kernel.eval(sgrid.s(j), 2);
    if (mu[j] < 0.0) {
      std::ostringstream os;
      os << "history weight -k''(s) = " << mu[j] << " < 0 at s = " << sgrid.s(j);
      throw Error(ErrorCode::NegativeWeight, os.str());
    }
  }
  return mu;
}

std::vector<double> init_eta(const Prehistory& prehistory, const Grid1D& grid, const SGrid& sgrid) {
  const std::size_t cols = sgrid.size();
  std::vector<double> eta(grid.size() * cols, 0.0);
  if (is_zero(prehistory)) return eta;
  if (prehistory_depth(prehistory) < sgrid.s_max() * (1.0 - 1e-12)) {
    std::ostringstream os;
    os << "prehistory depth " << prehistory_depth(prehistory) << " < s_max " << sgrid.s_max();
    throw Error(ErrorCode::InsufficientPrehistoryDepth, os.str());
  }
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (std::size_t j = 1; j < cols; ++j)
      eta[i * cols + j] = prehistory_integral(prehistory, grid.x(i), sgrid.s(j));
  return eta;
}

void transport_eta(std::span<double> eta, std::size_t columns, std::span<const double> source, double dt,
                   double ds) {
  const double lambda = dt / ds;
  if (lambda > 1.0 + 1e-12) {
    std::ostringstream os;
    os << "history CFL dt/ds = " << lambda << " exceeds 1";
    throw Error(ErrorCode::CflViolation, os.str());
  }
  if (columns == 0 || eta.size() != source.size() * columns)
    throw Error(ErrorCode::InvalidArgument, "eta shape does not match the source");
  for (std::size_t i = 0; i < source.size(); ++i) {
    double* row = eta.data() + i * columns;
    const double f = dt * source[i];
    // Descending j keeps eta_{j-1} at the old level.
    for (std::size_t j = columns - 1; j >= 1; --j) row[j] = (1.0 - lambda) * row[j] + lambda * row[j - 1] + f;
    row[0] = 0.0;
  }
}

std::vector<double> eta_oracle(const HistoryBuffer& c_history, const Prehistory& prehistory, double t,
                               const Grid1D& grid, const SGrid& sgrid) {
  if (c_history.empty()) throw Error(ErrorCode::InsufficientHistory, "empty history");
  if (c_history.width() != grid.size())
    throw Error(ErrorCode::InvalidArgument, "history width does not match the grid");
  const double dt = c_history.dt();
  if (t < 0.0 || t > c_history.latest_time() + 1e-9 * dt) {
    std::ostringstream os;
    os << "history ends at t = " << c_history.latest_time() << ", requested t = " << t;
    throw Error(ErrorCode::InsufficientHistory, os.str());
  }
  const std::size_t m_end = step_count(t, dt);
  const std::size_t cols = sgrid.size();
  std::vector<double> eta(grid.size() * cols, 0.0);
  std::vector<double> cum(m_end + 1);
  std::vector<double> c(m_end + 1);

  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t m = 0; m <= m_end; ++m) c[m] = c_history.snapshot(m)[i];
    cum[0] = 0.0;
    for (std::size_t m = 1; m <= m_end; ++m) cum[m] = cum[m - 1] + 0.5 * dt * (c[m - 1] + c[m]);

    // Integral of the piecewise-linear interpolant over [0, tau].
    auto cumulative = [&](double tau) {
      if (tau <= 0.0) return 0.0;
      auto m = static_cast<std::size_t>(std::floor(tau / dt));
      if (m >= m_end) return cum[m_end];
      const double r = tau - static_cast<double>(m) * dt;
      return cum[m] + r * c[m] + 0.5 * r * r * (c[m + 1] - c[m]) / dt;
    };

    const double total = cum[m_end];
    for (std::size_t j = 1; j < cols; ++j) {
      const double lower = t - sgrid.s(j);
      double v = total - cumulative(lower);
      if (lower < 0.0) v += prehistory_integral(prehistory, grid.x(i), -lower);
      eta[i * cols + j] = v;
    }
  }
  return eta;
}

SGrid default_sgrid(const Kernel& kernel, double dt, double tail_tol) {
  const double s_max = weight_truncation_depth(kernel, tail_tol);
  const auto n_s = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(s_max / dt)));
  return SGrid(s_max, n_s);
}

MemoryStepper::MemoryStepper(const ProblemSpec& spec, const Grid1D& grid, const SGrid& sgrid, double dt)
    : spec_(spec), grid_(grid), sgrid_(sgrid), op_(spec, grid, dt) {
  if (dt > sgrid.ds() * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "history CFL: dt = " << dt << " exceeds ds = " << sgrid.ds();
    throw Error(ErrorCode::CflViolation, os.str());
  }
  mu_ = history_weights(spec.kernel, sgrid);
  const auto w = sgrid.trapezoid_weights();
  weighted_mu_.resize(mu_.size());
  for (std::size_t j = 0; j < mu_.size(); ++j) weighted_mu_[j] = w[j] * mu_[j];
}

MemoryState MemoryStepper::initial_state() const {
  MemoryState s;
  s.c = initial_field(spec_, grid_);
  s.eta = init_eta(spec_.prehistory, grid_, sgrid_);
  s.mu = mu_;
  s.columns = sgrid_.size();
  return s;
}

void MemoryStepper::coupling(const MemoryState& state, std::span<double> out) const {
  const std::size_t cols = state.columns;
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    const double* row = state.eta.data() + i * cols;
    double acc = 0.0;
    for (std::size_t j = 0; j < cols; ++j) acc += weighted_mu_[j] * row[j];
    out[i] = acc;
  }
}

void MemoryStepper::advance(MemoryState& state) const {
  if (state.columns != sgrid_.size() || state.eta.size() != grid_.size() * sgrid_.size())
    throw Error(ErrorCode::InvalidArgument, "memory state shape does not match the grids");
  transport_eta(state.eta, state.columns, state.c.values, op_.dt(), sgrid_.ds());
  std::vector<double> m(grid_.size());
  coupling(state, m);
  std::vector<double> next(grid_.size());
  op_.advance(state.c.values, m, next);
  state.c.values = std::move(next);
  state.c.step += 1;
  state.c.t = static_cast<double>(state.c.step) * op_.dt();
  require_finite(state.c, "memory step");
}

MemoryState MemoryStepper::step(const MemoryState& state) const {
  MemoryState next = state;
  advance(next);
  return next;
}

std::vector<std::pair<double, double>> eta_slices(const MemoryState& state, const Grid1D& grid,
                                                  const SGrid& sgrid) {
  std::vector<std::pair<double, double>> out(state.columns);
  for (std::size_t j = 0; j < state.columns; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double v = state.eta[i * state.columns + j];
      acc += v * v;
    }
    out[j] = {sgrid.s(j), acc * grid.dx()};
  }
  return out;
}

double eta_tail_term(const MemoryState& state, const Grid1D& grid) {
  if (state.columns == 0) return 0.0;
  const std::size_t j = state.columns - 1;
  double acc = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = state.eta[i * state.columns + j];
    acc += v * v;
  }
  return state.mu[j] * acc * grid.dx();
}

MemoryRun run_memory(const ProblemSpec& spec, const Grid1D& grid, const SGrid& sgrid, double dt,
                     const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const std::size_t steps = step_count(spec.t_final, dt);
  const std::size_t stride = options.stride == 0 ? 1 : options.stride;
  if (steps % stride != 0)
    throw Error(ErrorCode::InvalidArgument, "trace stride must divide the number of steps");

  MemoryStepper stepper(spec, grid, sgrid, dt);
  MemoryRun run;
  MemoryState state = stepper.initial_state();

  auto observe = [&](const MemoryState& s) {
    run.trace.rows.push_back(
        EnergySample{s.c.t, l2_norm_sq(s.c, grid), eta_norm_sq_mu(s, grid, sgrid)});
    run.max_tail_term = std::max(run.max_tail_term, eta_tail_term(s, grid));
    Observation obs{s.c.step, s.c.t, s.c.values, s.eta, s.columns};
    for (const auto& o : options.observers) o(obs);
  };
  observe(state);

  for (std::size_t n = 0; n < steps; ++n) {
    try {
      stepper.advance(state);
    } catch (const Error& e) {
      std::ostringstream os;
      os << "step " << n + 1 << ": " << e.message();
      throw Error(e.code(), os.str());
    }
    if (state.c.step % stride == 0) observe(state);
  }
  run.final_state = std::move(state);
  run.steps = steps;
  run.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return run;
}

}  // namespace nltracer
