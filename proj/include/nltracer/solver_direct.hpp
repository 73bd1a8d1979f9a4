#pragma once

#include <span>
#include <vector>

#include "nltracer/grid.hpp"
#include "nltracer/imex.hpp"
#include "nltracer/model.hpp"
#include "nltracer/trace.hpp"

namespace nltracer {

/// Samples the initial condition on the interior nodes at t = 0.
FieldState initial_field(const ProblemSpec& spec, const Grid1D& grid);

/// Time stepper for C_t + U C_x = D C_xx - k(0) C - int_0^t k'(t - s) C(s) ds.
///
/// The convolution is a composite trapezoid over every stored snapshot,
/// evaluated explicitly at level n, so a step costs O(n n_x) and a run of N
/// steps O(N^2 n_x).
class DirectStepper {
 public:
  DirectStepper(const ProblemSpec& spec, const Grid1D& grid, double dt);

  /// Advances `state` by one step and appends the result to `history`.
  /// `history` must end with `state` (size == state.step + 1).
  FieldState step(const FieldState& state, HistoryBuffer& history);

  /// M_i = sum_j w_j k'(t^n - s_j) C_i(s_j) over the whole history.
  void memory_term(const HistoryBuffer& history, std::span<double> out);

  double dt() const noexcept { return op_.dt(); }
  const Grid1D& grid() const noexcept { return grid_; }

 private:
  double kernel_slope(std::size_t lag);

  Kernel kernel_;
  Grid1D grid_;
  ImexOperator op_;
  std::vector<double> slope_table_;  // k'(m dt), grown on demand
  std::vector<double> memory_;
};

struct DirectRun {
  EnergyTrace trace;
  FieldState final_state;
  std::size_t steps = 0;
  double wall_seconds = 0.0;
};

/// Number of uniform steps reaching t_final; throws InvalidArgument when
/// t_final is not a multiple of dt.
std::size_t step_count(double t_final, double dt);

DirectRun run_direct(const ProblemSpec& spec, const Grid1D& grid, double dt, const RunOptions& options = {});

}  // namespace nltracer
