#pragma once

#include <span>
#include <utility>
#include <vector>

#include "nltracer/grid.hpp"
#include "nltracer/imex.hpp"
#include "nltracer/model.hpp"
#include "nltracer/trace.hpp"

namespace nltracer {

/// Augmented state (C, eta). eta is x-major: eta[i * sgrid.size() + j] is
/// the integral of C(x_i, .) over [t - s_j, t].
struct MemoryState {
  FieldState c;
  std::vector<double> eta;
  std::vector<double> mu;  // -k''(s_j), nonnegative
  std::size_t columns = 0;  // sgrid.size()

  std::span<const double> eta_row(std::size_t i) const {
    return std::span<const double>(eta).subspan(i * columns, columns);
  }
};

/// mu_j = -k''(s_j); throws NegativeWeight when any entry is negative.
std::vector<double> history_weights(const Kernel& kernel, const SGrid& sgrid);

/// eta^0(x_i, s_j) = int_{-s_j}^0 C(x_i, tau) dtau from the prehistory.
std::vector<double> init_eta(const Prehistory& prehistory, const Grid1D& grid, const SGrid& sgrid);

/// Unit-speed upwind transport in s for one step, in place:
///   eta_j <- eta_j - (dt/ds)(eta_j - eta_{j-1}) + dt source_i,  eta_0 = 0.
/// `eta` holds source.size() rows of `columns` values. Throws CflViolation
/// when dt > ds.
void transport_eta(std::span<double> eta, std::size_t columns, std::span<const double> source, double dt,
                   double ds);

/// Direct trapezoid quadrature of eta^t(x_i, s_j) = int_{t-s_j}^t C(x_i, tau) dtau
/// from stored snapshots (piecewise-linear in time) plus the prehistory for
/// tau < 0. Independent of the transport update.
std::vector<double> eta_oracle(const HistoryBuffer& c_history, const Prehistory& prehistory, double t,
                               const Grid1D& grid, const SGrid& sgrid);

/// Default s-grid: s_max from the weight truncation depth, ds close to dt
/// but never below it.
SGrid default_sgrid(const Kernel& kernel, double dt, double tail_tol = 1e-10);

/// Stepper for the autonomous system
///   C_t + U C_x = D C_xx - k(0) C - int_0^smax mu(s) eta(s) ds,
///   eta_t = C - eta_s,  eta(., 0) = 0.
/// Each step transports eta with C^n as source, then updates C using the
/// new eta in the coupling. Cost per step is O(n_x n_s).
class MemoryStepper {
 public:
  MemoryStepper(const ProblemSpec& spec, const Grid1D& grid, const SGrid& sgrid, double dt);

  MemoryState initial_state() const;

  void advance(MemoryState& state) const;
  MemoryState step(const MemoryState& state) const;

  /// coupling_i = sum_j w_j mu_j eta(x_i, s_j).
  void coupling(const MemoryState& state, std::span<double> out) const;

  double dt() const noexcept { return op_.dt(); }
  const SGrid& sgrid() const noexcept { return sgrid_; }
  const Grid1D& grid() const noexcept { return grid_; }

 private:
  ProblemSpec spec_;
  Grid1D grid_;
  SGrid sgrid_;
  ImexOperator op_;
  std::vector<double> mu_;
  std::vector<double> weighted_mu_;  // trapezoid weight times mu
};

/// (s_j, ||eta(., s_j)||^2) pairs.
std::vector<std::pair<double, double>> eta_slices(const MemoryState& state, const Grid1D& grid,
                                                  const SGrid& sgrid);

/// mu(s_max) ||eta(., s_max)||^2, the discrete boundary term at the cut.
double eta_tail_term(const MemoryState& state, const Grid1D& grid);

struct MemoryRun {
  EnergyTrace trace;
  MemoryState final_state;
  std::size_t steps = 0;
  double wall_seconds = 0.0;
  double max_tail_term = 0.0;  // max over observed samples of eta_tail_term
};

MemoryRun run_memory(const ProblemSpec& spec, const Grid1D& grid, const SGrid& sgrid, double dt,
                     const RunOptions& options = {});

}  // namespace nltracer
