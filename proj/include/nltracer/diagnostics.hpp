#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nltracer/grid.hpp"
#include "nltracer/kernel.hpp"
#include "nltracer/model.hpp"
#include "nltracer/trace.hpp"

namespace nltracer {

struct MemoryState;

// --- norms -----------------------------------------------------------------

/// Trapezoid of C^2 over [-L, L] with zero boundary values.
double l2_norm_sq(std::span<const double> values, const Grid1D& grid);
double l2_norm_sq(const FieldState& field, const Grid1D& grid);

/// sum_j w_j mu_j ||eta(., s_j)||^2. Throws NegativeWeight for a negative mu
/// entry and InvalidArgument for a single-node s-grid.
double eta_norm_sq_mu(const MemoryState& state, const Grid1D& grid, const SGrid& sgrid);

// --- trace checks ----------------------------------------------------------

enum class TraceQuantity { CNormSq, Total };

struct MonotoneResult {
  bool holds = true;
  std::optional<std::size_t> first_violation;  // index i with value[i] > value[i-1] + tol
  double worst_increase = 0.0;                   // absolute
  double tolerance = 0.0;                        // absolute, tol * initial value
};

MonotoneResult check_monotone(const EnergyTrace& trace, double tol = 1e-6,
                              TraceQuantity quantity = TraceQuantity::CNormSq);

struct IntervalMargin {
  double t0 = 0.0;
  double t1 = 0.0;
  double margin = 0.0;  // <= tolerance means the interval passes
};

struct EnergyInequalityResult {
  bool holds = true;
  bool gronwall_form = false;  // true when the eta terms were included
  std::vector<IntervalMargin> intervals;
  double worst_margin = 0.0;
  std::optional<std::size_t> worst_index;
  std::size_t violations = 0;
  double tolerance = 0.0;  // absolute
};

/// Without eta data: 1/2 (E(t1) - E(t0)) + alpha0 int_{t0}^{t1} E <= tol per
/// adjacent pair. With eta data and a delta:
/// dE_total + int (2 alpha0 ||C||^2 + 2 delta ||eta||_mu^2) <= tol.
/// Integrals are trapezoids; tol is relative to the initial (total) energy.
EnergyInequalityResult check_energy_inequality(const EnergyTrace& trace, double alpha0,
                                               std::optional<double> delta, double tol = 1e-6);

struct NakaoWindow {
  double t = 0.0;
  double lhs = 0.0;  // max over [t, t+1]
  double rhs = 0.0;  // (1 + 1/(2 alpha0)) (E(t) - E(t+1)) + tol
  bool holds = true;
};

struct NakaoResult {
  bool holds = true;
  std::vector<NakaoWindow> windows;
  std::size_t violations = 0;
  double worst_excess = 0.0;  // max of lhs - rhs
  double tolerance = 0.0;     // absolute
};

/// Unit-window check on ||C||^2; E(t+1) is linearly interpolated when the
/// sampling misses t + 1. Throws InvalidArgument for alpha0 <= 0 or a trace
/// shorter than one time unit.
NakaoResult check_nakao_hypothesis(const EnergyTrace& trace, double alpha0, double tol = 1e-6);

struct DecayFit {
  double a = 0.0;
  double b = 0.0;
  double r_squared = 0.0;
  double t_lo = 0.0;
  double t_hi = 0.0;
  std::size_t samples = 0;
  bool non_decaying = false;
};

/// Least squares of ln(value) against t over the window (default: last half
/// of the trace). Throws NonPositiveValues when a value in the window is <= 0.
DecayFit fit_decay(const EnergyTrace& trace, std::optional<std::pair<double, double>> window = std::nullopt,
                   TraceQuantity quantity = TraceQuantity::CNormSq);

/// Default window: [t_mid, t_end] of the trace.
std::pair<double, double> default_fit_window(const EnergyTrace& trace);

// --- convolution lemma -----------------------------------------------------

struct SampleFunction {
  std::string name;
  std::function<double(double)> y;
};

/// Decaying exponential, Gaussian bump and truncated ramp.
std::vector<SampleFunction> sample_catalogue();

struct StaffansResult {
  double lhs = 0.0;  // int_{t0}^{t1} |k*y|^2
  double rhs = 0.0;  // bound_factor int_{t0}^{t1} (k*y) y
  double lhs_error = 0.0;  // Richardson estimate, n vs n/2
  double rhs_error = 0.0;
  bool holds = true;
};

/// Nested trapezoid quadrature with quad_n outer intervals on [t0, t1]; the
/// inner convolution integral on [0, tau] uses the same spacing.
StaffansResult staffans_check(const Kernel& kernel, const LemmaConstants& constants,
                              const std::function<double(double)>& y, double t0, double t1,
                              std::size_t quad_n = 2000);

// --- backend comparison ----------------------------------------------------

struct CrossValidation {
  double max_rel_diff = 0.0;               // at the base (dt, ds)
  double refined_max_rel_diff = 0.0;       // at (dt/2, ds/2)
  std::optional<double> ratio;             // base / refined
  std::optional<double> convergence_order;  // log2(ratio)
};

/// Max over steps of ||C_direct - C_memory|| / ||C_direct|| with both
/// backends advanced in lockstep from identical inputs.
double backend_discrepancy(const ProblemSpec& spec, const Grid1D& grid, const SGrid& sgrid, double dt);

/// Runs the base resolution and a simultaneous halving of dt and ds.
/// Requires zero prehistory.
CrossValidation cross_validate(const ProblemSpec& spec, const Grid1D& grid, const SGrid& sgrid, double dt);

}  // namespace nltracer
