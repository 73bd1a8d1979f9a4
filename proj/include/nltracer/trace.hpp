#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace nltracer {

struct EnergySample {
  double t = 0.0;
  double c_norm_sq = 0.0;
  std::optional<double> eta_norm_sq_mu;  // memory backend only
  double total() const noexcept { return c_norm_sq + eta_norm_sq_mu.value_or(0.0); }
};

/// Energy time series on a uniform t spacing.
struct EnergyTrace {
  std::vector<EnergySample> rows;

  bool empty() const noexcept { return rows.empty(); }
  std::size_t size() const noexcept { return rows.size(); }
  bool has_eta() const noexcept { return !rows.empty() && rows.front().eta_norm_sq_mu.has_value(); }
};

/// Builds a trace from parallel columns; `eta` may be empty.
EnergyTrace make_trace(std::span<const double> t, std::span<const double> c_norm_sq,
                       std::span<const double> eta_norm_sq_mu = {});

/// Throws InvalidArgument unless t is strictly increasing and every value is
/// finite and nonnegative.
void check_trace_invariants(const EnergyTrace& trace);

/// State handed to observers at the configured stride.
struct Observation {
  std::size_t step = 0;
  double t = 0.0;
  std::span<const double> c;
  /// Row-major (x-major) history variable, n_x rows of `eta_columns` values;
  /// empty for the direct backend.
  std::span<const double> eta;
  std::size_t eta_columns = 0;
};

using Observer = std::function<void(const Observation&)>;

struct RunOptions {
  std::size_t stride = 1;  // trace and observer cadence in steps
  std::vector<Observer> observers;
};

}  // namespace nltracer
