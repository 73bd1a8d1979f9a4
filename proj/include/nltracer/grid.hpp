#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace nltracer {

/// Interior nodes x_i = -L + i dx, i = 1..n_x, dx = 2L/(n_x + 1); the
/// boundary values at +-L are pinned to zero.
class Grid1D {
 public:
  Grid1D(double half_width, std::size_t n_x);

  double half_width() const noexcept { return half_width_; }
  std::size_t size() const noexcept { return n_x_; }
  double dx() const noexcept { return dx_; }
  /// Position of interior node `i` (0-based, so node i + 1 in the 1-based numbering).
  double x(std::size_t i) const noexcept { return -half_width_ + static_cast<double>(i + 1) * dx_; }
  std::vector<double> nodes() const;

 private:
  double half_width_;
  std::size_t n_x_;
  double dx_;
};

/// History-age nodes s_j = j ds, j = 0..n_s, ds = s_max / n_s.
class SGrid {
 public:
  SGrid(double s_max, std::size_t n_s);

  double s_max() const noexcept { return s_max_; }
  std::size_t intervals() const noexcept { return n_s_; }
  std::size_t size() const noexcept { return n_s_ + 1; }
  double ds() const noexcept { return ds_; }
  double s(std::size_t j) const noexcept { return static_cast<double>(j) * ds_; }
  /// Composite trapezoid weights over [0, s_max].
  std::vector<double> trapezoid_weights() const;

 private:
  double s_max_;
  std::size_t n_s_;
  double ds_;
};

struct FieldState {
  std::vector<double> values;
  double t = 0.0;
  std::size_t step = 0;
};

/// Throws NonFiniteField when any value is NaN or infinite.
void require_finite(const FieldState& state, const char* where);

/// Uniformly spaced snapshots C(., j dt), j = 0..steps, stored contiguously.
class HistoryBuffer {
 public:
  HistoryBuffer(std::size_t n_x, double dt);

  void append(const FieldState& state);
  std::size_t size() const noexcept { return n_x_ == 0 ? 0 : data_.size() / n_x_; }
  bool empty() const noexcept { return data_.empty(); }
  std::size_t width() const noexcept { return n_x_; }
  double dt() const noexcept { return dt_; }
  std::span<const double> snapshot(std::size_t j) const {
    return std::span<const double>(data_).subspan(j * n_x_, n_x_);
  }
  /// Time of the newest snapshot.
  double latest_time() const noexcept { return empty() ? 0.0 : static_cast<double>(size() - 1) * dt_; }
  void reserve(std::size_t snapshots) { data_.reserve(snapshots * n_x_); }

 private:
  std::size_t n_x_;
  double dt_;
  std::vector<double> data_;
};

}  // namespace nltracer
