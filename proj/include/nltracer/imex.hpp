#pragma once

#include <span>
#include <vector>

#include "nltracer/grid.hpp"
#include "nltracer/model.hpp"

namespace nltracer {

/// Local part of one IMEX step shared by both backends:
///
///   (C^{n+1} - C^n)/dt = D C_xx^{n+1} - k(0) C^{n+1} - U C_x^n - M^n
///
/// with first-order upwind advection keyed to sign(U(x_i)), homogeneous
/// Dirichlet ends, and a prefactored constant-coefficient Thomas solve.
class ImexOperator {
 public:
  /// Throws CflViolation when max|U| dt/dx > 1.
  ImexOperator(const ProblemSpec& spec, const Grid1D& grid, double dt);

  /// c_new may not alias c_old; memory is the nonlocal term M^n per node.
  void advance(std::span<const double> c_old, std::span<const double> memory,
               std::span<double> c_new) const;

  /// Upwind U C_x with zero boundary values.
  void advection(std::span<const double> c, std::span<double> out) const;

  double dt() const noexcept { return dt_; }
  double cfl() const noexcept { return cfl_; }
  std::size_t size() const noexcept { return u_.size(); }

 private:
  double dt_;
  double dx_;
  double cfl_ = 0.0;
  double diag_;
  double off_;
  std::vector<double> u_;
  std::vector<double> c_prime_;   // Thomas super-diagonal after elimination
  std::vector<double> inv_pivot_;
};

}  // namespace nltracer
