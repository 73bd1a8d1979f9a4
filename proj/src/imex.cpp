#include "nltracer/imex.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nltracer/error.hpp"

namespace nltracer {

ImexOperator::ImexOperator(const ProblemSpec& spec, const Grid1D& grid, double dt)
    : dt_(dt), dx_(grid.dx()) {
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "time step must be positive");
  if (spec.diffusivity < 0.0) throw Error(ErrorCode::InvalidArgument, "diffusivity must be nonnegative");

  const std::size_t n = grid.size();
  u_.resize(n);
  double u_max = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    u_[i] = spec.velocity.u(grid.x(i));
    u_max = std::max(u_max, std::abs(u_[i]));
  }
  cfl_ = u_max * dt / dx_;
  if (cfl_ > 1.0) {
    std::ostringstream os;
    os << "advective CFL number " << cfl_ << " exceeds 1 (max|U| = " << u_max << ", dt = " << dt
       << ", dx = " << dx_ << ")";
    throw Error(ErrorCode::CflViolation, os.str());
  }

  // Scaled by dt: (1 + dt k(0) + 2r) C_i - r (C_{i-1} + C_{i+1}) = rhs, r = D dt / dx^2.
  const double r = spec.diffusivity * dt / (dx_ * dx_);
  diag_ = 1.0 + dt * spec.kernel.eval(0.0) + 2.0 * r;
  off_ = -r;

  c_prime_.resize(n);
  inv_pivot_.resize(n);
  double prev = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double pivot = diag_ - (i == 0 ? 0.0 : off_ * prev);
    inv_pivot_[i] = 1.0 / pivot;
    prev = off_ * inv_pivot_[i];
    c_prime_[i] = prev;
  }
}

void ImexOperator::advection(std::span<const double> c, std::span<double> out) const {
  const std::size_t n = u_.size();
  const double inv_dx = 1.0 / dx_;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = u_[i];
    if (u > 0.0) {
      const double left = i == 0 ? 0.0 : c[i - 1];
      out[i] = u * (c[i] - left) * inv_dx;
    } else if (u < 0.0) {
      const double right = i + 1 == n ? 0.0 : c[i + 1];
      out[i] = u * (right - c[i]) * inv_dx;
    } else {
      out[i] = 0.0;
    }
  }
}

void ImexOperator::advance(std::span<const double> c_old, std::span<const double> memory,
                           std::span<double> c_new) const {
  const std::size_t n = u_.size();
  advection(c_old, c_new);  // c_new holds U C_x for now
  // Forward elimination writes the modified right-hand side into c_new.
  double prev = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double m = memory.empty() ? 0.0 : memory[i];
    const double rhs = c_old[i] - dt_ * (c_new[i] + m);
    prev = (rhs - (i == 0 ? 0.0 : off_ * prev)) * inv_pivot_[i];
    c_new[i] = prev;
  }
  for (std::size_t i = n - 1; i-- > 0;) c_new[i] -= c_prime_[i] * c_new[i + 1];
}

}  // namespace nltracer
