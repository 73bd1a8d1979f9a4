#include "nltracer/grid.hpp"

#include <cmath>
#include <sstream>

#include "nltracer/error.hpp"

namespace nltracer {

Grid1D::Grid1D(double half_width, std::size_t n_x)
    : half_width_(half_width), n_x_(n_x), dx_(2.0 * half_width / static_cast<double>(n_x + 1)) {
  if (!(half_width > 0.0) || n_x == 0)
    throw Error(ErrorCode::InvalidArgument, "Grid1D needs L > 0 and at least one interior node");
}

std::vector<double> Grid1D::nodes() const {
  std::vector<double> xs(n_x_);
  for (std::size_t i = 0; i < n_x_; ++i) xs[i] = x(i);
  return xs;
}

SGrid::SGrid(double s_max, std::size_t n_s)
    : s_max_(s_max), n_s_(n_s), ds_(s_max / static_cast<double>(n_s)) {
  if (!(s_max > 0.0) || n_s == 0)
    throw Error(ErrorCode::InvalidArgument, "SGrid needs s_max > 0 and at least one interval");
}

std::vector<double> SGrid::trapezoid_weights() const {
  std::vector<double> w(size(), ds_);
  w.front() = 0.5 * ds_;
  w.back() = 0.5 * ds_;
  return w;
}

void require_finite(const FieldState& state, const char* where) {
  for (std::size_t i = 0; i < state.values.size(); ++i) {
    if (!std::isfinite(state.values[i])) {
      std::ostringstream os;
      os << where << ": non-finite value at node " << i << ", step " << state.step << " (t = " << state.t
         << ")";
      throw Error(ErrorCode::NonFiniteField, os.str());
    }
  }
}

HistoryBuffer::HistoryBuffer(std::size_t n_x, double dt) : n_x_(n_x), dt_(dt) {
  if (n_x == 0 || !(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "HistoryBuffer needs n_x > 0, dt > 0");
}

void HistoryBuffer::append(const FieldState& state) {
  if (state.values.size() != n_x_)
    throw Error(ErrorCode::InvalidArgument, "snapshot width does not match the history buffer");
  if (state.step != size())
    throw Error(ErrorCode::InvalidArgument, "snapshot step index does not follow the history");
  data_.insert(data_.end(), state.values.begin(), state.values.end());
}

}  // namespace nltracer
