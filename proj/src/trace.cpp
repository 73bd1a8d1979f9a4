#include "nltracer/trace.hpp"

#include <cmath>

#include "nltracer/error.hpp"

namespace nltracer {

EnergyTrace make_trace(std::span<const double> t, std::span<const double> c_norm_sq,
                       std::span<const double> eta_norm_sq_mu) {
  if (t.size() != c_norm_sq.size() || (!eta_norm_sq_mu.empty() && eta_norm_sq_mu.size() != t.size()))
    throw Error(ErrorCode::InvalidArgument, "trace columns differ in length");
  EnergyTrace trace;
  trace.rows.reserve(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    EnergySample s{t[i], c_norm_sq[i], std::nullopt};
    if (!eta_norm_sq_mu.empty()) s.eta_norm_sq_mu = eta_norm_sq_mu[i];
    trace.rows.push_back(s);
  }
  return trace;
}

void check_trace_invariants(const EnergyTrace& trace) {
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const auto& r = trace.rows[i];
    const bool ok = std::isfinite(r.c_norm_sq) && r.c_norm_sq >= 0.0 &&
                    (!r.eta_norm_sq_mu || (std::isfinite(*r.eta_norm_sq_mu) && *r.eta_norm_sq_mu >= 0.0));
    if (!ok) throw Error(ErrorCode::InvalidArgument, "trace values must be finite and nonnegative");
    if (i > 0 && !(r.t > trace.rows[i - 1].t))
      throw Error(ErrorCode::InvalidArgument, "trace times must be strictly increasing");
  }
}

}  // namespace nltracer
