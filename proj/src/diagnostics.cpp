#include "nltracer/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "nltracer/error.hpp"
#include "nltracer/solver_direct.hpp"
#include "nltracer/solver_memory.hpp"

namespace nltracer {

// --- norms -----------------------------------------------------------------

double l2_norm_sq(std::span<const double> values, const Grid1D& grid) {
  double acc = 0.0;
  for (double v : values) acc += v * v;
  return acc * grid.dx();
}

double l2_norm_sq(const FieldState& field, const Grid1D& grid) { return l2_norm_sq(field.values, grid); }

double eta_norm_sq_mu(const MemoryState& state, const Grid1D& grid, const SGrid& sgrid) {
  if (state.columns != sgrid.size() || state.mu.size() != sgrid.size())
    throw Error(ErrorCode::InvalidArgument, "memory state does not match the s-grid");
  if (state.columns < 2) throw Error(ErrorCode::InvalidArgument, "weighted norm needs at least two s nodes");
  for (double m : state.mu)
    if (m < 0.0) throw Error(ErrorCode::NegativeWeight, "negative history weight in the weighted norm");
  const auto w = sgrid.trapezoid_weights();
  std::vector<double> slice(state.columns, 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double* row = state.eta.data() + i * state.columns;
    for (std::size_t j = 0; j < state.columns; ++j) slice[j] += row[j] * row[j];
  }
  double acc = 0.0;
  for (std::size_t j = 0; j < state.columns; ++j) acc += w[j] * state.mu[j] * slice[j];
  return acc * grid.dx();
}

// --- trace checks ----------------------------------------------------------

namespace {

double quantity_of(const EnergySample& s, TraceQuantity q) {
  return q == TraceQuantity::Total ? s.total() : s.c_norm_sq;
}

void require_nonempty(const EnergyTrace& trace) {
  if (trace.empty()) throw Error(ErrorCode::InvalidArgument, "trace is empty");
}

}  // namespace

MonotoneResult check_monotone(const EnergyTrace& trace, double tol, TraceQuantity quantity) {
  require_nonempty(trace);
  MonotoneResult r;
  r.tolerance = tol * quantity_of(trace.rows.front(), quantity);
  for (std::size_t i = 1; i < trace.size(); ++i) {
    const double inc = quantity_of(trace.rows[i], quantity) - quantity_of(trace.rows[i - 1], quantity);
    if (i == 1 || inc > r.worst_increase) r.worst_increase = inc;
    if (inc > r.tolerance && !r.first_violation) {
      r.first_violation = i;
      r.holds = false;
    }
  }
  return r;
}

EnergyInequalityResult check_energy_inequality(const EnergyTrace& trace, double alpha0,
                                               std::optional<double> delta, double tol) {
  require_nonempty(trace);
  EnergyInequalityResult r;
  r.gronwall_form = trace.has_eta() && delta.has_value();
  const auto& first = trace.rows.front();
  r.tolerance = tol * (r.gronwall_form ? first.total() : first.c_norm_sq);
  r.worst_margin = trace.size() > 1 ? -std::numeric_limits<double>::infinity() : 0.0;

  for (std::size_t i = 1; i < trace.size(); ++i) {
    const auto& p = trace.rows[i - 1];
    const auto& q = trace.rows[i];
    const double h = q.t - p.t;
    double margin = 0.0;
    if (r.gronwall_form) {
      const double rate_p = 2.0 * alpha0 * p.c_norm_sq + 2.0 * (*delta) * p.eta_norm_sq_mu.value_or(0.0);
      const double rate_q = 2.0 * alpha0 * q.c_norm_sq + 2.0 * (*delta) * q.eta_norm_sq_mu.value_or(0.0);
      margin = (q.total() - p.total()) + 0.5 * h * (rate_p + rate_q);
    } else {
      margin = 0.5 * (q.c_norm_sq - p.c_norm_sq) + alpha0 * 0.5 * h * (p.c_norm_sq + q.c_norm_sq);
    }
    r.intervals.push_back(IntervalMargin{p.t, q.t, margin});
    if (margin > r.worst_margin) {
      r.worst_margin = margin;
      r.worst_index = i - 1;
    }
    if (margin > r.tolerance) ++r.violations;
  }
  r.holds = r.violations == 0;
  return r;
}

NakaoResult check_nakao_hypothesis(const EnergyTrace& trace, double alpha0, double tol) {
  require_nonempty(trace);
  if (!(alpha0 > 0.0)) throw Error(ErrorCode::InvalidArgument, "Nakao check needs alpha0 > 0");
  const auto& rows = trace.rows;
  const double t_end = rows.back().t;
  if (t_end - rows.front().t < 1.0 - 1e-12)
    throw Error(ErrorCode::InvalidArgument, "trace spans less than one time unit");

  NakaoResult r;
  r.tolerance = tol * rows.front().c_norm_sq;
  r.worst_excess = -std::numeric_limits<double>::infinity();
  const double factor = 1.0 + 1.0 / (2.0 * alpha0);
  const double eps = 1e-9;

  std::size_t k = 0;  // first index with t_k >= t_i + 1 - eps
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double target = rows[i].t + 1.0;
    if (target > t_end + eps) break;
    k = std::max(k, i);
    while (k < rows.size() && rows[k].t < target - eps) ++k;

    double end_value = 0.0;
    if (std::abs(rows[k].t - target) <= eps) {
      end_value = rows[k].c_norm_sq;
    } else {
      const auto& a = rows[k - 1];
      const auto& b = rows[k];
      const double w = (target - a.t) / (b.t - a.t);
      end_value = (1.0 - w) * a.c_norm_sq + w * b.c_norm_sq;
    }
    double lhs = end_value;
    for (std::size_t m = i; m < k; ++m) lhs = std::max(lhs, rows[m].c_norm_sq);
    if (std::abs(rows[k].t - target) <= eps) lhs = std::max(lhs, rows[k].c_norm_sq);

    NakaoWindow w{rows[i].t, lhs, factor * (rows[i].c_norm_sq - end_value) + r.tolerance, true};
    w.holds = w.lhs <= w.rhs;
    if (!w.holds) ++r.violations;
    r.worst_excess = std::max(r.worst_excess, w.lhs - w.rhs);
    r.windows.push_back(w);
  }
  r.holds = r.violations == 0;
  return r;
}

std::pair<double, double> default_fit_window(const EnergyTrace& trace) {
  require_nonempty(trace);
  const double lo = trace.rows.front().t;
  const double hi = trace.rows.back().t;
  return {lo + 0.5 * (hi - lo), hi};
}

DecayFit fit_decay(const EnergyTrace& trace, std::optional<std::pair<double, double>> window,
                   TraceQuantity quantity) {
  require_nonempty(trace);
  const auto [lo, hi] = window.value_or(default_fit_window(trace));
  const double eps = 1e-9 * std::max(1.0, std::abs(hi));
  std::vector<double> ts, ys;
  for (const auto& row : trace.rows) {
    if (row.t < lo - eps || row.t > hi + eps) continue;
    const double v = quantity_of(row, quantity);
    if (!(v > 0.0)) {
      std::ostringstream os;
      os << "value " << v << " at t = " << row.t << " cannot be log-transformed";
      throw Error(ErrorCode::NonPositiveValues, os.str());
    }
    ts.push_back(row.t);
    ys.push_back(std::log(v));
  }
  if (ts.size() < 2) throw Error(ErrorCode::InvalidArgument, "decay fit window holds fewer than two samples");

  const double n = static_cast<double>(ts.size());
  double t_mean = 0.0, y_mean = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    t_mean += ts[i];
    y_mean += ys[i];
  }
  t_mean /= n;
  y_mean /= n;
  double stt = 0.0, sty = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double dt = ts[i] - t_mean;
    const double dy = ys[i] - y_mean;
    stt += dt * dt;
    sty += dt * dy;
    syy += dy * dy;
  }
  const double slope = sty / stt;
  const double intercept = y_mean - slope * t_mean;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double e = ys[i] - (intercept + slope * ts[i]);
    ss_res += e * e;
  }

  DecayFit fit;
  fit.a = std::exp(intercept);
  fit.b = slope == 0.0 ? 0.0 : -slope;
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  fit.t_lo = lo;
  fit.t_hi = hi;
  fit.samples = ts.size();
  fit.non_decaying = fit.b <= 0.0;
  return fit;
}

// --- convolution lemma -----------------------------------------------------

std::vector<SampleFunction> sample_catalogue() {
  return {
      {"decaying_exponential", [](double t) { return std::exp(-t); }},
      {"gaussian_bump",
       [](double t) {
         const double z = (t - 2.0) / 0.5;
         return std::exp(-0.5 * z * z);
       }},
      {"truncated_ramp", [](double t) { return t <= 2.0 ? t : 0.0; }},
  };
}

namespace {

struct LemmaIntegrals {
  double lhs = 0.0;
  double cross = 0.0;
};

LemmaIntegrals lemma_integrals(const Kernel& kernel, const std::function<double(double)>& y, double t0,
                               double t1, std::size_t n) {
  const double h = (t1 - t0) / static_cast<double>(n);
  LemmaIntegrals out;
  for (std::size_t m = 0; m <= n; ++m) {
    const double tau = t0 + h * static_cast<double>(m);
    double conv = 0.0;
    if (tau > 0.0) {
      const auto inner = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(tau / h - 1e-9)));
      const double hi = tau / static_cast<double>(inner);
      for (std::size_t q = 0; q <= inner; ++q) {
        const double sigma = hi * static_cast<double>(q);
        const double w = (q == 0 || q == inner) ? 0.5 : 1.0;
        conv += w * kernel.eval(std::max(0.0, tau - sigma)) * y(sigma);
      }
      conv *= hi;
    }
    const double w = (m == 0 || m == n) ? 0.5 * h : h;
    out.lhs += w * conv * conv;
    out.cross += w * conv * y(tau);
  }
  return out;
}

}  // namespace

StaffansResult staffans_check(const Kernel& kernel, const LemmaConstants& constants,
                              const std::function<double(double)>& y, double t0, double t1,
                              std::size_t quad_n) {
  if (!(t0 >= 0.0 && t1 > t0)) throw Error(ErrorCode::InvalidArgument, "need 0 <= t0 < t1");
  if (quad_n < 4) throw Error(ErrorCode::InvalidArgument, "quad_n must be at least 4");
  if (!l1_norms(kernel).k_l1)
    throw Error(ErrorCode::NotApplicable, "k is not integrable on R+, the lemma does not apply");

  const auto fine = lemma_integrals(kernel, y, t0, t1, quad_n);
  const auto coarse = lemma_integrals(kernel, y, t0, t1, quad_n / 2);
  StaffansResult r;
  r.lhs = fine.lhs;
  r.rhs = constants.bound_factor * fine.cross;
  r.lhs_error = std::abs(fine.lhs - coarse.lhs);
  r.rhs_error = constants.bound_factor * std::abs(fine.cross - coarse.cross);
  r.holds = r.lhs <= r.rhs + r.lhs_error + r.rhs_error;
  return r;
}

// --- backend comparison ----------------------------------------------------

double backend_discrepancy(const ProblemSpec& spec, const Grid1D& grid, const SGrid& sgrid, double dt) {
  if (!is_zero(spec.prehistory))
    throw Error(ErrorCode::InvalidArgument, "backend comparison requires zero prehistory");
  const std::size_t steps = step_count(spec.t_final, dt);

  DirectStepper direct(spec, grid, dt);
  MemoryStepper memory(spec, grid, sgrid, dt);
  HistoryBuffer history(grid.size(), dt);
  history.reserve(steps + 1);
  FieldState c_direct = initial_field(spec, grid);
  history.append(c_direct);
  MemoryState c_memory = memory.initial_state();

  double worst = 0.0;
  std::vector<double> diff(grid.size());
  for (std::size_t n = 0; n < steps; ++n) {
    c_direct = direct.step(c_direct, history);
    memory.advance(c_memory);
    for (std::size_t i = 0; i < grid.size(); ++i) diff[i] = c_direct.values[i] - c_memory.c.values[i];
    const double num = l2_norm_sq(diff, grid);
    const double den = l2_norm_sq(c_direct, grid);
    if (num == 0.0) continue;
    worst = std::max(worst, den > 0.0 ? std::sqrt(num / den) : std::numeric_limits<double>::infinity());
  }
  return worst;
}

CrossValidation cross_validate(const ProblemSpec& spec, const Grid1D& grid, const SGrid& sgrid, double dt) {
  CrossValidation cv;
  cv.max_rel_diff = backend_discrepancy(spec, grid, sgrid, dt);
  const SGrid fine(sgrid.s_max(), 2 * sgrid.intervals());
  cv.refined_max_rel_diff = backend_discrepancy(spec, grid, fine, 0.5 * dt);
  if (cv.refined_max_rel_diff > 0.0 && cv.max_rel_diff > 0.0) {
    cv.ratio = cv.max_rel_diff / cv.refined_max_rel_diff;
    cv.convergence_order = std::log2(*cv.ratio);
  }
  return cv;
}

}  // namespace nltracer
