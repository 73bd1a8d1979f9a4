#include "nltracer/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

// Boost 1.74 pchip calls isnan unqualified.
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "nltracer/error.hpp"

namespace nltracer {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NegativeTime: return "NegativeTime";
    case ErrorCode::UnsupportedOrder: return "UnsupportedOrder";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::NotApplicable: return "NotApplicable";
    case ErrorCode::NoValidConstants: return "NoValidConstants";
    case ErrorCode::CflViolation: return "CflViolation";
    case ErrorCode::NonFiniteField: return "NonFiniteField";
    case ErrorCode::InsufficientPrehistoryDepth: return "InsufficientPrehistoryDepth";
    case ErrorCode::InsufficientHistory: return "InsufficientHistory";
    case ErrorCode::NegativeWeight: return "NegativeWeight";
    case ErrorCode::NonPositiveValues: return "NonPositiveValues";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::Holds: return "holds";
    case Verdict::Fails: return "fails";
    case Verdict::NotApplicable: return "not-applicable";
  }
  return "unknown";
}

struct Kernel::Pchip {
  boost::math::interpolators::pchip<std::vector<double>> spline;
};

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require(bool ok, const std::string& msg) {
  if (!ok) throw Error(ErrorCode::InvalidArgument, msg);
}

// (-gamma)^d
double signed_power(double gamma, int order) {
  double r = 1.0;
  for (int i = 0; i < order; ++i) r *= -gamma;
  return r;
}

}  // namespace

Kernel::Kernel(Family family) : family_(std::move(family)) {
  std::visit(overloaded{
                 [](const SaturatingExponential& f) {
                   require(f.b > 0.0 && f.a >= f.b, "saturating exponential needs a >= b > 0");
                   require(f.gamma_k > 0.0, "saturating exponential needs gamma_k > 0");
                 },
                 [](const ExponentialDecay& f) {
                   // beta = 0 is the k = 0 reduction (pure advection-diffusion).
                   require(f.beta >= 0.0 && f.gamma_k > 0.0,
                           "exponential decay needs beta >= 0 and gamma_k > 0");
                 },
                 [this](const TabulatedKernel& f) {
                   require(f.t.size() == f.k.size(), "kernel table columns differ in length");
                   require(f.t.size() >= 4, "kernel table needs at least 4 samples");
                   require(f.t.front() >= 0.0, "kernel table starts before t = 0");
                   require(f.h_fd > 0.0, "finite-difference width must be positive");
                   for (std::size_t i = 1; i < f.t.size(); ++i)
                     require(f.t[i] > f.t[i - 1], "kernel table times must be strictly increasing");
                   for (double v : f.k) require(v > 0.0, "kernel table values must be positive");
                   auto x = f.t;
                   auto y = f.k;
                   pchip_ = std::make_shared<const Pchip>(
                       Pchip{boost::math::interpolators::pchip<std::vector<double>>(std::move(x),
                                                                                    std::move(y))});
                 },
             },
             family_);
}

Kernel Kernel::saturating_exponential(double a, double b, double gamma_k) {
  return Kernel(SaturatingExponential{a, b, gamma_k});
}

Kernel Kernel::exponential_decay(double beta, double gamma_k) {
  return Kernel(ExponentialDecay{beta, gamma_k});
}

Kernel Kernel::tabulated(std::vector<double> t, std::vector<double> k, double h_fd) {
  return Kernel(TabulatedKernel{std::move(t), std::move(k), h_fd, {}});
}

std::string_view Kernel::family_name() const noexcept {
  return std::visit(overloaded{
                        [](const SaturatingExponential&) { return std::string_view("saturating_exponential"); },
                        [](const ExponentialDecay&) { return std::string_view("exponential_decay"); },
                        [](const TabulatedKernel&) { return std::string_view("tabulated"); },
                    },
                    family_);
}

std::optional<double> Kernel::decay_rate() const noexcept {
  return std::visit(overloaded{
                        [](const SaturatingExponential& f) -> std::optional<double> { return f.gamma_k; },
                        [](const ExponentialDecay& f) -> std::optional<double> { return f.gamma_k; },
                        [](const TabulatedKernel&) -> std::optional<double> { return std::nullopt; },
                    },
                    family_);
}

double Kernel::max_time() const noexcept {
  if (const auto* tab = std::get_if<TabulatedKernel>(&family_)) return tab->t.back();
  return std::numeric_limits<double>::infinity();
}

double Kernel::horizon(double tail_tol) const {
  require(tail_tol > 0.0, "tail tolerance must be positive");
  auto exp_horizon = [tail_tol](double amplitude, double gamma) {
    // int_T^inf amplitude gamma^d e^{-gamma t} dt = amplitude gamma^{d-1} e^{-gamma T}
    double t_end = 0.0;
    for (int d = 0; d <= 3; ++d) {
      const double c = amplitude * std::pow(gamma, d - 1);
      if (!(c > tail_tol)) continue;
      t_end = std::max(t_end, std::log(c / tail_tol) / gamma);
    }
    return t_end;
  };
  return std::visit(overloaded{
                        [&](const SaturatingExponential& f) { return exp_horizon(f.b, f.gamma_k); },
                        [&](const ExponentialDecay& f) { return exp_horizon(f.beta, f.gamma_k); },
                        [](const TabulatedKernel& f) { return f.t.back(); },
                    },
                    family_);
}

double Kernel::table_value(double t) const { return pchip_->spline(t); }
double Kernel::table_slope(double t) const { return pchip_->spline.prime(t); }

double Kernel::eval(double t, int order) const {
  if (!(t >= 0.0)) {
    std::ostringstream os;
    os << "kernel evaluated at t = " << t;
    throw Error(ErrorCode::NegativeTime, os.str());
  }
  if (order < 0 || order > 3) throw Error(ErrorCode::UnsupportedOrder, "derivative order must be 0..3");

  return std::visit(
      overloaded{
          [&](const SaturatingExponential& f) {
            const double e = std::exp(-f.gamma_k * t);
            if (order == 0) return f.a - f.b * e;
            return -f.b * signed_power(f.gamma_k, order) * e;
          },
          [&](const ExponentialDecay& f) {
            return f.beta * signed_power(f.gamma_k, order) * std::exp(-f.gamma_k * t);
          },
          [&](const TabulatedKernel& f) {
            const double lo = f.t.front();
            const double hi = f.t.back();
            if (t < lo || t > hi) {
              std::ostringstream os;
              os << "t = " << t << " outside kernel table [" << lo << ", " << hi << "]";
              throw Error(ErrorCode::OutOfRange, os.str());
            }
            if (order == 0) return table_value(t);
            if (order == 1) return table_slope(t);
            const double h = f.h_fd;
            if (order == 2) {
              if (t - h >= lo && t + h <= hi) return (table_slope(t + h) - table_slope(t - h)) / (2 * h);
              if (t + 2 * h <= hi)
                return (-3 * table_slope(t) + 4 * table_slope(t + h) - table_slope(t + 2 * h)) / (2 * h);
              if (t - 2 * h >= lo)
                return (3 * table_slope(t) - 4 * table_slope(t - h) + table_slope(t - 2 * h)) / (2 * h);
            } else {
              if (t - h >= lo && t + h <= hi)
                return (table_slope(t + h) - 2 * table_slope(t) + table_slope(t - h)) / (h * h);
              if (t + 2 * h <= hi)
                return (table_slope(t) - 2 * table_slope(t + h) + table_slope(t + 2 * h)) / (h * h);
              if (t - 2 * h >= lo)
                return (table_slope(t) - 2 * table_slope(t - h) + table_slope(t - 2 * h)) / (h * h);
            }
            throw Error(ErrorCode::UnsupportedOrder, "finite-difference stencil exits the kernel table");
          },
      },
      family_);
}

// ---------------------------------------------------------------------------

namespace {

struct Integral {
  double value = 0.0;
  double error = 0.0;
};

template <class F>
Integral integrate_pieces(F&& f, std::span<const double> breaks) {
  using boost::math::quadrature::gauss_kronrod;
  Integral total;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    double err = 0.0;
    total.value += gauss_kronrod<double, 31>::integrate(f, breaks[i], breaks[i + 1], 15, 1e-13, &err);
    total.error += err;
  }
  return total;
}

}  // namespace

L1Norms l1_norms(const Kernel& kernel, double tail_tol) {
  require(tail_tol > 0.0, "tail tolerance must be positive");
  L1Norms out;
  out.horizon = kernel.horizon(tail_tol);

  std::vector<double> breaks;
  bool divergent = false;
  if (const auto* tab = std::get_if<TabulatedKernel>(&kernel.family())) {
    breaks = tab->t;
    // Nothing is known past the table; a non-vanishing last value means a
    // positive limit cannot be excluded.
    divergent = std::abs(tab->k.back()) > tail_tol;
  } else {
    const double rate = *kernel.decay_rate();
    const auto pieces = static_cast<std::size_t>(std::ceil(out.horizon * rate)) + 1;
    breaks.reserve(pieces + 1);
    for (std::size_t i = 0; i <= pieces; ++i) breaks.push_back(out.horizon * i / pieces);
    divergent = std::holds_alternative<SaturatingExponential>(kernel.family());
  }

  auto norm_of = [&](int order) {
    auto r = integrate_pieces([&](double t) { return std::abs(kernel.eval(t, order)); }, breaks);
    const double budget = std::max(tail_tol, 1e-10 * std::abs(r.value));
    if (!(r.error <= budget)) {
      std::ostringstream os;
      os << "|k^(" << order << ")|_1 error estimate " << r.error << " exceeds " << budget;
      throw Error(ErrorCode::QuadratureFailure, os.str());
    }
    return r.value;
  };

  if (!divergent) out.k_l1 = norm_of(0);
  out.kp_l1 = norm_of(1);
  out.kpp_l1 = norm_of(2);
  return out;
}

std::vector<double> uniform_grid(double t_end, std::size_t n) {
  require(n >= 1 && t_end > 0.0, "uniform grid needs n >= 1 and t_end > 0");
  std::vector<double> g(n + 1);
  for (std::size_t i = 0; i <= n; ++i) g[i] = t_end * static_cast<double>(i) / static_cast<double>(n);
  return g;
}

namespace {

double lemma_margin(const Kernel& kernel, double beta0, double gamma, std::span<const double> grid) {
  double worst = std::numeric_limits<double>::infinity();
  for (double t : grid) worst = std::min(worst, kernel.eval(t) - beta0 * std::exp(-gamma * t));
  return worst;
}

}  // namespace

LemmaConstants lemma_constants_for(const Kernel& kernel, double beta0, double gamma,
                                   std::span<const double> grid, double tail_tol) {
  require(beta0 > 0.0 && gamma > 0.0, "lemma constants need beta0 > 0 and gamma > 0");
  require(!grid.empty(), "lemma grid is empty");
  const auto norms = l1_norms(kernel, tail_tol);
  if (!norms.k_l1)
    throw Error(ErrorCode::NotApplicable, "k is not integrable on R+, the lemma does not apply");

  LemmaConstants c;
  c.beta0 = beta0;
  c.gamma = gamma;
  c.big_k = (*norms.k_l1) * (*norms.k_l1) + 4.0 * norms.kp_l1 * norms.kp_l1;
  c.bound_factor = gamma == 1.0 ? beta0 * c.big_k : beta0 * c.big_k / gamma;
  c.min_margin = lemma_margin(kernel, beta0, gamma, grid);
  if (!(c.min_margin > 0.0)) {
    std::ostringstream os;
    os << "k(t) - " << beta0 << " exp(-" << gamma << " t) reaches " << c.min_margin << " on the grid";
    throw Error(ErrorCode::NoValidConstants, os.str());
  }
  return c;
}

LemmaConstants lemma_constants(const Kernel& kernel, std::span<const double> search_grid,
                               double tail_tol) {
  require(!search_grid.empty(), "lemma grid is empty");
  if (!l1_norms(kernel, tail_tol).k_l1)
    throw Error(ErrorCode::NotApplicable, "k is not integrable on R+, the lemma does not apply");

  const double scale = kernel.decay_rate().value_or(1.0);
  std::vector<double> ladder;
  for (int p = -4; p <= 4; ++p) ladder.push_back(scale * std::ldexp(1.0, p));
  if (std::find(ladder.begin(), ladder.end(), 1.0) == ladder.end()) ladder.push_back(1.0);

  const double t0 = search_grid.front();
  std::optional<std::pair<double, double>> best;  // (gamma, beta0)
  auto distance = [](double g) { return std::abs(std::log(g)); };

  for (double gamma : ladder) {
    double lo = 0.0;
    double hi = kernel.eval(t0) * std::exp(gamma * t0);
    if (!(hi > 0.0) || !std::isfinite(hi)) continue;
    if (lemma_margin(kernel, hi, gamma, search_grid) > 0.0) {
      lo = hi;
    } else {
      // Stop at 1e-3 relative bracket width; the passing end is kept so the
      // strict inequality survives refinement of the grid.
      const double width = 1e-3 * hi;
      while (hi - lo > width) {
        const double mid = 0.5 * (lo + hi);
        if (lemma_margin(kernel, mid, gamma, search_grid) > 0.0)
          lo = mid;
        else
          hi = mid;
      }
    }
    if (!(lo > 0.0)) continue;
    if (!best || distance(gamma) < distance(best->first)) best = {gamma, lo};
  }
  if (!best) throw Error(ErrorCode::NoValidConstants, "no (beta0, gamma) pair on the ladder passes");
  return lemma_constants_for(kernel, best->second, best->first, search_grid, tail_tol);
}

// ---------------------------------------------------------------------------

const ConditionEntry* ConditionReport::find(std::string_view id) const {
  for (const auto& e : entries)
    if (e.id == id) return &e;
  return nullptr;
}

ConditionEntry* ConditionReport::find(std::string_view id) {
  for (auto& e : entries)
    if (e.id == id) return &e;
  return nullptr;
}

Verdict verdict_from_margin(const ConditionEntry& entry) noexcept {
  if (entry.verdict == Verdict::NotApplicable) return Verdict::NotApplicable;
  const bool ok = entry.strict ? entry.worst_margin < 0.0 : entry.worst_margin <= entry.tolerance;
  return ok ? Verdict::Holds : Verdict::Fails;
}

namespace {

class MarginTracker {
 public:
  void add(double t, double g) {
    if (!witness_ || g > worst_) {
      worst_ = g;
      witness_ = t;
    }
  }
  ConditionEntry finish(std::string id, std::string statement, double tol, bool strict) const {
    ConditionEntry e;
    e.id = std::move(id);
    e.statement = std::move(statement);
    e.tolerance = tol;
    e.strict = strict;
    e.worst_margin = worst_;
    e.witness = witness_;
    e.verdict = witness_ ? Verdict::Holds : Verdict::NotApplicable;
    if (witness_) e.verdict = verdict_from_margin(e);
    return e;
  }

 private:
  double worst_ = -std::numeric_limits<double>::infinity();
  std::optional<double> witness_;
};

}  // namespace

ConditionReport condition_report(const Kernel& kernel, double delta, std::span<const double> t_grid,
                                 double tol, double tail_tol) {
  ConditionReport report;

  ConditionEntry c1;
  c1.id = "C1";
  c1.statement = "U'(x)/2 <= -alpha0 + k(0) with alpha0 > 0";
  c1.tolerance = tol;
  c1.strict = true;
  c1.note = "needs the velocity field; judged by alpha0";
  report.entries.push_back(c1);

  MarginTracker c2, c4, c5, c5p;
  std::string derivative_note;
  for (double t : t_grid) {
    double k1 = 0, k2 = 0, k3 = 0;
    try {
      k1 = kernel.eval(t, 1);
      k2 = kernel.eval(t, 2);
      k3 = kernel.eval(t, 3);
    } catch (const Error& e) {
      derivative_note = e.what();
      continue;
    }
    c2.add(t, -k1);
    c4.add(t, std::max(k2, -k3));
    c5.add(t, k3 + delta * k2);
    c5p.add(t, -(k3 + 2.0 * delta * k2));
  }

  report.entries.push_back(c2.finish("C2", "k'(t) > 0", tol, true));

  {
    ConditionEntry l1;
    l1.id = "C2_L1";
    l1.statement = "k, k', k'' in L1(R+)";
    l1.tolerance = tail_tol;
    const double t_end = std::min(kernel.horizon(tail_tol), kernel.max_time());
    double limit = 0.0;
    if (const auto* sat = std::get_if<SaturatingExponential>(&kernel.family()))
      limit = sat->a;
    else if (std::holds_alternative<TabulatedKernel>(kernel.family()))
      limit = std::abs(kernel.eval(t_end));
    l1.worst_margin = limit;
    l1.witness = t_end;
    l1.verdict = Verdict::Holds;
    l1.verdict = verdict_from_margin(l1);
    l1.note = "margin is the limiting value of |k|; a positive limit makes k non-integrable";
    report.entries.push_back(l1);
  }

  {
    ConditionEntry c3;
    c3.id = "C3";
    c3.statement = "k'(s) -> 0 as s -> inf";
    c3.tolerance = tol;
    if (!t_grid.empty()) {
      const double t_last = t_grid.back();
      try {
        c3.worst_margin = std::abs(kernel.eval(t_last, 1));
        c3.witness = t_last;
        c3.verdict = Verdict::Holds;
        c3.verdict = verdict_from_margin(c3);
      } catch (const Error& e) {
        c3.note = e.what();
      }
    }
    report.entries.push_back(c3);
  }

  report.entries.push_back(c4.finish("C4", "k''(s) <= 0 and k'''(s) >= 0", tol, false));
  report.entries.push_back(c5.finish("C5", "k'''(s) + delta k''(s) <= 0", tol, false));
  report.entries.push_back(c5p.finish("C5_prime", "k'''(s) + 2 delta k''(s) >= 0", tol, false));

  if (!derivative_note.empty()) {
    for (auto id : {"C2", "C4", "C5", "C5_prime"}) report.find(id)->note = "some grid points skipped: " + derivative_note;
  }
  return report;
}

std::optional<double> max_delta_c5_prime(const Kernel& kernel, std::span<const double> t_grid) {
  std::optional<double> best;
  for (double t : t_grid) {
    const double k2 = kernel.eval(t, 2);
    if (!(k2 < 0.0)) continue;
    const double bound = kernel.eval(t, 3) / (-2.0 * k2);
    if (!best || bound < *best) best = bound;
  }
  if (best && !(*best > 0.0)) return std::nullopt;
  return best;
}

}  // namespace nltracer

namespace nltracer {

double weight_truncation_depth(const Kernel& kernel, double tail_tol) {
  require(tail_tol > 0.0 && tail_tol < 1.0, "tail tolerance must lie in (0, 1)");
  if (auto rate = kernel.decay_rate()) return std::log(1.0 / tail_tol) / *rate;
  return kernel.max_time();
}

}  // namespace nltracer
