#include "nltracer/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "nltracer/error.hpp"

namespace nltracer {

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

// Linear interpolation on sorted nodes, zero outside [xs.front(), xs.back()].
double lerp_table(std::span<const double> xs, std::span<const double> ys, double x) {
  if (xs.empty() || x < xs.front() || x > xs.back()) return 0.0;
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  if (it == xs.end()) return ys.back();
  const auto i = static_cast<std::size_t>(it - xs.begin());
  if (i == 0) return ys.front();
  const double w = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
  return (1.0 - w) * ys[i - 1] + w * ys[i];
}

bool strictly_increasing(std::span<const double> v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1])) return false;
  return true;
}

}  // namespace

// --- velocity ----------------------------------------------------------------

VelocityField::VelocityField(Family family) : family_(std::move(family)) {
  std::visit(overloaded{
                 [](const ConstantVelocity&) {},
                 [](const TanhShear& f) { require(f.ell > 0.0, "tanh shear needs ell > 0"); },
                 [](const LinearClip& f) { require(f.x_cap > 0.0, "linear clip needs x_cap > 0"); },
             },
             family_);
}

double VelocityField::u(double x) const {
  return std::visit(overloaded{
                        [](const ConstantVelocity& f) { return f.u0; },
                        [x](const TanhShear& f) { return f.offset + f.u_max * std::tanh(x / f.ell); },
                        [x](const LinearClip& f) {
                          const double ax = std::abs(x);
                          if (ax <= f.x_cap) return f.offset + f.slope * x;
                          const double w = f.x_cap;
                          const double tail = w * 0.5 * std::sqrt(std::numbers::pi) * std::erf((ax - f.x_cap) / w);
                          return f.offset + std::copysign(f.slope * (f.x_cap + tail), x);
                        },
                    },
                    family_);
}

double VelocityField::du(double x) const {
  return std::visit(overloaded{
                        [](const ConstantVelocity&) { return 0.0; },
                        [x](const TanhShear& f) {
                          const double c = std::cosh(x / f.ell);
                          return f.u_max / (f.ell * c * c);
                        },
                        [x](const LinearClip& f) {
                          const double ax = std::abs(x);
                          if (ax <= f.x_cap) return f.slope;
                          const double z = (ax - f.x_cap) / f.x_cap;
                          return f.slope * std::exp(-z * z);
                        },
                    },
                    family_);
}

// --- profiles ----------------------------------------------------------------

Profile::Profile(Family family) : family_(std::move(family)) {
  std::visit(overloaded{
                 [](const GaussianPulse& f) { require(f.sigma > 0.0, "gaussian pulse needs sigma > 0"); },
                 [](const BoxPulse& f) { require(f.width > 0.0, "box pulse needs width > 0"); },
                 [](const TabulatedProfile& f) {
                   require(f.x.size() == f.c.size() && f.x.size() >= 2,
                           "tabulated profile needs matching columns with at least 2 rows");
                   require(strictly_increasing(f.x), "tabulated profile x must be strictly increasing");
                 },
             },
             family_);
}

double Profile::operator()(double x) const {
  return std::visit(overloaded{
                        [x](const GaussianPulse& f) {
                          const double z = (x - f.center) / f.sigma;
                          return f.amplitude * std::exp(-0.5 * z * z);
                        },
                        [x](const BoxPulse& f) {
                          return std::abs(x - f.center) <= 0.5 * f.width ? f.amplitude : 0.0;
                        },
                        [x](const TabulatedProfile& f) { return lerp_table(f.x, f.c, x); },
                    },
                    family_);
}

// --- prehistory ------------------------------------------------------------

double TabulatedInTime::at(double t, double xq) const {
  if (tau.empty() || t < tau.front() || t > tau.back()) {
    std::ostringstream os;
    os << "tau = " << t << " outside tabulated prehistory";
    throw Error(ErrorCode::InsufficientPrehistoryDepth, os.str());
  }
  const std::size_t nx = x.size();
  auto row = [&](std::size_t k) {
    return lerp_table(x, std::span<const double>(values).subspan(k * nx, nx), xq);
  };
  auto it = std::upper_bound(tau.begin(), tau.end(), t);
  if (it == tau.end()) return row(tau.size() - 1);
  const auto k = static_cast<std::size_t>(it - tau.begin());
  if (k == 0) return row(0);
  const double w = (t - tau[k - 1]) / (tau[k] - tau[k - 1]);
  return (1.0 - w) * row(k - 1) + w * row(k);
}

bool is_zero(const Prehistory& p) noexcept { return std::holds_alternative<ZeroPrehistory>(p); }

double prehistory_depth(const Prehistory& p) noexcept {
  if (const auto* tab = std::get_if<TabulatedInTime>(&p)) return tab->depth();
  return std::numeric_limits<double>::infinity();
}

double prehistory_value(const Prehistory& p, double tau, double x) {
  return std::visit(overloaded{
                        [](const ZeroPrehistory&) { return 0.0; },
                        [x](const ConstantInTime& f) { return f.profile(x); },
                        [tau, x](const TabulatedInTime& f) { return f.at(tau, x); },
                    },
                    p);
}

double prehistory_integral(const Prehistory& p, double x, double depth) {
  if (depth <= 0.0) return 0.0;
  return std::visit(
      overloaded{
          [](const ZeroPrehistory&) { return 0.0; },
          [x, depth](const ConstantInTime& f) { return f.profile(x) * depth; },
          [x, depth](const TabulatedInTime& f) {
            if (depth > f.depth() * (1.0 + 1e-12)) {
              std::ostringstream os;
              os << "prehistory covers " << f.depth() << " but " << depth << " was requested";
              throw Error(ErrorCode::InsufficientPrehistoryDepth, os.str());
            }
            // Exact integral of the piecewise-linear-in-tau interpolant over [-depth, 0].
            const double lo = std::max(-depth, f.tau.front());
            double sum = 0.0;
            for (std::size_t k = 0; k + 1 < f.tau.size(); ++k) {
              const double a = std::max(f.tau[k], lo);
              const double b = f.tau[k + 1];
              if (b <= a) continue;
              sum += 0.5 * (b - a) * (f.at(a, x) + f.at(b, x));
            }
            return sum;
          },
      },
      p);
}

// --- alpha0 ------------------------------------------------------------------

std::vector<double> velocity_check_grid(double half_width, std::size_t n) {
  require(half_width > 0.0 && n >= 2, "velocity grid needs L > 0 and n >= 2");
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i)
    g[i] = -half_width + 2.0 * half_width * static_cast<double>(i) / static_cast<double>(n - 1);
  return g;
}

Alpha0Result alpha0(const VelocityField& velocity, const Kernel& kernel, std::span<const double> x_grid) {
  require(!x_grid.empty(), "alpha0 needs a nonempty x grid");
  std::size_t best = 0;
  double sup = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    const double v = velocity.du(x_grid[i]);
    if (v > sup) {
      sup = v;
      best = i;
    }
  }
  double arg = x_grid[best];
  if (x_grid.size() > 1) {
    const double lo = x_grid[best == 0 ? 0 : best - 1];
    const double hi = x_grid[std::min(best + 1, x_grid.size() - 1)];
    constexpr int kRefine = 200;
    for (int j = 0; j <= kRefine; ++j) {
      const double x = lo + (hi - lo) * j / kRefine;
      const double v = velocity.du(x);
      if (v > sup) {
        sup = v;
        arg = x;
      }
    }
  }
  Alpha0Result r;
  r.sup_uprime = sup;
  r.argmax_x = arg;
  r.alpha0 = kernel.eval(0.0) - 0.5 * sup;
  r.holds = r.alpha0 > 0.0;
  return r;
}

// --- validation ------------------------------------------------------------

std::string_view to_string(Severity s) noexcept {
  switch (s) {
    case Severity::Error: return "error";
    case Severity::Warning: return "warning";
    case Severity::Info: return "info";
  }
  return "unknown";
}

bool ValidationResult::has_errors() const {
  return std::any_of(findings.begin(), findings.end(),
                     [](const Finding& f) { return f.severity == Severity::Error; });
}

std::vector<double> kernel_check_grid(const Kernel& kernel, double tail_tol, std::size_t n) {
  if (const auto* tab = std::get_if<TabulatedKernel>(&kernel.family())) {
    std::vector<double> g(n + 1);
    const double lo = tab->t.front();
    const double hi = tab->t.back();
    for (std::size_t i = 0; i <= n; ++i) g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n);
    return g;
  }
  // A zero kernel has a zero horizon; keep a unit grid so the report is defined.
  return uniform_grid(std::max(kernel.horizon(tail_tol), 1.0), n);
}

ValidationResult validate(const ProblemSpec& spec, const ValidationOptions& options) {
  ValidationResult out;
  auto add = [&](Severity s, std::string code, std::string msg, std::optional<double> value = {}) {
    out.findings.push_back(Finding{s, std::move(code), std::move(msg), value});
  };

  if (!(spec.half_width > 0.0)) add(Severity::Error, "domain.half_width", "half-width L must be positive");
  if (!(spec.t_final > 0.0)) add(Severity::Error, "time.t_final", "t_final must be positive");
  if (spec.diffusivity < 0.0)
    add(Severity::Error, "diffusivity.negative", "diffusivity must be nonnegative");
  else if (spec.diffusivity == 0.0)
    add(Severity::Warning, "diffusivity.zero", "decay theory requires D > 0; unit-test mode");

  const double half_width = spec.half_width > 0.0 ? spec.half_width : 1.0;
  const auto xg = velocity_check_grid(half_width);

  double peak = 0.0;
  for (double x : xg) peak = std::max(peak, std::abs(spec.initial_condition(x)));
  const double edge = std::max(std::abs(spec.initial_condition(-half_width)),
                               std::abs(spec.initial_condition(half_width)));
  if (peak == 0.0) {
    add(Severity::Info, "initial_condition.zero", "initial condition is identically zero");
  } else if (!(edge < options.boundary_tol * peak)) {
    add(Severity::Warning, "boundary.not_negligible",
        "initial condition is not negligible at x = +-L", edge / peak);
  }

  // C1 and the kernel conditions.
  out.alpha0 = alpha0(spec.velocity, spec.kernel, xg);
  add(Severity::Info, "alpha0", "alpha0 = k(0) - sup U'/2", out.alpha0.alpha0);

  const auto tg = kernel_check_grid(spec.kernel, options.tail_tol);
  out.delta = options.delta ? options.delta : max_delta_c5_prime(spec.kernel, tg);
  out.conditions = condition_report(spec.kernel, out.delta.value_or(1.0), tg, options.condition_tol,
                                    options.tail_tol);
  if (!out.delta) {
    for (auto id : {"C5", "C5_prime"}) {
      auto* e = out.conditions.find(id);
      e->verdict = Verdict::NotApplicable;
      e->note = "no delta > 0 satisfies C5_prime on the grid and none was given";
    }
  }
  if (auto* c1 = out.conditions.find("C1")) {
    c1->worst_margin = -out.alpha0.alpha0;
    c1->witness = out.alpha0.argmax_x;
    c1->verdict = Verdict::Holds;
    c1->verdict = verdict_from_margin(*c1);
    c1->note = "margin is -alpha0; witness is the argmax of U'";
  }

  std::vector<std::string> required;
  if (options.theorem == Theorem::Theorem1) required = {"C1", "C2"};
  if (options.theorem == Theorem::Theorem2) required = {"C1", "C2", "C3", "C4", "C5_prime"};
  for (const auto& e : out.conditions.entries) {
    const bool needed = std::find(required.begin(), required.end(), e.id) != required.end();
    if (e.verdict == Verdict::Fails) {
      add(needed ? Severity::Error : Severity::Warning, "condition." + e.id,
          e.statement + " fails", e.worst_margin);
    } else if (e.verdict == Verdict::NotApplicable && needed) {
      add(Severity::Warning, "condition." + e.id, e.statement + " could not be judged");
    }
  }

  // Prehistory and the memory backend.
  if (const auto* tab = std::get_if<TabulatedInTime>(&spec.prehistory)) {
    const bool shape_ok = tab->tau.size() >= 2 && strictly_increasing(tab->tau) &&
                          std::abs(tab->tau.back()) <= 1e-12 && strictly_increasing(tab->x) &&
                          tab->values.size() == tab->tau.size() * tab->x.size();
    if (!shape_ok)
      add(Severity::Error, "prehistory.malformed",
          "tabulated prehistory needs increasing tau ending at 0 and a full tau-by-x table");
  }
  if (!is_zero(spec.prehistory) && !options.memory_backend)
    add(Severity::Warning, "prehistory.ignored",
        "the direct backend integrates from t = 0 and ignores the prehistory");
  if (options.cross_validation && !is_zero(spec.prehistory))
    add(Severity::Error, "prehistory.cross_validation", "backend comparison requires zero prehistory");

  if (options.memory_backend) {
    const double s_max = options.s_max.value_or(weight_truncation_depth(spec.kernel, options.tail_tol));
    if (s_max > spec.kernel.max_time())
      add(Severity::Error, "memory.s_max", "s_max exceeds the kernel table", s_max);
    const auto sg = uniform_grid(std::min(s_max, spec.kernel.max_time()), 2000);
    double worst = -std::numeric_limits<double>::infinity();
    for (double s : sg) worst = std::max(worst, spec.kernel.eval(s, 2));
    if (worst > 0.0)
      add(Severity::Error, "memory.negative_weight",
          "history weight -k''(s) is negative somewhere on [0, s_max]", worst);

    const double depth = prehistory_depth(spec.prehistory);
    if (std::holds_alternative<TabulatedInTime>(spec.prehistory) && depth < s_max * (1.0 - 1e-12))
      add(Severity::Error, "prehistory.depth", "tabulated prehistory is shallower than s_max", depth);
    if (const auto* cst = std::get_if<ConstantInTime>(&spec.prehistory); cst && cst->depth < s_max)
      add(Severity::Info, "prehistory.extended", "constant prehistory extended to s_max", s_max);
  }
  return out;
}

}  // namespace nltracer
