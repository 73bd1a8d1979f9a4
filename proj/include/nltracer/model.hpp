#pragma once

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "nltracer/kernel.hpp"

namespace nltracer {

// --- velocity ----------------------------------------------------------------

struct ConstantVelocity {
  double u0 = 0.0;
  bool operator==(const ConstantVelocity&) const = default;
};

/// U(x) = offset + u_max tanh(x / ell).
struct TanhShear {
  double u_max = 0.2;
  double ell = 1.0;
  double offset = 0.0;
  bool operator==(const TanhShear&) const = default;
};

/// U'(x) = slope on |x| <= x_cap, slope exp(-((|x| - x_cap)/x_cap)^2) outside,
/// so U is C^2 and its gradient is bounded by |slope|.
struct LinearClip {
  double slope = 0.1;
  double x_cap = 5.0;
  double offset = 0.0;
  bool operator==(const LinearClip&) const = default;
};

class VelocityField {
 public:
  using Family = std::variant<ConstantVelocity, TanhShear, LinearClip>;

  VelocityField() : family_(ConstantVelocity{}) {}
  explicit VelocityField(Family family);

  double u(double x) const;
  double du(double x) const;

  const Family& family() const noexcept { return family_; }
  bool operator==(const VelocityField&) const = default;

 private:
  Family family_;
};

// --- spatial profiles ------------------------------------------------------

/// amplitude exp(-(x - center)^2 / (2 sigma^2)).
struct GaussianPulse {
  double amplitude = 1.0;
  double center = 0.0;
  double sigma = 1.0;
  bool operator==(const GaussianPulse&) const = default;
};

/// amplitude on |x - center| <= width / 2, zero elsewhere.
struct BoxPulse {
  double amplitude = 1.0;
  double center = 0.0;
  double width = 1.0;
  bool operator==(const BoxPulse&) const = default;
};

/// Piecewise-linear samples, zero outside the sampled range.
struct TabulatedProfile {
  std::vector<double> x;
  std::vector<double> c;
  std::string source;
  bool operator==(const TabulatedProfile& o) const { return x == o.x && c == o.c; }
};

class Profile {
 public:
  using Family = std::variant<GaussianPulse, BoxPulse, TabulatedProfile>;

  Profile() : family_(GaussianPulse{}) {}
  explicit Profile(Family family);

  double operator()(double x) const;
  const Family& family() const noexcept { return family_; }
  bool operator==(const Profile&) const = default;

 private:
  Family family_;
};

// --- prehistory ------------------------------------------------------------

struct ZeroPrehistory {
  bool operator==(const ZeroPrehistory&) const = default;
};

/// C(x, tau) = profile(x) for tau in [-depth, 0); extendable past depth.
struct ConstantInTime {
  Profile profile;
  double depth = 0.0;
  bool operator==(const ConstantInTime&) const = default;
};

/// Samples C(x_i, tau_k) on a tau-grid ending at 0, stored tau-major:
/// values[k * x.size() + i]. Linear in both tau and x; zero outside the x range.
struct TabulatedInTime {
  std::vector<double> tau;
  std::vector<double> x;
  std::vector<double> values;
  std::string source;
  double depth() const { return tau.empty() ? 0.0 : -tau.front(); }
  double at(double tau, double x) const;
  bool operator==(const TabulatedInTime& o) const {
    return tau == o.tau && x == o.x && values == o.values;
  }
};

using Prehistory = std::variant<ZeroPrehistory, ConstantInTime, TabulatedInTime>;

bool is_zero(const Prehistory& p) noexcept;

/// Past concentration C(x, tau) for tau < 0.
double prehistory_value(const Prehistory& p, double tau, double x);

/// Exact integral of the prehistory over tau in [-depth, 0) at fixed x, for
/// depth up to the available record (ConstantInTime extends indefinitely).
double prehistory_integral(const Prehistory& p, double x, double depth);

/// Available prehistory depth; infinity for Zero and ConstantInTime.
double prehistory_depth(const Prehistory& p) noexcept;

// --- problem -----------------------------------------------------------------

struct ProblemSpec {
  double diffusivity = 0.1;
  VelocityField velocity;
  Kernel kernel = Kernel::saturating_exponential(1.0, 0.5, 2.0);
  double half_width = 20.0;
  Profile initial_condition;
  Prehistory prehistory = ZeroPrehistory{};
  double t_final = 20.0;
  bool operator==(const ProblemSpec&) const = default;
};

struct Alpha0Result {
  double alpha0 = 0.0;
  double sup_uprime = 0.0;
  double argmax_x = 0.0;
  bool holds = false;
};

/// alpha0 = k(0) - sup U'/2 over the grid, with one local refinement pass
/// around the grid argmax. holds iff alpha0 > 0.
Alpha0Result alpha0(const VelocityField& velocity, const Kernel& kernel, std::span<const double> x_grid);

/// Grid on [-L, L] used for velocity checks.
std::vector<double> velocity_check_grid(double half_width, std::size_t n = 4001);

enum class Severity { Error, Warning, Info };
std::string_view to_string(Severity s) noexcept;

struct Finding {
  Severity severity = Severity::Info;
  std::string code;
  std::string message;
  std::optional<double> value;
};

enum class Theorem { None, Theorem1, Theorem2 };

struct ValidationOptions {
  Theorem theorem = Theorem::None;
  bool memory_backend = false;    // memory or both
  bool cross_validation = false;  // both
  std::optional<double> s_max;
  std::optional<double> delta;  // C5 / C5_prime delta; auto from C5_prime when empty
  double boundary_tol = 1e-8;
  double condition_tol = 1e-9;
  double tail_tol = 1e-10;
};

struct ValidationResult {
  std::vector<Finding> findings;
  Alpha0Result alpha0;
  ConditionReport conditions;
  std::optional<double> delta;  // delta used for C5/C5_prime
  bool has_errors() const;
};

/// Grid of kernel times used by validation: [0, T_tail] for parametric
/// kernels, the table range for tabulated ones.
std::vector<double> kernel_check_grid(const Kernel& kernel, double tail_tol = 1e-10, std::size_t n = 4000);

/// Pure aggregation of the admissibility checks for a spec.
ValidationResult validate(const ProblemSpec& spec, const ValidationOptions& options = {});

}  // namespace nltracer
