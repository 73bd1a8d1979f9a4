#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace nltracer {

/// k(t) = a - b exp(-gamma_k t), a >= b > 0, gamma_k > 0.
struct SaturatingExponential {
  double a = 1.0;
  double b = 0.5;
  double gamma_k = 2.0;
  bool operator==(const SaturatingExponential&) const = default;
};

/// k(t) = beta exp(-gamma_k t), gamma_k > 0. beta > 0 for a genuine kernel;
/// beta = 0 gives k = 0, the heat-equation reduction.
struct ExponentialDecay {
  double beta = 1.0;
  double gamma_k = 1.0;
  bool operator==(const ExponentialDecay&) const = default;
};

/// Sampled kernel evaluated through a monotone (PCHIP) cubic.
/// Orders 2 and 3 are finite differences of the interpolant's slope with
/// stencil width `h_fd`, so they lose accuracy wherever the table is coarse.
struct TabulatedKernel {
  std::vector<double> t;
  std::vector<double> k;
  double h_fd = 1e-3;
  std::string source;  // CSV path the table was read from, empty when inline
  bool operator==(const TabulatedKernel& o) const {
    return t == o.t && k == o.k && h_fd == o.h_fd;
  }
};

class Kernel {
 public:
  using Family = std::variant<SaturatingExponential, ExponentialDecay, TabulatedKernel>;

  explicit Kernel(Family family);

  static Kernel saturating_exponential(double a, double b, double gamma_k);
  static Kernel exponential_decay(double beta, double gamma_k);
  static Kernel tabulated(std::vector<double> t, std::vector<double> k, double h_fd = 1e-3);

  /// d-th derivative of k at t >= 0, d in 0..3.
  double eval(double t, int order = 0) const;

  const Family& family() const noexcept { return family_; }
  std::string_view family_name() const noexcept;

  /// Exponential rate of the parametric families; empty for tables.
  std::optional<double> decay_rate() const noexcept;

  /// Time after which every derivative envelope (orders 0..3, excluding the
  /// constant part of k) integrates to less than `tail_tol`. For tables this
  /// is the last sample time.
  double horizon(double tail_tol) const;

  /// Largest t at which eval() is defined (infinity for parametric kernels).
  double max_time() const noexcept;

  bool operator==(const Kernel& o) const { return family_ == o.family_; }

 private:
  struct Pchip;
  Family family_;
  std::shared_ptr<const Pchip> pchip_;  // set for tables only

  double table_value(double t) const;
  double table_slope(double t) const;
};

// --- integrability ---------------------------------------------------------

struct L1Norms {
  std::optional<double> k_l1;  // empty means divergent
  double kp_l1 = 0.0;
  double kpp_l1 = 0.0;
  double horizon = 0.0;  // truncation point actually used
};

L1Norms l1_norms(const Kernel& kernel, double tail_tol = 1e-10);

// --- lemma constants -------------------------------------------------------

struct LemmaConstants {
  double beta0 = 0.0;
  double gamma = 1.0;
  double big_k = 0.0;
  double bound_factor = 0.0;
  double min_margin = 0.0;  // min over the grid of k(t) - beta0 exp(-gamma t)
};

/// Uniform evaluation grid on [0, T] with n + 1 points.
std::vector<double> uniform_grid(double t_end, std::size_t n);

/// Checks one candidate pair on `grid`; throws NoValidConstants when the
/// margin k - beta0 exp(-gamma t) is not strictly positive everywhere.
LemmaConstants lemma_constants_for(const Kernel& kernel, double beta0, double gamma,
                                   std::span<const double> grid, double tail_tol = 1e-10);

/// Searches gamma over 2^-4..2^4 (scaled by the kernel's decay rate, plus
/// gamma = 1), bisecting beta0 at each rung. Picks gamma = 1 when it admits a
/// positive beta0, otherwise the admissible rung closest to 1 in log scale.
LemmaConstants lemma_constants(const Kernel& kernel, std::span<const double> search_grid,
                               double tail_tol = 1e-10);

// --- kernel condition report ----------------------------------------------

enum class Verdict { Holds, Fails, NotApplicable };
std::string_view to_string(Verdict v) noexcept;

struct ConditionEntry {
  std::string id;
  std::string statement;
  Verdict verdict = Verdict::NotApplicable;
  /// Largest value of the residual g where the condition reads g <= 0 (or
  /// g < 0 for strict conditions). Positive margins are violations.
  double worst_margin = 0.0;
  std::optional<double> witness;  // t (or x for C1) where worst_margin occurs
  double tolerance = 0.0;
  bool strict = false;
  std::string note;
  bool operator==(const ConditionEntry&) const = default;
};

struct ConditionReport {
  std::vector<ConditionEntry> entries;
  const ConditionEntry* find(std::string_view id) const;
  ConditionEntry* find(std::string_view id);
};

/// Judges C2, C2_L1, C3, C4, C5 (as printed: k''' + delta k'' <= 0) and
/// C5_prime (k''' + 2 delta k'' >= 0) independently on `t_grid`. C1 needs the
/// velocity field and is left not-applicable here (see model::alpha0).
ConditionReport condition_report(const Kernel& kernel, double delta,
                                 std::span<const double> t_grid, double tol = 1e-9,
                                 double tail_tol = 1e-10);

/// Re-derives an entry's verdict from its stored margin and tolerance.
Verdict verdict_from_margin(const ConditionEntry& entry) noexcept;

/// Depth where the history weight -k''(s) drops below tail_tol times its
/// value at s = 0: ln(1/tail_tol)/gamma_k for parametric kernels, the table
/// end for tabulated ones.
double weight_truncation_depth(const Kernel& kernel, double tail_tol = 1e-10);

/// Largest delta with k''' + 2 delta k'' >= 0 on the grid points where k'' < 0.
/// Empty when k'' >= 0 everywhere on the grid or the bound is not positive.
std::optional<double> max_delta_c5_prime(const Kernel& kernel, std::span<const double> t_grid);

}  // namespace nltracer
