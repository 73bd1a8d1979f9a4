#include <doctest.h>

#include <cmath>

#include "nltracer/error.hpp"
#include "nltracer/kernel.hpp"

using namespace nltracer;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an nltracer::Error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("saturating exponential values and derivatives") {
  const auto k = Kernel::saturating_exponential(1.0, 0.5, 2.0);
  CHECK(k.eval(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(k.eval(0.0, 1) == doctest::Approx(1.0).epsilon(1e-15));
  // Hand-differentiated: k' = b g e^{-gt}, k'' = -b g^2 e^{-gt}, k''' = b g^3 e^{-gt}.
  for (double t : {0.0, 0.3, 1.7, 6.0}) {
    const double e = std::exp(-2.0 * t);
    CHECK(std::abs(k.eval(t) - (1.0 - 0.5 * e)) <= 1e-12 * std::abs(1.0 - 0.5 * e));
    CHECK(std::abs(k.eval(t, 1) - e) <= 1e-12 * e);
    CHECK(std::abs(k.eval(t, 2) + 2.0 * e) <= 1e-12 * 2.0 * e);
    CHECK(std::abs(k.eval(t, 3) - 4.0 * e) <= 1e-12 * 4.0 * e);
  }
}

TEST_CASE("exponential decay tail value") {
  const auto k = Kernel::exponential_decay(1.0, 1.0);
  CHECK(k.eval(20.0) == doctest::Approx(std::exp(-20.0)).epsilon(1e-13));
  CHECK(k.eval(20.0) == doctest::Approx(2.06e-9).epsilon(1e-2));
}

TEST_CASE("eval rejects negative time and bad orders") {
  const auto k = Kernel::exponential_decay(1.0, 1.0);
  CHECK(code_of([&] { k.eval(-1e-3); }) == ErrorCode::NegativeTime);
  CHECK(code_of([&] { k.eval(1.0, 4); }) == ErrorCode::UnsupportedOrder);
}

TEST_CASE("constructor validation") {
  CHECK(code_of([] { Kernel::saturating_exponential(0.4, 0.5, 1.0); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { Kernel::saturating_exponential(1.0, 0.5, 0.0); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { Kernel::exponential_decay(1.0, -1.0); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { Kernel::tabulated({0, 1, 1, 2}, {1, 1, 1, 1}); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { Kernel::tabulated({0, 1, 2, 3}, {1, 0, 1, 1}); }) == ErrorCode::InvalidArgument);
  CHECK_NOTHROW(Kernel::exponential_decay(0.0, 1.0));  // k = 0 reduction
}

TEST_CASE("analytic derivatives agree with central differences at second order") {
  const auto k = Kernel::saturating_exponential(1.0, 0.5, 2.0);
  const double t = 0.8;
  for (int d = 1; d <= 3; ++d) {
    auto err = [&](double h) {
      const double fd = (k.eval(t + h, d - 1) - k.eval(t - h, d - 1)) / (2 * h);
      return std::abs(fd - k.eval(t, d));
    };
    const double order = std::log2(err(1e-2) / err(5e-3));
    CHECK(order >= 1.9);
  }
}

TEST_CASE("tabulated kernel follows the sampled function") {
  std::vector<double> t, v;
  for (int i = 0; i <= 400; ++i) {
    t.push_back(i * 0.05);
    v.push_back(std::exp(-t.back()));
  }
  const auto k = Kernel::tabulated(t, v, 1e-3);
  CHECK(k.eval(1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-4));
  CHECK(k.eval(1.0, 1) == doctest::Approx(-std::exp(-1.0)).epsilon(1e-2));
  CHECK(k.eval(1.0, 2) == doctest::Approx(std::exp(-1.0)).epsilon(5e-2));
  CHECK(code_of([&] { k.eval(25.0); }) == ErrorCode::OutOfRange);
  CHECK(k.max_time() == doctest::Approx(20.0));
  CHECK_FALSE(k.decay_rate().has_value());
}

TEST_CASE("tabulated higher derivatives fail when the stencil leaves the table") {
  const auto k = Kernel::tabulated({0.0, 1e-3, 2e-3, 3e-3}, {1.0, 0.9, 0.8, 0.7}, 5e-3);
  CHECK(code_of([&] { k.eval(1e-3, 2); }) == ErrorCode::UnsupportedOrder);
}

TEST_CASE("l1 norms") {
  SUBCASE("exponential decay: |k|_1 = |k'|_1 = 1, K = 5") {
    const auto n = l1_norms(Kernel::exponential_decay(1.0, 1.0));
    REQUIRE(n.k_l1.has_value());
    CHECK(*n.k_l1 == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(n.kp_l1 == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(n.kpp_l1 == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(std::pow(*n.k_l1, 2) + 4 * std::pow(n.kp_l1, 2) == doctest::Approx(5.0).epsilon(1e-8));
  }
  SUBCASE("saturating exponential: k diverges, |k'|_1 = b") {
    const auto n = l1_norms(Kernel::saturating_exponential(1.0, 0.5, 2.0));
    CHECK_FALSE(n.k_l1.has_value());
    CHECK(n.kp_l1 == doctest::Approx(0.5).epsilon(1e-8));
  }
  SUBCASE("extending the horizon never lowers the value by more than tail_tol") {
    const auto k = Kernel::exponential_decay(2.0, 0.5);
    const auto a = l1_norms(k, 1e-6);
    const auto b = l1_norms(k, 1e-10);
    CHECK(*b.k_l1 >= *a.k_l1 - 1e-6);
    CHECK(*b.k_l1 == doctest::Approx(4.0).epsilon(1e-9));
  }
}

TEST_CASE("lemma constants for fixed candidates") {
  const auto grid = uniform_grid(40.0, 4000);
  SUBCASE("e^{-t} with beta0 = 0.5, gamma = 1") {
    const auto c = lemma_constants_for(Kernel::exponential_decay(1.0, 1.0), 0.5, 1.0, grid);
    CHECK(c.big_k == doctest::Approx(5.0).epsilon(1e-8));
    CHECK(c.bound_factor == doctest::Approx(2.5).epsilon(1e-8));
    CHECK(c.min_margin > 0.0);
  }
  SUBCASE("2 e^{-t/2} with beta0 = 1, gamma = 0.5") {
    const auto c = lemma_constants_for(Kernel::exponential_decay(2.0, 0.5), 1.0, 0.5, uniform_grid(80.0, 4000));
    CHECK(c.big_k == doctest::Approx(32.0).epsilon(1e-8));
    CHECK(c.bound_factor == doctest::Approx(64.0).epsilon(1e-8));
  }
  SUBCASE("a candidate above the kernel is rejected") {
    CHECK(code_of([&] { lemma_constants_for(Kernel::exponential_decay(1.0, 1.0), 1.5, 1.0, grid); }) ==
          ErrorCode::NoValidConstants);
  }
  SUBCASE("saturating kernel is not applicable") {
    CHECK(code_of([&] { lemma_constants(Kernel::saturating_exponential(1.0, 0.5, 2.0), grid); }) ==
          ErrorCode::NotApplicable);
  }
}

TEST_CASE("lemma constant search re-checks at ten times the density") {
  const auto k = Kernel::exponential_decay(2.0, 0.5);
  const auto c = lemma_constants(k, uniform_grid(80.0, 800));
  CHECK(c.gamma == 1.0);  // admissible, so preferred
  CHECK(c.beta0 > 0.0);
  for (double t : uniform_grid(80.0, 8000)) CHECK(k.eval(t) - c.beta0 * std::exp(-c.gamma * t) > 0.0);
}

TEST_CASE("condition report on the worked examples") {
  const auto grid = uniform_grid(12.0, 4000);
  const auto sat = Kernel::saturating_exponential(1.0, 0.5, 2.0);

  SUBCASE("delta = 3: C2, C4 and printed C5 hold") {
    const auto r = condition_report(sat, 3.0, grid);
    CHECK(r.find("C2")->verdict == Verdict::Holds);
    CHECK(r.find("C4")->verdict == Verdict::Holds);
    CHECK(r.find("C5")->verdict == Verdict::Holds);
    CHECK(r.find("C5")->worst_margin < 0.0);
    CHECK(r.find("C1")->verdict == Verdict::NotApplicable);
  }
  SUBCASE("delta = 1: printed C5 fails at t = 0 with margin +2") {
    const auto r = condition_report(sat, 1.0, grid);
    const auto* c5 = r.find("C5");
    CHECK(c5->verdict == Verdict::Fails);
    CHECK(c5->worst_margin == doctest::Approx(2.0).epsilon(1e-12));
    REQUIRE(c5->witness.has_value());
    CHECK(*c5->witness == 0.0);
    CHECK(r.find("C5_prime")->verdict == Verdict::Holds);  // 4 - 4 = 0 at equality
  }
  SUBCASE("exponential decay: C2 fails") {
    const auto r = condition_report(Kernel::exponential_decay(1.0, 1.0), 1.0, grid);
    const auto* c2 = r.find("C2");
    CHECK(c2->verdict == Verdict::Fails);
    CHECK(c2->worst_margin == doctest::Approx(1.0));
    CHECK(*c2->witness == 0.0);
  }
  SUBCASE("verdicts are reproducible from the stored margins") {
    for (double delta : {0.5, 1.0, 3.0}) {
      const auto r = condition_report(sat, delta, grid);
      for (const auto& e : r.entries) CHECK(verdict_from_margin(e) == e.verdict);
    }
  }
  SUBCASE("a clear verdict does not flip at double density") {
    const auto coarse = condition_report(sat, 3.0, grid);
    const auto fine = condition_report(sat, 3.0, uniform_grid(12.0, 8000));
    for (const auto& e : coarse.entries)
      if (e.verdict == Verdict::Holds && std::abs(e.worst_margin) > 10 * e.tolerance)
        CHECK(fine.find(e.id)->verdict == Verdict::Holds);
  }
}

TEST_CASE("largest delta passing C5_prime") {
  const auto d = max_delta_c5_prime(Kernel::saturating_exponential(1.0, 0.5, 2.0), uniform_grid(12.0, 1000));
  REQUIRE(d.has_value());
  CHECK(*d == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("weight truncation depth") {
  CHECK(weight_truncation_depth(Kernel::saturating_exponential(1.0, 0.5, 2.0), 1e-10) ==
        doctest::Approx(std::log(1e10) / 2.0));
}

TEST_CASE("lemma constant search falls back to the rung nearest 1") {
  const auto k = Kernel::exponential_decay(1.0, 2.0);
  const auto c = lemma_constants(k, uniform_grid(20.0, 2000));
  CHECK(c.gamma == doctest::Approx(2.0));
  CHECK(c.bound_factor == doctest::Approx(c.beta0 * c.big_k / 2.0));
}
