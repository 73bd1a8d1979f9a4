#include <doctest.h>

#include <cmath>

#include "nltracer/model.hpp"

using namespace nltracer;

namespace {

const Finding* find(const ValidationResult& v, const std::string& code) {
  for (const auto& f : v.findings)
    if (f.code == code) return &f;
  return nullptr;
}

}  // namespace

TEST_CASE("alpha0 examples") {
  const auto grid = velocity_check_grid(20.0);
  const auto k = Kernel::saturating_exponential(1.0, 0.5, 2.0);

  SUBCASE("constant velocity") {
    const auto a = alpha0(VelocityField(ConstantVelocity{0.3}), k, grid);
    CHECK(a.alpha0 == doctest::Approx(0.5));
    CHECK(a.holds);
  }
  SUBCASE("tanh shear") {
    const auto a = alpha0(VelocityField(TanhShear{0.2, 1.0, 0.0}), k, grid);
    CHECK(a.sup_uprime == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(a.argmax_x == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(a.alpha0 == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(a.holds);
  }
  SUBCASE("k(0) = 0 gives alpha0 = 0, which fails") {
    const auto a = alpha0(VelocityField(ConstantVelocity{0.0}), Kernel::saturating_exponential(1.0, 1.0, 1.0), grid);
    CHECK(a.alpha0 == 0.0);
    CHECK_FALSE(a.holds);
  }
  SUBCASE("shifting U by a constant leaves alpha0 unchanged") {
    const auto a = alpha0(VelocityField(TanhShear{0.2, 1.3, 0.0}), k, grid);
    const auto b = alpha0(VelocityField(TanhShear{0.2, 1.3, 0.7}), k, grid);
    CHECK(a.alpha0 == b.alpha0);
  }
}

TEST_CASE("velocity gradients match finite differences") {
  for (const auto& v : {VelocityField(TanhShear{0.2, 1.0, 0.1}), VelocityField(LinearClip{0.1, 5.0, 0.0})}) {
    for (double x : {-7.3, -2.0, 0.4, 5.5, 9.0}) {
      auto err = [&](double h) { return std::abs((v.u(x + h) - v.u(x - h)) / (2 * h) - v.du(x)); };
      CHECK(err(1e-3) < 1e-6);
    }
  }
  const VelocityField clip(LinearClip{0.1, 5.0, 0.0});
  CHECK(clip.du(3.0) == doctest::Approx(0.1));
  CHECK(clip.du(12.0) < 0.1);
  CHECK(clip.u(-4.0) == doctest::Approx(-0.4));
}

TEST_CASE("profiles") {
  CHECK(Profile(GaussianPulse{2.0, 1.0, 0.5})(1.0) == doctest::Approx(2.0));
  CHECK(Profile(BoxPulse{3.0, 0.0, 2.0})(0.99) == 3.0);
  CHECK(Profile(BoxPulse{3.0, 0.0, 2.0})(1.01) == 0.0);
  const Profile tab(TabulatedProfile{{0.0, 1.0, 2.0}, {0.0, 2.0, 0.0}, {}});
  CHECK(tab(0.5) == doctest::Approx(1.0));
  CHECK(tab(-1.0) == 0.0);
}

TEST_CASE("prehistory integrals") {
  const ConstantInTime p{Profile(GaussianPulse{1.0, 0.0, std::sqrt(0.5)}), 5.0};
  // g(x) = e^{-x^2}; eta0(x, 2) = 2 e^{-x^2}.
  CHECK(prehistory_integral(p, 0.7, 2.0) == doctest::Approx(2.0 * std::exp(-0.49)).epsilon(1e-14));
  CHECK(prehistory_integral(ZeroPrehistory{}, 0.7, 2.0) == 0.0);

  TabulatedInTime tab;
  tab.tau = {-2.0, -1.0, 0.0};
  tab.x = {-1.0, 1.0};
  tab.values = {0.0, 0.0, 1.0, 1.0, 2.0, 2.0};  // C = tau + 2
  CHECK(tab.depth() == 2.0);
  CHECK(prehistory_integral(tab, 0.0, 2.0) == doctest::Approx(2.0));
  CHECK(prehistory_integral(tab, 0.0, 1.0) == doctest::Approx(1.5));
}

TEST_CASE("validate") {
  ProblemSpec spec;
  spec.velocity = VelocityField(TanhShear{0.2, 1.0, 0.0});

  SUBCASE("admissible spec for Theorem 1 has no errors and reports alpha0") {
    ValidationOptions o;
    o.theorem = Theorem::Theorem1;
    const auto v = validate(spec, o);
    CHECK_FALSE(v.has_errors());
    const auto* a = find(v, "alpha0");
    REQUIRE(a != nullptr);
    CHECK(a->severity == Severity::Info);
    CHECK(*a->value == doctest::Approx(0.4));
  }
  SUBCASE("fat pulse warns about the boundary") {
    spec.initial_condition = Profile(GaussianPulse{1.0, 0.0, 20.0});
    const auto v = validate(spec);
    const auto* f = find(v, "boundary.not_negligible");
    REQUIRE(f != nullptr);
    CHECK(f->severity == Severity::Warning);
  }
  SUBCASE("D = 0 warns") {
    spec.diffusivity = 0.0;
    const auto v = validate(spec);
    const auto* f = find(v, "diffusivity.zero");
    REQUIRE(f != nullptr);
    CHECK(f->message == "decay theory requires D > 0; unit-test mode");
  }
  SUBCASE("exponential decay kernel under Theorem 2 fails C2") {
    spec.kernel = Kernel::exponential_decay(1.0, 1.0);
    ValidationOptions o;
    o.theorem = Theorem::Theorem2;
    o.memory_backend = true;
    const auto v = validate(spec, o);
    CHECK(v.has_errors());
    const auto* f = find(v, "condition.C2");
    REQUIRE(f != nullptr);
    CHECK(f->severity == Severity::Error);
  }
  SUBCASE("short prehistory for the memory backend is an error") {
    spec.prehistory = ConstantInTime{Profile(), 1.0};
    TabulatedInTime tab;
    tab.tau = {-1.0, 0.0};
    tab.x = {-1.0, 1.0};
    tab.values = {1.0, 1.0, 1.0, 1.0};
    spec.prehistory = tab;
    ValidationOptions o;
    o.memory_backend = true;
    o.s_max = 5.0;
    const auto v = validate(spec, o);
    const auto* f = find(v, "prehistory.depth");
    REQUIRE(f != nullptr);
    CHECK(f->severity == Severity::Error);
  }
  SUBCASE("validation is pure") {
    const auto copy = spec;
    const auto a = validate(spec);
    const auto b = validate(spec);
    CHECK(spec == copy);
    REQUIRE(a.findings.size() == b.findings.size());
    for (std::size_t i = 0; i < a.findings.size(); ++i) CHECK(a.findings[i].code == b.findings[i].code);
  }
}
