#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "condex/elliptic.hpp"
#include "helpers.hpp"

#include <cmath>

using namespace condex;
using namespace condex::testing;

namespace {
// invariants of the worked sphere scenario
constexpr double kG2 = 4.75, kG3 = 1.875;
}  // namespace

TEST_CASE("leading Laurent behaviour") {
  const WpValue v = wp_eval(Cx(0.01, 0.0), kG2, kG3);
  CHECK(std::abs(v.p - Cx(1e4, 0.0)) / 1e4 <= 1e-3);
  CHECK(std::abs(v.dp - Cx(-2e6, 0.0)) / 2e6 <= 1e-3);
}

TEST_CASE("differential equation at random arguments") {
  auto g = rng(3);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  const double pairs[][2] = {{kG2, kG3}, {1.17393, -0.220814}, {2.0, -1.3}};
  for (const auto& gg : pairs) {
    int checked = 0;
    while (checked < 100) {
      const Cx z(u(g), u(g));
      if (std::abs(z) < 0.05) continue;
      WpValue v;
      try {
        v = wp_eval(z, gg[0], gg[1]);
      } catch (const std::domain_error&) {
        continue;  // near a lattice point
      }
      const Cx lhs = v.dp * v.dp;
      const Cx rhs = 4.0 * v.p * v.p * v.p - gg[0] * v.p - gg[1];
      const double scale = std::max(1.0, std::abs(lhs));
      CHECK(std::abs(lhs - rhs) / scale <= 1e-9);
      ++checked;
    }
  }
}

TEST_CASE("evenness") {
  auto g = rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  int checked = 0;
  while (checked < 50) {
    const Cx z(u(g), u(g));
    if (std::abs(z) < 0.1) continue;
    WpValue a, b;
    try {
      a = wp_eval(z, kG2, kG3);
      b = wp_eval(-z, kG2, kG3);
    } catch (const std::domain_error&) {
      continue;
    }
    CHECK(std::abs(a.p - b.p) <= 1e-10 * std::max(1.0, std::abs(a.p)));
    CHECK(std::abs(a.dp + b.dp) <= 1e-10 * std::max(1.0, std::abs(a.dp)));
    ++checked;
  }
}

TEST_CASE("cubic roots of the worked invariants") {
  const auto e = wp_roots(kG2, kG3);
  CHECK(e[0].real() == doctest::Approx(1.25).epsilon(1e-12));
  CHECK(e[1].real() == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(e[2].real() == doctest::Approx(-0.75).epsilon(1e-12));
  for (const auto& r : e) CHECK(std::abs(r.imag()) <= 1e-12);
}

TEST_CASE("real period and imaginary scale against the published shift") {
  // the published shift a = 1.14811 + 1.74899i sits at the half-period
  // omega_1 + omega_3 of this lattice
  const double half = wp_real_period(kG2, kG3) / 2.0;
  CHECK(half == doctest::Approx(1.14811).epsilon(2e-5));
  // independent complete-elliptic-integral oracle via the AGM:
  // int_0^inf du / sqrt((u^2 + (e1-e3))(u^2 + (e2-e3))) = K(k)/sqrt(e1-e3),
  // k^2 = 1 - (e2-e3)/(e1-e3)
  const auto e = wp_roots(kG2, kG3);
  const double a2 = (e[0] - e[2]).real(), b2 = (e[1] - e[2]).real();
  double am = 1.0, gm = std::sqrt(b2 / a2);
  for (int i = 0; i < 40 && std::abs(am - gm) > 1e-16; ++i) {
    const double m = 0.5 * (am + gm);
    gm = std::sqrt(am * gm);
    am = m;
  }
  const double K = M_PI / (2.0 * am);
  const double w3_oracle = K / std::sqrt(a2);
  CHECK(wp_imag_scale(kG2, kG3) == doctest::Approx(w3_oracle).epsilon(1e-12));
  // the published digits are good to ~3e-4 relative
  CHECK(wp_imag_scale(kG2, kG3) == doctest::Approx(1.74899).epsilon(3e-4));
}

TEST_CASE("periodicity along the real axis") {
  const double T = wp_real_period(kG2, kG3);
  auto g = rng(11);
  std::uniform_real_distribution<double> u(0.1, 0.9);
  for (int i = 0; i < 10; ++i) {
    const Cx z(u(g) * T, 0.21);
    const WpValue a = wp_eval(z, kG2, kG3);
    const WpValue b = wp_eval(z + 5.0 * T, kG2, kG3);
    CHECK(std::abs(a.p - b.p) <= 1e-9 * std::max(1.0, std::abs(a.p)));
    CHECK(std::abs(a.dp - b.dp) <= 1e-8 * std::max(1.0, std::abs(a.dp)));
  }
}

TEST_CASE("half-period values are the cubic roots") {
  const double w1 = wp_real_period(kG2, kG3) / 2.0;
  const double w3i = wp_imag_scale(kG2, kG3);
  const auto e = wp_roots(kG2, kG3);
  CHECK(std::abs(wp_eval(Cx(w1, 0), kG2, kG3).p - e[0]) <= 1e-8);
  CHECK(std::abs(wp_eval(Cx(0, w3i), kG2, kG3).p - e[2]) <= 1e-8);
  CHECK(std::abs(wp_eval(Cx(w1, w3i), kG2, kG3).p - e[1]) <= 1e-8);
}

TEST_CASE("find_shift at a turning point of the worked scenario") {
  // wp(a) = x3(0)^2 + delta = 0.25 - 0.75 = -0.5, wp'(a) = 0
  const Cx a = wp_find_shift(-0.5, 0.0, kG2, kG3);
  const WpValue v = wp_eval(a, kG2, kG3);
  CHECK(std::abs(v.p - Cx(-0.5, 0.0)) <= 1e-9);
  CHECK(std::abs(v.dp) <= 1e-9);
  // the half-period location, up to lattice and sign
  const double w1 = wp_real_period(kG2, kG3) / 2.0;
  const double w3i = wp_imag_scale(kG2, kG3);
  const double rx = std::fmod(std::abs(a.real()), 2.0 * w1);
  const double ry = std::fmod(std::abs(a.imag()), 2.0 * w3i);
  CHECK(std::min(std::abs(rx - w1), std::abs(rx - w1 * 3)) <= 1e-6);
  CHECK(std::abs(ry - w3i) <= 1e-6);
}

TEST_CASE("find_shift with generic data round trips") {
  // wp is real on the real axis and on the line Im(z) = omega_3/i; targets
  // taken there give solvable (p0, dp0) pairs.
  auto g = rng(13);
  std::uniform_real_distribution<double> u(0.15, 0.85);
  const double T = wp_real_period(kG2, kG3);
  const double w3i = wp_imag_scale(kG2, kG3);
  for (int i = 0; i < 10; ++i) {
    const Cx z = (i % 2 == 0) ? Cx(u(g) * T, 0.0) : Cx(u(g) * T, w3i);
    const WpValue v = wp_eval(z, kG2, kG3);
    REQUIRE(std::abs(v.p.imag()) <= 1e-9 * std::max(1.0, std::abs(v.p)));
    const Cx a = wp_find_shift(v.p.real(), v.dp.real(), kG2, kG3);
    const WpValue w = wp_eval(a, kG2, kG3);
    CHECK(std::abs(w.p - v.p) <= 1e-8 * std::max(1.0, std::abs(v.p)));
    CHECK(std::abs(w.dp - v.dp) <= 1e-6 * std::max(1.0, std::abs(v.dp)));
  }
  // inconsistent data violates the curve equation
  CHECK_THROWS_AS(wp_find_shift(1.0, 1.0, kG2, kG3), std::invalid_argument);
}

TEST_CASE("lattice-point proximity is reported") {
  CHECK_THROWS_AS(wp_eval(Cx(0.0, 0.0), kG2, kG3), std::domain_error);
  const double T = wp_real_period(kG2, kG3);
  CHECK_THROWS_AS(wp_eval(Cx(T, 0.0) * 4.0, kG2, kG3), std::domain_error);
}

TEST_CASE("degenerate discriminant has no finite period") {
  // g2 = 12, g3 = -8: 4t^3 - 12t + 8 = 4(t-1)^2(t+2), repeated root
  CHECK_THROWS_AS(wp_real_period(12.0, -8.0), std::domain_error);
}
