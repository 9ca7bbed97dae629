#include "condex/elliptic.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace condex {

namespace {

constexpr int kCoeffCount = 13;  // c_2 .. c_12 populate indices 2..12

// Laurent coefficients of wp(z) = z^-2 + sum_{k>=2} c_k z^{2k-2}.
std::array<double, kCoeffCount> laurent_coeffs(double g2, double g3) {
  std::array<double, kCoeffCount> c{};
  c[2] = g2 / 20.0;
  c[3] = g3 / 28.0;
  for (int k = 4; k < kCoeffCount; ++k) {
    double acc = 0.0;
    for (int m = 2; m <= k - 2; ++m) acc += c[m] * c[k - m];
    c[k] = 3.0 * acc / ((2 * k + 1) * (k - 3));
  }
  return c;
}

WpValue wp_series(Cx z, const std::array<double, kCoeffCount>& c) {
  const Cx z2 = z * z;
  Cx p = 0.0, dp = 0.0;
  for (int k = kCoeffCount - 1; k >= 2; --k) {
    p = p * z2 + c[k];
    dp = dp * z2 + static_cast<double>(2 * k - 2) * c[k];
  }
  // p  = 1/z^2 + z^2 (c2 + c3 z^2 + ...)
  // dp = -2/z^3 + z  (2 c2 + 4 c3 z^2 + ...)
  p = p * z2 + 1.0 / z2;
  dp = dp * z - 2.0 / (z2 * z);
  return {p, dp};
}

// One step of the duplication formula for (wp, wp').
WpValue wp_double(const WpValue& v, double g2) {
  const Cx u = v.p, du = v.dp;
  if (std::abs(du) < 1e-140)
    throw std::domain_error(
        "wp_eval: halving hit a half-period; argument is at or near a "
        "lattice point");
  const Cx ddu = 6.0 * u * u - g2 / 2.0;  // wp''
  const Cx p2 = -2.0 * u + (ddu * ddu) / (4.0 * du * du);
  // d/dz of the duplication formula, divided by 2.
  const Cx dp2 =
      -du + (12.0 * u * ddu * du * du - ddu * ddu * ddu) / (4.0 * du * du * du);
  return {p2, dp2};
}

}  // namespace

WpValue wp_eval(Cx z, double g2, double g3) {
  if (std::abs(z) < 1e-150)
    throw std::domain_error("wp_eval: argument at lattice point (origin)");
  const auto c = laurent_coeffs(g2, g3);

  // Reduce until the first omitted series term (~c_13 z^24) is negligible.
  double r = 0.35;
  const double c12 = std::abs(c[12]);
  if (c12 > 0.0) r = std::min(r, std::pow(1e-19 / c12, 1.0 / 22.0));

  int halvings = 0;
  Cx zs = z;
  while (std::abs(zs) > r && halvings < 60) {
    zs *= 0.5;
    ++halvings;
  }

  WpValue v = wp_series(zs, c);
  for (int i = 0; i < halvings; ++i) {
    v = wp_double(v, g2);
    if (std::abs(v.p) > 1e14)
      throw std::domain_error("wp_eval: pole proximity (lattice point)");
  }
  return v;
}

std::array<Cx, 3> wp_roots(double g2, double g3) {
  // 4t^3 - g2 t - g3 = 0 via the companion matrix of t^3 - (g2/4) t - (g3/4).
  Eigen::Matrix3d comp = Eigen::Matrix3d::Zero();
  comp(1, 0) = 1.0;
  comp(2, 1) = 1.0;
  comp(0, 2) = g3 / 4.0;
  comp(1, 2) = g2 / 4.0;
  Eigen::EigenSolver<Eigen::Matrix3d> es(comp);
  std::array<Cx, 3> roots{es.eigenvalues()[0], es.eigenvalues()[1],
                          es.eigenvalues()[2]};
  std::sort(roots.begin(), roots.end(),
            [](const Cx& a, const Cx& b) { return a.real() > b.real(); });
  return roots;
}

namespace {

// 16-point Gauss-Legendre nodes/weights on [-1, 1] (positive half).
constexpr double kGlNode[8] = {
    0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
    0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
    0.9445750230732326, 0.9894009349916499};
constexpr double kGlWeight[8] = {
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
    0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
    0.0622535239386479, 0.0271524594117541};

template <class F>
double gauss_legendre(F&& f, double a, double b, int panels) {
  const double h = (b - a) / panels;
  double acc = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    for (int i = 0; i < 8; ++i) {
      const double dx = 0.5 * h * kGlNode[i];
      acc += 0.5 * h * kGlWeight[i] * (f(mid + dx) + f(mid - dx));
    }
  }
  return acc;
}

// int_0^{pi/2} sec^2(th) / sqrt((tan^2 th + a)(tan^2 th + b)) dth; the
// product is real and positive both for real a, b > 0 and for a
// complex-conjugate pair.
double half_period_integral(Cx a, Cx b) {
  if (std::min(std::abs(a), std::abs(b)) < 1e-12)
    throw std::domain_error("wp period: degenerate (repeated root)");
  const double s = (a + b).real();
  const double q = (a * b).real();
  auto f = [&](double th) {
    const double c = std::cos(th);
    const double t2 = std::pow(std::tan(th), 2);
    return 1.0 / (c * c * std::sqrt(t2 * t2 + s * t2 + q));
  };
  return gauss_legendre(f, 0.0, 2.0 * std::atan(1.0), 16);
}

int largest_real_root(const std::array<Cx, 3>& e) {
  int best = -1;
  for (int i = 0; i < 3; ++i) {
    if (std::abs(e[i].imag()) < 1e-9 * std::max(1.0, std::abs(e[i]))) {
      if (best < 0 || e[i].real() > e[best].real()) best = i;
    }
  }
  if (best < 0) throw std::domain_error("wp period: no real cubic root");
  return best;
}

}  // namespace

double wp_real_period(double g2, double g3) {
  const double disc = g2 * g2 * g2 - 27.0 * g3 * g3;
  const double disc_scale =
      std::max({1e-300, std::abs(g2 * g2 * g2), 27.0 * g3 * g3});
  if (std::abs(disc) <= 1e-10 * disc_scale)
    throw std::domain_error("wp period: vanishing discriminant (repeated root)");
  const auto e = wp_roots(g2, g3);
  const int best = largest_real_root(e);
  Cx others[2];
  int idx = 0;
  for (int i = 0; i < 3; ++i)
    if (i != best) others[idx++] = e[i];
  return 2.0 * half_period_integral(e[best] - others[0], e[best] - others[1]);
}

double wp_imag_scale(double g2, double g3) {
  const auto e = wp_roots(g2, g3);
  const bool all_real = std::abs(e[0].imag()) < 1e-9 &&
                        std::abs(e[1].imag()) < 1e-9 &&
                        std::abs(e[2].imag()) < 1e-9;
  if (all_real)
    return half_period_integral(e[0] - e[2], e[1] - e[2]);
  return 0.8 * wp_real_period(g2, g3);
}

Cx wp_find_shift(double p0, double dp0, double g2, double g3) {
  const double ode_gap =
      std::abs(dp0 * dp0 - (4.0 * p0 * p0 * p0 - g2 * p0 - g3));
  const double scale =
      std::max({1.0, std::abs(p0 * p0 * p0), dp0 * dp0, std::abs(g2 * p0)});
  if (ode_gap > 1e-7 * scale)
    throw std::invalid_argument(
        "wp_find_shift: (p0, dp0) violate the wp differential equation");

  const double wr = wp_real_period(g2, g3) / 2.0;  // real half-period
  const double wi = wp_imag_scale(g2, g3);
  const bool critical = std::abs(dp0) < 1e-7 * (1.0 + std::abs(p0));
  const double p_tol = 1e-11 * std::max(1.0, std::abs(p0));
  const double match_tol =
      std::max(1e-6, 1e-6 * std::abs(dp0)) + 1e-7 * (1.0 + std::abs(p0));

  for (int j = 1; j <= 7; ++j) {
    for (int k = 0; k <= 7; ++k) {
      Cx a(0.17 * j * wr, 0.143 * k * wi + 1e-3);
      bool ok = true;
      for (int it = 0; it < 80 && ok; ++it) {
        WpValue v;
        try {
          v = wp_eval(a, g2, g3);
        } catch (const std::domain_error&) {
          ok = false;
          break;
        }
        if (critical) {
          // Solve wp'(a) = 0 (quadratic convergence at the half-period),
          // then check we landed on the critical point with the right value.
          const Cx r = v.dp;
          if (std::abs(r) < 1e-13 * (1.0 + std::abs(v.p))) break;
          const Cx ddp = 6.0 * v.p * v.p - g2 / 2.0;
          if (std::abs(ddp) < 1e-12) {
            ok = false;
            break;
          }
          a -= r / ddp;
        } else {
          const Cx r = v.p - p0;
          if (std::abs(r) < p_tol) break;
          if (std::abs(v.dp) < 1e-12) {  // escape a critical starting point
            a += Cx(0.01 * wr, 0.007 * wi);
            continue;
          }
          a -= r / v.dp;
        }
        if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) ok = false;
      }
      if (!ok) continue;
      WpValue v;
      try {
        v = wp_eval(a, g2, g3);
      } catch (const std::domain_error&) {
        continue;
      }
      if (std::abs(v.p - p0) > 1e-8 * std::max(1.0, std::abs(p0))) continue;
      if (std::abs(v.dp - dp0) <= match_tol) return a;
      if (std::abs(v.dp + dp0) <= match_tol) return -a;
    }
  }
  throw std::runtime_error("wp_find_shift: no starting point converged");
}

}  // namespace condex
