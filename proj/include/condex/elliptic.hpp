#pragma once

#include <array>
#include <complex>
#include <vector>

namespace condex {

using Cx = std::complex<double>;

struct WpValue {
  Cx p;   // wp(z)
  Cx dp;  // wp'(z)
};

/// Weierstrass elliptic function and its derivative, by the Laurent series
/// around 0 (terms through z^22) after repeated argument halving with the
/// duplication formula. Throws std::domain_error near a lattice point.
WpValue wp_eval(Cx z, double g2, double g3);

/// Roots e1 >= e2 >= e3 (by real part) of 4t^3 - g2 t - g3.
std::array<Cx, 3> wp_roots(double g2, double g3);

/// Least period of wp restricted to the real axis:
/// 2 * int_{e_max}^inf dt / sqrt(4t^3 - g2 t - g3).
/// Throws std::domain_error when the discriminant vanishes (infinite period).
double wp_real_period(double g2, double g3);

/// Imaginary part of the complementary half-period omega_3 when the cubic
/// has three real roots; a heuristic lattice scale otherwise (used only for
/// seeding the shift search).
double wp_imag_scale(double g2, double g3);

/// Solves wp(a) = p0 with wp'(a) = dp0 by complex Newton iteration from a
/// deterministic grid of starting points. The inputs must satisfy the
/// differential equation dp0^2 = 4 p0^3 - g2 p0 - g3; the returned shift is
/// one representative of the lattice-equivalent solution set.
Cx wp_find_shift(double p0, double dp0, double g2, double g3);

}  // namespace condex
