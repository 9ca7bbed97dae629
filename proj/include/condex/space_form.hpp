#pragma once

#include "condex/elliptic.hpp"
#include "condex/prior_field.hpp"

#include <vector>

namespace condex {

/// Constants of motion of the rotationally symmetric problem on M_sigma:
///   sigma |x'|^2          = (beta^2 + gamma^2)(1 - x3^2) + b
///   sigma (x1 x2' - x2 x1') = beta (1 - x3^2) + c
///   (x3')^2 + b x3^2      = gamma^2 (1-x3^2)^2 - 2 beta c (1-x3^2) + d
struct SymmetricScenario {
  double sigma = 1.0;
  ScalarFn beta, gamma;
  double b = 0.0, c = 0.0, d = 0.0;

  bool constant_coeffs() const { return beta.is_constant && gamma.is_constant; }
};

/// Reads (b, c, d) off the initial data.
SymmetricScenario conserved_constants(double sigma, const ScalarFn& beta,
                                      const ScalarFn& gamma,
                                      const EmbeddedPoint& x0,
                                      const TangentVec& v0);

/// LHS - RHS of the first-order x3 identity above.
double x3_first_order_residual(const SymmetricScenario& sc, double x3,
                               double x3dot);

/// Cumulative Simpson integration of psi' = beta(x3) + c/(1 - x3^2) over a
/// uniform grid; throws (naming the offending time) when the grid touches
/// 1 - x3^2 = 0.
std::vector<double> psi_quadrature(const SymmetricScenario& sc,
                                   const std::vector<double>& times,
                                   const std::vector<double>& x3, double psi0);

/// Constant-x3 solution families for constant coefficients.
struct ConstantFamily {
  enum class Kind { Equator, Latitude, FixedPoint, AllConstant } kind;
  double rate = 0.0;        // angular rate (Latitude: beta; Equator: free)
  bool rate_free = false;   // Equator: any omega works
  double height = 0.0;      // FixedPoint: +/-1; Latitude: any admissible h
  bool height_free = false;
  std::string note;
};

std::vector<ConstantFamily> constant_solutions(double sigma, double beta,
                                               double gamma);

/// Closed-form extremal with x3 trigonometric (gamma = 0, constant beta):
/// sigma=+1: x3 = sign3 L sin(t e + v0), sigma=-1: x3 = sign3 L cosh(t e + v0).
struct HorizontalForm {
  double sigma = 1.0;
  double lambda = 0.5, eps = 1.0, v0 = 0.0, psi0 = 0.0, beta = 0.0;
  int sign3 = +1;    // sign of the x3 term
  int signpsi = +1;  // sign of the arctan term in psi

  /// Rotational constant implied by the parameters.
  double rot_constant() const;
  /// Energy constant b = sigma |x'|^2 - beta^2 (1 - x3^2).
  double energy_constant() const;
};

EmbeddedPoint horizontal_closed_form(const HorizontalForm& hf, double t);
TangentVec horizontal_velocity(const HorizontalForm& hf, double t);
/// Branch-continuous angle psi(t).
double horizontal_psi(const HorizontalForm& hf, double t);

/// Fits the trigonometric form to initial data (gamma = 0, constant beta,
/// nonconstant x3). Throws when b = 2 beta c (constant-x3 family, see
/// constant_solutions).
HorizontalForm derive_horizontal_form(double sigma, double beta,
                                      const EmbeddedPoint& x0,
                                      const TangentVec& v0);

/// Derived data of the elliptic-function solution for gamma != 0.
struct WeierstrassForm {
  double gamma = 1.0, beta = 0.0;
  double b = 0.0, c = 0.0, d = 0.0;
  double delta_bar = 0.0, d_bar = 0.0, g2 = 0.0, g3 = 0.0;
  Cx a;                    // shift: wp(a) = x3(0)^2 + delta_bar
  int sign0 = +1;          // sign of x3 at t = 0
  double period = 0.0;     // real period of wp
  bool crossings = false;  // does x3 change sign
  double cross_pos = 0.0;  // position of the wp minimum along the line
};

/// (delta_bar, d_bar, g2, g3); throws for gamma = 0 (use the horizontal
/// closed form there).
std::array<double, 4> weierstrass_invariants(double gamma, double beta,
                                             double b, double c, double d);

/// Complex shift a with wp(a) = x30^2 + delta_bar and
/// wp'(a) = 2 x30 x3dot0 / gamma (lattice representative).
Cx find_shift_a(double x30, double x3dot0, double gamma, double delta_bar,
                double g2, double g3);

/// Assembles the full form (invariants, shift, period, crossing data) from
/// a constant-coefficient scenario and initial x3 data.
WeierstrassForm make_weierstrass_form(const SymmetricScenario& sc, double x30,
                                      double x3dot0);

/// x3(t) = sign(t) sqrt(wp(gamma t + a) - delta_bar), the sign tracked by
/// counting the zero touches of wp - delta_bar between 0 and t.
double weierstrass_x3(const WeierstrassForm& wf, double t);
/// First derivative dx3/dt of the same branch.
double weierstrass_x3dot(const WeierstrassForm& wf, double t);

/// True period of x3 (twice the wp period when the sign alternates).
double x3_period(const WeierstrassForm& wf);

/// sigma |x' - A(x)|^2 expressed through the constants:
/// b - 2 beta c + 2 gamma^2 (1 - x3^2) - 2 gamma x3'.
double integrand_closed_form(const SymmetricScenario& sc, double x3,
                             double x3dot);

/// Disc chart (y1, y2)/(1 + y3) of the upper hyperboloid sheet.
Eigen::Vector2d poincare_map(const Eigen::Vector3d& y);

struct ExtremalCurve;

/// Samples the trigonometric closed form on a uniform grid (n intervals).
ExtremalCurve sample_horizontal_curve(const HorizontalForm& hf, double t0,
                                      double t1, long n);

/// Reconstructs the gamma != 0 solution on a uniform grid: x3 from the
/// elliptic form, psi by quadrature, x = (r cos psi, r sin psi, x3).
ExtremalCurve sample_weierstrass_curve(const SymmetricScenario& sc,
                                       const WeierstrassForm& wf, double psi0,
                                       double t0, double t1, long n);

}  // namespace condex
