#pragma once

#include "condex/geometry.hpp"

#include <functional>
#include <span>
#include <variant>
#include <vector>

namespace condex {

/// Scalar coefficient of the symmetric prior family: either a constant or a
/// function of x3 with a user-supplied derivative (no symbolic
/// differentiation is attempted).
struct ScalarFn {
  bool is_constant = true;
  double c0 = 0.0;
  std::function<double(double)> value_fn;
  std::function<double(double)> deriv_fn;

  static ScalarFn constant(double k) { return {true, k, {}, {}}; }
  static ScalarFn of(std::function<double(double)> value,
                     std::function<double(double)> deriv) {
    return {false, 0.0, std::move(value), std::move(deriv)};
  }

  double operator()(double x3) const { return is_constant ? c0 : value_fn(x3); }
  double deriv(double x3) const { return is_constant ? 0.0 : deriv_fn(x3); }
};

/// A prior vector field from one of the named families, or a user callback.
struct PriorField {
  struct ConstantE {
    Vec c;
  };
  struct AffineE {
    Mat B;
    Vec c;
  };
  /// A = beta(x3) B + gamma(x3) C on M_sigma, with B(x) = (-x2, x1, 0)
  /// and C(x) = (0,0,1) - x3 x.
  struct Symmetric {
    double sigma = 1.0;
    ScalarFn beta, gamma;
  };
  /// A(x) = x a_l on the unit quaternions (a_l pure imaginary at identity).
  struct LeftInvariantS3 {
    Eigen::Vector3d a_l;
  };
  struct Custom {
    ManifoldTag tag;
    std::function<Vec(const Vec&)> eval;                  // ambient -> ambient tangent
    std::function<Mat(const Vec&)> jacobian;              // optional ambient Jacobian
  };

  std::variant<ConstantE, AffineE, Symmetric, LeftInvariantS3, Custom> family;

  static PriorField constant_e(Vec c);
  static PriorField affine_e(Mat B, Vec c);
  static PriorField symmetric(double sigma, double beta, double gamma);
  static PriorField symmetric(double sigma, ScalarFn beta, ScalarFn gamma);
  static PriorField left_invariant_s3(const Eigen::Vector3d& a_l);
  static PriorField custom(ManifoldTag tag, std::function<Vec(const Vec&)> eval,
                           std::function<Mat(const Vec&)> jacobian = {});

  ManifoldTag manifold() const;
  bool symmetric_constant_coeffs() const;

  const Symmetric& as_symmetric() const { return std::get<Symmetric>(family); }
};

/// Value of the field at a point. Throws on manifold mismatch.
TangentVec eval_field(const PriorField& A, const EmbeddedPoint& x);

/// The vector theta_{A,X}^{-T} metrically dual to Y -> dA^T(X, Y);
/// analytic for the named families, central finite differences of the
/// retracted field for Custom.
TangentVec theta_contraction(const PriorField& A, const EmbeddedPoint& x,
                             const Vec& X);

/// One half of grad |A|^2 at x (the first forcing term of the
/// Euler-Lagrange equation).
TangentVec grad_norm_sq(const PriorField& A, const EmbeddedPoint& x);

/// Ambient Jacobian of the field (analytic for named families; the user
/// callback or finite differences for Custom).
Mat field_jacobian(const PriorField& A, const Vec& x);

/// dA^T(X, Y) = <theta_{A,X}^{-T}, Y>.
double exterior_two_form(const PriorField& A, const EmbeddedPoint& x,
                         const Vec& X, const Vec& Y);

struct ClosednessSample {
  EmbeddedPoint x;
  Vec X, Y;
};

struct ClosednessReport {
  bool is_closed = false;
  double max_violation = 0.0;
};

/// Max |dA^T(X,Y)| over the samples; closed iff below tol.
/// Throws on an empty sample list.
ClosednessReport closedness_check(const PriorField& A,
                                  std::span<const ClosednessSample> samples,
                                  double tol);

struct PotentialFn {
  std::function<double(const EmbeddedPoint&)> phi;
};

/// The reflexivity constant 4(phi(xn) - phi(x0)) of a conservative field.
double reflexivity_constant(const PotentialFn& phi, const EmbeddedPoint& x0,
                            const EmbeddedPoint& xn);

}  // namespace condex
