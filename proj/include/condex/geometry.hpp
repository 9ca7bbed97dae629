#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace condex {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kTolManifold = 1e-9;
inline constexpr double kTolTangent = 1e-9;

enum class ManifoldKind { Euclidean, SpaceForm, UnitQuaternions };

/// Identifies one of the supported ambient-embedded manifolds: E^m, the
/// space forms M_sigma (unit sphere / upper unit hyperboloid in R^3 under
/// the signature-sigma form), and S^3 as the unit quaternions in E^4.
struct ManifoldTag {
  ManifoldKind kind = ManifoldKind::SpaceForm;
  double sigma = 1.0;  // SpaceForm only: +1 sphere, -1 hyperboloid
  int dim = 1;         // Euclidean only: ambient dimension m >= 1

  static ManifoldTag euclidean(int m) {
    if (m < 1) throw std::invalid_argument("euclidean: dim must be >= 1");
    return {ManifoldKind::Euclidean, 1.0, m};
  }
  static ManifoldTag space_form(double sigma) {
    if (sigma != 1.0 && sigma != -1.0)
      throw std::invalid_argument("space_form: sigma must be +1 or -1");
    return {ManifoldKind::SpaceForm, sigma, 3};
  }
  static ManifoldTag sphere() { return space_form(+1.0); }
  static ManifoldTag hyperboloid() { return space_form(-1.0); }
  static ManifoldTag unit_quaternions() {
    return {ManifoldKind::UnitQuaternions, 1.0, 4};
  }

  int ambient_dim() const {
    switch (kind) {
      case ManifoldKind::Euclidean: return dim;
      case ManifoldKind::SpaceForm: return 3;
      case ManifoldKind::UnitQuaternions: return 4;
    }
    return 0;
  }
  int tangent_dim() const {
    switch (kind) {
      case ManifoldKind::Euclidean: return dim;
      case ManifoldKind::SpaceForm: return 2;
      case ManifoldKind::UnitQuaternions: return 3;
    }
    return 0;
  }

  bool operator==(const ManifoldTag& o) const {
    if (kind != o.kind) return false;
    if (kind == ManifoldKind::Euclidean) return dim == o.dim;
    if (kind == ManifoldKind::SpaceForm) return sigma == o.sigma;
    return true;
  }
  bool operator!=(const ManifoldTag& o) const { return !(*this == o); }

  std::string name() const;
};

/// Signature-sigma bilinear form on R^3: v1*w1 + v2*w2 + sigma*v3*w3.
double metric_inner(double sigma, const Eigen::Vector3d& v,
                    const Eigen::Vector3d& w);

/// Ambient pairing used as the Riemannian metric on each manifold
/// (the sigma-form on space forms, the Euclidean dot product otherwise).
double metric_inner(const ManifoldTag& tag, const Vec& v, const Vec& w);

double metric_norm(const ManifoldTag& tag, const Vec& v);

/// Defect of the defining constraint: <x,x>_sigma - sigma on space forms,
/// |x|-1 on S^3, 0 on E^m.
double constraint_residual(const ManifoldTag& tag, const Vec& x);

/// Nearest-point style retraction onto the manifold (rescaling).
Vec project_point(const ManifoldTag& tag, Vec x);

/// v minus its metric-normal component at x.
Vec project_tangent(const ManifoldTag& tag, const Vec& x, const Vec& v);

struct EmbeddedPoint {
  ManifoldTag tag;
  Vec coords;

  /// Validating constructor; rejects off-manifold coordinates
  /// (and the lower hyperboloid sheet).
  static EmbeddedPoint make(const ManifoldTag& tag, Vec coords);

  /// Retract nearby coordinates onto the manifold, then validate.
  static EmbeddedPoint project(const ManifoldTag& tag, Vec coords);
};

struct TangentVec {
  EmbeddedPoint base;
  Vec vec;

  static TangentVec make(EmbeddedPoint base, Vec v);

  double norm() const { return metric_norm(base.tag, vec); }
};

/// Orthogonal projection of an ambient vector into the tangent space at x.
TangentVec project_to_tangent(const EmbeddedPoint& x, const Vec& v);

/// Point reached at time t along the unit-speed geodesic from x with
/// initial direction v (cos/sin on the sphere and S^3, cosh/sinh on the
/// hyperboloid, straight line on E^m).
EmbeddedPoint geodesic_point(const EmbeddedPoint& x, const TangentVec& v,
                             double t);

/// Columns form a metric-orthonormal basis of the tangent space at x.
Mat tangent_basis(const EmbeddedPoint& x);

}  // namespace condex
