#include "condex/geometry.hpp"

#include <cmath>

namespace condex {

std::string ManifoldTag::name() const {
  switch (kind) {
    case ManifoldKind::Euclidean: return "E^" + std::to_string(dim);
    case ManifoldKind::SpaceForm: return sigma > 0 ? "S^2" : "H^2";
    case ManifoldKind::UnitQuaternions: return "S^3";
  }
  return "?";
}

double metric_inner(double sigma, const Eigen::Vector3d& v,
                    const Eigen::Vector3d& w) {
  return v[0] * w[0] + v[1] * w[1] + sigma * v[2] * w[2];
}

double metric_inner(const ManifoldTag& tag, const Vec& v, const Vec& w) {
  if (tag.kind == ManifoldKind::SpaceForm)
    return v[0] * w[0] + v[1] * w[1] + tag.sigma * v[2] * w[2];
  return v.dot(w);
}

double metric_norm(const ManifoldTag& tag, const Vec& v) {
  return std::sqrt(metric_inner(tag, v, v));
}

double constraint_residual(const ManifoldTag& tag, const Vec& x) {
  switch (tag.kind) {
    case ManifoldKind::Euclidean: return 0.0;
    case ManifoldKind::SpaceForm:
      return metric_inner(tag, x, x) - tag.sigma;
    case ManifoldKind::UnitQuaternions: return x.norm() - 1.0;
  }
  return 0.0;
}

Vec project_point(const ManifoldTag& tag, Vec x) {
  switch (tag.kind) {
    case ManifoldKind::Euclidean: break;
    case ManifoldKind::SpaceForm: {
      const double q = tag.sigma * metric_inner(tag, x, x);
      if (q <= 0.0)
        throw std::domain_error("project_point: cannot retract onto " +
                                tag.name());
      x /= std::sqrt(q);
      break;
    }
    case ManifoldKind::UnitQuaternions: {
      const double n = x.norm();
      if (n == 0.0)
        throw std::domain_error("project_point: zero vector");
      x /= n;
      break;
    }
  }
  return x;
}

Vec project_tangent(const ManifoldTag& tag, const Vec& x, const Vec& v) {
  switch (tag.kind) {
    case ManifoldKind::Euclidean: return v;
    case ManifoldKind::SpaceForm:
      return v - tag.sigma * metric_inner(tag, v, x) * x;
    case ManifoldKind::UnitQuaternions: return v - v.dot(x) * x;
  }
  return v;
}

EmbeddedPoint EmbeddedPoint::make(const ManifoldTag& tag, Vec coords) {
  if (coords.size() != tag.ambient_dim())
    throw std::invalid_argument("EmbeddedPoint: expected dimension " +
                                std::to_string(tag.ambient_dim()));
  const double res = constraint_residual(tag, coords);
  if (std::abs(res) > kTolManifold)
    throw std::invalid_argument("EmbeddedPoint: off " + tag.name() +
                                " by " + std::to_string(res));
  if (tag.kind == ManifoldKind::SpaceForm && tag.sigma < 0 && coords[2] <= 0)
    throw std::invalid_argument("EmbeddedPoint: lower hyperboloid sheet");
  return {tag, std::move(coords)};
}

EmbeddedPoint EmbeddedPoint::project(const ManifoldTag& tag, Vec coords) {
  return make(tag, project_point(tag, std::move(coords)));
}

TangentVec TangentVec::make(EmbeddedPoint base, Vec v) {
  if (v.size() != base.tag.ambient_dim())
    throw std::invalid_argument("TangentVec: dimension mismatch");
  if (base.tag.kind != ManifoldKind::Euclidean) {
    const double pairing = metric_inner(base.tag, v, base.coords);
    if (std::abs(pairing) > kTolTangent * std::max(1.0, v.norm()))
      throw std::invalid_argument("TangentVec: not tangent, <v,x> = " +
                                  std::to_string(pairing));
  }
  return {std::move(base), std::move(v)};
}

TangentVec project_to_tangent(const EmbeddedPoint& x, const Vec& v) {
  return {x, project_tangent(x.tag, x.coords, v)};
}

EmbeddedPoint geodesic_point(const EmbeddedPoint& x, const TangentVec& v,
                             double t) {
  const ManifoldTag& tag = x.tag;
  switch (tag.kind) {
    case ManifoldKind::Euclidean:
      return {tag, x.coords + t * v.vec};
    case ManifoldKind::SpaceForm:
      if (tag.sigma > 0)
        return {tag, std::cos(t) * x.coords + std::sin(t) * v.vec};
      return {tag, std::cosh(t) * x.coords + std::sinh(t) * v.vec};
    case ManifoldKind::UnitQuaternions:
      return {tag, std::cos(t) * x.coords + std::sin(t) * v.vec};
  }
  return x;
}

Mat tangent_basis(const EmbeddedPoint& x) {
  const ManifoldTag& tag = x.tag;
  const int n = tag.ambient_dim();
  const int d = tag.tangent_dim();
  Mat basis(n, d);
  if (tag.kind == ManifoldKind::Euclidean) {
    basis.setIdentity();
    return basis;
  }
  // Metric Gram-Schmidt over projected coordinate axes; on the space forms
  // and S^3 the induced metric is positive-definite on tangent spaces.
  int col = 0;
  for (int axis = 0; axis < n && col < d; ++axis) {
    Vec cand = project_tangent(tag, x.coords, Vec::Unit(n, axis));
    for (int j = 0; j < col; ++j)
      cand -= metric_inner(tag, cand, basis.col(j)) * basis.col(j);
    const double nn = metric_inner(tag, cand, cand);
    if (nn > 1e-16) basis.col(col++) = cand / std::sqrt(nn);
  }
  if (col != d) throw std::runtime_error("tangent_basis: degenerate basis");
  return basis;
}

}  // namespace condex
