#pragma once

#include "condex/geometry.hpp"
#include "condex/quaternion.hpp"

#include <random>

namespace condex::testing {

inline std::mt19937_64 rng(unsigned seed) { return std::mt19937_64(seed); }

inline Vec gaussian_vec(std::mt19937_64& g, int n) {
  std::normal_distribution<double> d(0.0, 1.0);
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = d(g);
  return v;
}

inline EmbeddedPoint random_point(std::mt19937_64& g, const ManifoldTag& tag) {
  switch (tag.kind) {
    case ManifoldKind::Euclidean:
      return EmbeddedPoint{tag, gaussian_vec(g, tag.dim)};
    case ManifoldKind::SpaceForm: {
      if (tag.sigma > 0)
        return EmbeddedPoint::project(tag, gaussian_vec(g, 3));
      Vec v = gaussian_vec(g, 3);
      v *= 0.6;
      v[2] = std::sqrt(1.0 + v[0] * v[0] + v[1] * v[1]);
      return EmbeddedPoint{tag, v};
    }
    case ManifoldKind::UnitQuaternions:
      return EmbeddedPoint::project(tag, gaussian_vec(g, 4));
  }
  throw std::logic_error("random_point");
}

inline TangentVec random_tangent(std::mt19937_64& g, const EmbeddedPoint& x) {
  return project_to_tangent(x, gaussian_vec(g, x.tag.ambient_dim()));
}

inline Quat random_unit_quat(std::mt19937_64& g) {
  std::normal_distribution<double> d(0.0, 1.0);
  return Quat{d(g), d(g), d(g), d(g)}.normalized();
}

}  // namespace condex::testing
