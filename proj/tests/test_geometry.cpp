#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "condex/geometry.hpp"
#include "helpers.hpp"

#include <cmath>

using namespace condex;
using namespace condex::testing;

TEST_CASE("metric_inner evaluates the signature form") {
  const Eigen::Vector3d e1(1, 0, 0), e3(0, 0, 1);
  CHECK(metric_inner(+1.0, e1, e1) == doctest::Approx(1.0));
  CHECK(metric_inner(-1.0, e3, e3) == doctest::Approx(-1.0));
  CHECK(metric_inner(-1.0, Eigen::Vector3d(1, 2, 3), Eigen::Vector3d(4, 5, 6)) ==
        doctest::Approx(-4.0));

  auto g = rng(7);
  for (int i = 0; i < 20; ++i) {
    const Eigen::Vector3d v = gaussian_vec(g, 3), w = gaussian_vec(g, 3);
    CHECK(metric_inner(-1.0, v, w) == doctest::Approx(metric_inner(-1.0, w, v)));
  }
}

TEST_CASE("project_to_tangent") {
  const auto s2 = ManifoldTag::sphere();
  const auto h2 = ManifoldTag::hyperboloid();

  const EmbeddedPoint a{s2, Eigen::Vector3d(1, 0, 0)};
  CHECK((project_to_tangent(a, Eigen::Vector3d(1, 1, 0)).vec -
         Eigen::Vector3d(0, 1, 0))
            .norm() == doctest::Approx(0.0));

  const EmbeddedPoint b{h2, Eigen::Vector3d(0, 0, 1)};
  CHECK(project_to_tangent(b, Eigen::Vector3d(0, 0, 5)).vec.norm() ==
        doctest::Approx(0.0));

  const EmbeddedPoint c{s2, Eigen::Vector3d(0, 0, 1)};
  CHECK((project_to_tangent(c, Eigen::Vector3d(2, 3, 4)).vec -
         Eigen::Vector3d(2, 3, 0))
            .norm() == doctest::Approx(0.0));

  // tangency to 1e-12 on random data for the curved manifolds
  auto g = rng(11);
  for (const auto& tag : {s2, h2, ManifoldTag::unit_quaternions()}) {
    for (int i = 0; i < 50; ++i) {
      const EmbeddedPoint x = random_point(g, tag);
      const TangentVec tv = project_to_tangent(x, gaussian_vec(g, tag.ambient_dim()));
      CHECK(std::abs(metric_inner(tag, tv.vec, x.coords)) <= 1e-12 * (1 + tv.vec.norm()));
    }
  }
  // on E^m the projection is the identity
  const EmbeddedPoint ep{ManifoldTag::euclidean(4), gaussian_vec(g, 4)};
  const Vec ev = gaussian_vec(g, 4);
  CHECK((project_to_tangent(ep, ev).vec - ev).norm() == 0.0);
}

TEST_CASE("geodesic_point closed forms") {
  const auto s2 = ManifoldTag::sphere();
  const auto h2 = ManifoldTag::hyperboloid();

  const EmbeddedPoint x{s2, Eigen::Vector3d(1, 0, 0)};
  const TangentVec v{x, Eigen::Vector3d(0, 1, 0)};
  CHECK((geodesic_point(x, v, M_PI / 2).coords - Eigen::Vector3d(0, 1, 0)).norm() <=
        1e-15);

  const EmbeddedPoint y{h2, Eigen::Vector3d(0, 0, 1)};
  const TangentVec w{y, Eigen::Vector3d(1, 0, 0)};
  CHECK((geodesic_point(y, w, 1.0).coords -
         Eigen::Vector3d(std::sinh(1.0), 0, std::cosh(1.0)))
            .norm() <= 1e-15);

  auto g = rng(3);
  for (const auto& tag : {s2, h2, ManifoldTag::unit_quaternions(),
                          ManifoldTag::euclidean(3)}) {
    const EmbeddedPoint p = random_point(g, tag);
    TangentVec u = random_tangent(g, p);
    u.vec /= metric_norm(tag, u.vec);
    CHECK((geodesic_point(p, u, 0.0).coords - p.coords).norm() == doctest::Approx(0.0));

    // constraint preserved out to |t| = 100
    for (double t : {0.5, -3.0, 40.0, -100.0, 100.0})
      CHECK(std::abs(constraint_residual(tag, geodesic_point(p, u, t).coords)) <=
            1e-12 * std::max(1.0, geodesic_point(p, u, t).coords.squaredNorm()));

    // unit speed via finite differences
    const double h = 1e-4;
    const Vec fd =
        (geodesic_point(p, u, h).coords - geodesic_point(p, u, -h).coords) /
        (2 * h);
    CHECK(metric_norm(tag, fd) == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("point and tangent validation") {
  const auto s2 = ManifoldTag::sphere();
  CHECK_THROWS_AS(EmbeddedPoint::make(s2, Eigen::Vector3d(1.1, 0, 0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      EmbeddedPoint::make(ManifoldTag::hyperboloid(), Eigen::Vector3d(0, 0, -1)),
      std::invalid_argument);
  CHECK_THROWS_AS(EmbeddedPoint::make(s2, Eigen::Vector2d(1, 0)),
                  std::invalid_argument);
  CHECK_NOTHROW(EmbeddedPoint::make(s2, Eigen::Vector3d(0, 1, 0)));
  const EmbeddedPoint x{s2, Eigen::Vector3d(0, 0, 1)};
  CHECK_THROWS_AS(TangentVec::make(x, Eigen::Vector3d(0, 1, 0.5)),
                  std::invalid_argument);
  CHECK_NOTHROW(TangentVec::make(x, Eigen::Vector3d(0.3, 1, 0)));
}

TEST_CASE("tangent_basis is metric-orthonormal") {
  auto g = rng(23);
  for (const auto& tag :
       {ManifoldTag::sphere(), ManifoldTag::hyperboloid(),
        ManifoldTag::unit_quaternions(), ManifoldTag::euclidean(4)}) {
    for (int rep = 0; rep < 10; ++rep) {
      const EmbeddedPoint x = random_point(g, tag);
      const Mat B = tangent_basis(x);
      REQUIRE(B.cols() == tag.tangent_dim());
      for (int i = 0; i < B.cols(); ++i) {
        if (tag.kind != ManifoldKind::Euclidean)
          CHECK(std::abs(metric_inner(tag, B.col(i), x.coords)) <= 1e-12);
        for (int j = 0; j < B.cols(); ++j)
          CHECK(metric_inner(tag, B.col(i), B.col(j)) ==
                doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-10));
      }
    }
  }
}
