#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "condex/prior_field.hpp"
#include "helpers.hpp"

#include <cmath>

using namespace condex;
using namespace condex::testing;

namespace {

// Wrap a named field as a Custom field so the finite-difference paths can be
// cross-checked against the analytic ones.
PriorField as_custom(const PriorField& A) {
  const ManifoldTag tag = A.manifold();
  return PriorField::custom(tag, [A, tag](const Vec& p) {
    return eval_field(A, EmbeddedPoint{tag, p}).vec;
  });
}

}  // namespace

TEST_CASE("eval_field on the named families") {
  const auto s2 = ManifoldTag::sphere();
  // beta = -1 rotational field at (0.866, 0, 0.5)
  const PriorField rot = PriorField::symmetric(+1.0, -1.0, 0.0);
  const EmbeddedPoint x =
      EmbeddedPoint::project(s2, Eigen::Vector3d(0.866, 0, 0.5));
  const Vec a = eval_field(rot, x).vec;
  CHECK(a[0] == doctest::Approx(x.coords[1]).epsilon(1e-12));
  CHECK(a[1] == doctest::Approx(-x.coords[0]).epsilon(1e-12));
  CHECK((a - Eigen::Vector3d(0, -0.866, 0)).norm() < 1e-3);

  // C vanishes at the pole
  const PriorField grad_h = PriorField::symmetric(+1.0, 0.0, 1.0);
  const EmbeddedPoint pole{s2, Eigen::Vector3d(0, 0, 1)};
  CHECK(eval_field(grad_h, pole).vec.norm() == doctest::Approx(0.0));

  // left-invariant field at the identity is the generator itself
  const Eigen::Vector3d al(-0.5, -0.5, 0.3);
  const PriorField lf = PriorField::left_invariant_s3(al);
  const EmbeddedPoint one{ManifoldTag::unit_quaternions(),
                          Eigen::Vector4d(1, 0, 0, 0)};
  CHECK((eval_field(lf, one).vec - Eigen::Vector4d(0, -0.5, -0.5, 0.3)).norm() ==
        doctest::Approx(0.0));

  // manifold mismatch is rejected
  const EmbeddedPoint hp{ManifoldTag::hyperboloid(), Eigen::Vector3d(0, 0, 1)};
  CHECK_THROWS_AS(eval_field(rot, hp), std::invalid_argument);
}

TEST_CASE("theta contraction analytic values") {
  const auto s2 = ManifoldTag::sphere();
  auto g = rng(5);

  // theta_{C,X} = 0 for the height-gradient field
  const PriorField C = PriorField::symmetric(+1.0, 0.0, 1.0);
  for (int i = 0; i < 30; ++i) {
    const EmbeddedPoint x = random_point(g, s2);
    const TangentVec X = random_tangent(g, x);
    CHECK(theta_contraction(C, x, X.vec).vec.norm() <= 1e-14);
  }

  // displayed formula value at x = e1, X = e2
  const PriorField B = PriorField::symmetric(+1.0, 1.0, 0.0);
  const EmbeddedPoint e1{s2, Eigen::Vector3d(1, 0, 0)};
  CHECK(theta_contraction(B, e1, Eigen::Vector3d(0, 1, 0)).vec.norm() <= 1e-15);

  // constant field on E^m
  const PriorField K = PriorField::constant_e(Eigen::Vector3d(1, 2, 3));
  const EmbeddedPoint p{ManifoldTag::euclidean(3), Eigen::Vector3d(4, 5, 6)};
  CHECK(theta_contraction(K, p, Eigen::Vector3d(1, 1, 1)).vec.norm() == 0.0);
}

TEST_CASE("theta analytic path agrees with finite differences") {
  auto g = rng(17);
  const auto s2 = ManifoldTag::sphere();
  const auto h2 = ManifoldTag::hyperboloid();
  const PriorField fields[] = {
      PriorField::symmetric(+1.0, 1.0, 0.0),
      PriorField::symmetric(+1.0, -0.7, 1.3),
      PriorField::symmetric(-1.0, 0.8, -0.4),
      PriorField::left_invariant_s3(Eigen::Vector3d(0.3, -0.2, 0.9)),
  };
  for (const PriorField& A : fields) {
    const ManifoldTag tag = A.manifold();
    const PriorField Afd = as_custom(A);
    for (int i = 0; i < 12; ++i) {
      const EmbeddedPoint x = random_point(g, tag);
      const TangentVec X = random_tangent(g, x);
      const Vec ana = theta_contraction(A, x, X.vec).vec;
      const Vec fd = theta_contraction(Afd, x, X.vec).vec;
      CHECK((ana - fd).norm() <= 1e-7 * std::max(1.0, ana.norm()));
      // antisymmetry consequence: <theta_{A,X}^{-T}, X> = 0
      CHECK(std::abs(metric_inner(tag, ana, X.vec)) <=
            1e-9 * std::max(1.0, X.vec.squaredNorm()));
    }
  }
}

TEST_CASE("antisymmetry of the two-form") {
  auto g = rng(29);
  const PriorField A = PriorField::symmetric(+1.0, 0.6, -1.1);
  const PriorField Afd = as_custom(A);
  for (int i = 0; i < 20; ++i) {
    const EmbeddedPoint x = random_point(g, A.manifold());
    const TangentVec X = random_tangent(g, x), Y = random_tangent(g, x);
    CHECK(exterior_two_form(A, x, X.vec, Y.vec) ==
          doctest::Approx(-exterior_two_form(A, x, Y.vec, X.vec)).epsilon(1e-12));
    CHECK(exterior_two_form(Afd, x, X.vec, Y.vec) ==
          doctest::Approx(-exterior_two_form(Afd, x, Y.vec, X.vec))
              .epsilon(1e-8)
              .scale(std::max(1.0, std::abs(exterior_two_form(A, x, X.vec, Y.vec)))));
  }
}

TEST_CASE("product rule for scaled fields (non-constant beta)") {
  // A = alpha B with alpha = beta(x3); compare the analytic symmetric-field
  // theta against alpha theta_{B,X} + X(alpha) B - <B,X> grad(alpha), and
  // against finite differences.
  const auto s2 = ManifoldTag::sphere();
  const ScalarFn beta = ScalarFn::of([](double x3) { return x3 * x3 + 0.5 * x3; },
                                     [](double x3) { return 2.0 * x3 + 0.5; });
  const PriorField A = PriorField::symmetric(+1.0, beta, ScalarFn::constant(0.0));
  const PriorField B = PriorField::symmetric(+1.0, 1.0, 0.0);
  const PriorField Afd = as_custom(A);

  auto g = rng(31);
  for (int i = 0; i < 15; ++i) {
    const EmbeddedPoint x = random_point(g, s2);
    const TangentVec X = random_tangent(g, x);
    const double x3 = x.coords[2];
    const double alpha = beta(x3), dalpha = beta.deriv(x3);

    const Vec lhs = theta_contraction(A, x, X.vec).vec;

    const Vec theta_B = theta_contraction(B, x, X.vec).vec;
    const Vec Bx = eval_field(B, x).vec;
    const Vec Cx = eval_field(PriorField::symmetric(+1.0, 0.0, 1.0), x).vec;
    const double X_alpha = dalpha * X.vec[2];
    const double B_dot_X = metric_inner(s2, Bx, X.vec);
    const Vec grad_alpha = dalpha * Cx;  // grad x3 = sigma C, sigma = +1
    const Vec rhs = alpha * theta_B + X_alpha * Bx - B_dot_X * grad_alpha;

    CHECK((lhs - rhs).norm() <= 1e-12 * std::max(1.0, lhs.norm()));
    const Vec fd = theta_contraction(Afd, x, X.vec).vec;
    CHECK((lhs - fd).norm() <= 1e-6 * std::max(1.0, lhs.norm()));
  }
}

TEST_CASE("grad of |A|^2 / 2") {
  const auto s2 = ManifoldTag::sphere();
  // critical at the pole for constant coefficients
  const PriorField A = PriorField::symmetric(+1.0, 0.7, -1.2);
  const EmbeddedPoint pole{s2, Eigen::Vector3d(0, 0, 1)};
  CHECK(grad_norm_sq(A, pole).vec.norm() <= 1e-14);

  const PriorField K = PriorField::constant_e(Eigen::Vector2d(2, 1));
  const EmbeddedPoint p{ManifoldTag::euclidean(2), Eigen::Vector2d(0, 0)};
  CHECK(grad_norm_sq(K, p).vec.norm() == 0.0);

  const PriorField B = PriorField::symmetric(+1.0, 1.0, 0.0);
  const EmbeddedPoint e1{s2, Eigen::Vector3d(1, 0, 0)};
  CHECK(grad_norm_sq(B, e1).vec.norm() <= 1e-15);

  // finite-difference oracle: <grad, dir> = d/dh |A|^2/2 along retractions
  auto g = rng(41);
  const PriorField fields[] = {
      PriorField::symmetric(+1.0, 0.9, -0.5),
      PriorField::symmetric(-1.0, -0.3, 1.1),
      PriorField::symmetric(+1.0,
                            ScalarFn::of([](double t) { return std::sin(t); },
                                         [](double t) { return std::cos(t); }),
                            ScalarFn::constant(0.4)),
      PriorField::affine_e((Mat(2, 2) << 0.5, -1.0, 0.3, 0.2).finished(),
                           Eigen::Vector2d(1, -1)),
  };
  for (const PriorField& F : fields) {
    const ManifoldTag tag = F.manifold();
    auto norm_sq_half = [&](const Vec& q) {
      const Vec a = eval_field(F, EmbeddedPoint{tag, q}).vec;
      return 0.5 * metric_inner(tag, a, a);
    };
    for (int i = 0; i < 10; ++i) {
      const EmbeddedPoint x = random_point(g, tag);
      const TangentVec dir = random_tangent(g, x);
      const Vec grad = grad_norm_sq(F, x).vec;
      const double h = 1e-6;
      const double fd = (norm_sq_half(project_point(tag, x.coords + h * dir.vec)) -
                         norm_sq_half(project_point(tag, x.coords - h * dir.vec))) /
                        (2 * h);
      CHECK(metric_inner(tag, grad, dir.vec) ==
            doctest::Approx(fd).epsilon(1e-5).scale(std::max(1.0, std::abs(fd))));
    }
  }
}

TEST_CASE("closedness check") {
  auto g = rng(53);
  const auto s2 = ManifoldTag::sphere();
  std::vector<ClosednessSample> samples;
  for (int i = 0; i < 100; ++i) {
    const EmbeddedPoint x = random_point(g, s2);
    samples.push_back({x, random_tangent(g, x).vec, random_tangent(g, x).vec});
  }
  const PriorField C = PriorField::symmetric(+1.0, 0.0, 1.7);
  CHECK(closedness_check(C, samples, 1e-9).is_closed);

  const PriorField B = PriorField::symmetric(+1.0, -1.0, 0.0);
  const auto rep = closedness_check(B, samples, 1e-9);
  CHECK_FALSE(rep.is_closed);
  CHECK(rep.max_violation > 0.1);

  std::vector<ClosednessSample> esamples;
  const auto e3 = ManifoldTag::euclidean(3);
  for (int i = 0; i < 20; ++i) {
    const EmbeddedPoint x = random_point(g, e3);
    esamples.push_back({x, gaussian_vec(g, 3), gaussian_vec(g, 3)});
  }
  CHECK(closedness_check(PriorField::constant_e(Eigen::Vector3d(1, 2, 3)),
                         esamples, 1e-12)
            .is_closed);
  CHECK_THROWS_AS(closedness_check(C, {}, 1e-9), std::invalid_argument);
}

TEST_CASE("reflexivity constant") {
  const auto s2 = ManifoldTag::sphere();
  const PotentialFn height{[](const EmbeddedPoint& x) { return x.coords[2]; }};
  const EmbeddedPoint x0{s2, Eigen::Vector3d(std::sqrt(3.0) / 2, 0, 0.5)};
  const EmbeddedPoint xn{s2, Eigen::Vector3d(0, 0, 1)};
  CHECK(reflexivity_constant(height, x0, xn) == doctest::Approx(2.0));
  CHECK(reflexivity_constant(height, x0, x0) == doctest::Approx(0.0));

  const Eigen::Vector3d a(0.4, -1.0, 2.0);
  const PotentialFn lin{[a](const EmbeddedPoint& x) { return a.dot(x.coords); }};
  auto g = rng(61);
  const auto e3 = ManifoldTag::euclidean(3);
  const EmbeddedPoint p = random_point(g, e3), q = random_point(g, e3);
  CHECK(reflexivity_constant(lin, p, q) ==
        doctest::Approx(4.0 * a.dot(q.coords - p.coords)));
}

TEST_CASE("declared conservative fields match their potential") {
  // finite-difference gradient of phi matches eval_field for gamma C
  const double gamma = 1.4;
  const PriorField A = PriorField::symmetric(+1.0, 0.0, gamma);
  const PotentialFn phi{
      [gamma](const EmbeddedPoint& x) { return gamma * x.coords[2]; }};
  auto g = rng(67);
  const auto s2 = ManifoldTag::sphere();
  for (int i = 0; i < 20; ++i) {
    const EmbeddedPoint x = random_point(g, s2);
    const TangentVec dir = random_tangent(g, x);
    const double h = 1e-6;
    const double fd =
        (phi.phi(EmbeddedPoint{s2, project_point(s2, x.coords + h * dir.vec)}) -
         phi.phi(EmbeddedPoint{s2, project_point(s2, x.coords - h * dir.vec)})) /
        (2 * h);
    CHECK(metric_inner(s2, eval_field(A, x).vec, dir.vec) ==
          doctest::Approx(fd).epsilon(1e-6).scale(std::max(1.0, std::abs(fd))));
  }
}
