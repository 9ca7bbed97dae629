#include "condex/prior_field.hpp"

#include "condex/quaternion.hpp"

#include <cmath>

namespace condex {

namespace {

Eigen::Vector3d field_B(const Eigen::Vector3d& x) { return {-x[1], x[0], 0.0}; }

Eigen::Vector3d field_C(const Eigen::Vector3d& x) {
  return Eigen::Vector3d(0.0, 0.0, 1.0) - x[2] * x;
}

// Metric matrix of the ambient pairing (G = G^{-1} for both signatures).
Mat metric_matrix(const ManifoldTag& tag) {
  Mat G = Mat::Identity(tag.ambient_dim(), tag.ambient_dim());
  if (tag.kind == ManifoldKind::SpaceForm) G(2, 2) = tag.sigma;
  return G;
}

double fd_step(const Vec& x) { return 1e-5 * std::max(1.0, x.norm()); }

// Field extended off the manifold by retraction, for finite differencing.
Vec eval_retracted(const PriorField::Custom& f, const ManifoldTag& tag,
                   const Vec& p) {
  return f.eval(project_point(tag, p));
}

Mat fd_jacobian(const PriorField::Custom& f, const ManifoldTag& tag,
                const Vec& x) {
  const int n = static_cast<int>(x.size());
  const double h = fd_step(x);
  Mat J(n, n);
  for (int j = 0; j < n; ++j) {
    Vec hi = x, lo = x;
    hi[j] += h;
    lo[j] -= h;
    J.col(j) = (eval_retracted(f, tag, hi) - eval_retracted(f, tag, lo)) / (2.0 * h);
  }
  return J;
}

void check_manifold(const PriorField& A, const EmbeddedPoint& x,
                    const char* op) {
  if (A.manifold() != x.tag)
    throw std::invalid_argument(std::string(op) + ": field on " +
                                A.manifold().name() + " evaluated at point on " +
                                x.tag.name());
}

}  // namespace

PriorField PriorField::constant_e(Vec c) { return {ConstantE{std::move(c)}}; }

PriorField PriorField::affine_e(Mat B, Vec c) {
  if (B.rows() != B.cols() || B.rows() != c.size())
    throw std::invalid_argument("affine_e: B must be square and match c");
  return {AffineE{std::move(B), std::move(c)}};
}

PriorField PriorField::symmetric(double sigma, double beta, double gamma) {
  return symmetric(sigma, ScalarFn::constant(beta), ScalarFn::constant(gamma));
}

PriorField PriorField::symmetric(double sigma, ScalarFn beta, ScalarFn gamma) {
  if (sigma != 1.0 && sigma != -1.0)
    throw std::invalid_argument("symmetric: sigma must be +1 or -1");
  return {Symmetric{sigma, std::move(beta), std::move(gamma)}};
}

PriorField PriorField::left_invariant_s3(const Eigen::Vector3d& a_l) {
  return {LeftInvariantS3{a_l}};
}

PriorField PriorField::custom(ManifoldTag tag, std::function<Vec(const Vec&)> eval,
                              std::function<Mat(const Vec&)> jacobian) {
  return {Custom{tag, std::move(eval), std::move(jacobian)}};
}

ManifoldTag PriorField::manifold() const {
  return std::visit(
      [](const auto& f) -> ManifoldTag {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, ConstantE>)
          return ManifoldTag::euclidean(static_cast<int>(f.c.size()));
        else if constexpr (std::is_same_v<T, AffineE>)
          return ManifoldTag::euclidean(static_cast<int>(f.c.size()));
        else if constexpr (std::is_same_v<T, Symmetric>)
          return ManifoldTag::space_form(f.sigma);
        else if constexpr (std::is_same_v<T, LeftInvariantS3>)
          return ManifoldTag::unit_quaternions();
        else
          return f.tag;
      },
      family);
}

bool PriorField::symmetric_constant_coeffs() const {
  const auto* s = std::get_if<Symmetric>(&family);
  return s && s->beta.is_constant && s->gamma.is_constant;
}

TangentVec eval_field(const PriorField& A, const EmbeddedPoint& x) {
  check_manifold(A, x, "eval_field");
  return std::visit(
      [&x](const auto& f) -> TangentVec {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, PriorField::ConstantE>) {
          return {x, f.c};
        } else if constexpr (std::is_same_v<T, PriorField::AffineE>) {
          return {x, f.B * x.coords + f.c};
        } else if constexpr (std::is_same_v<T, PriorField::Symmetric>) {
          const Eigen::Vector3d p = x.coords;
          Eigen::Vector3d v = f.beta(p[2]) * field_B(p) + f.gamma(p[2]) * field_C(p);
          return {x, v};
        } else if constexpr (std::is_same_v<T, PriorField::LeftInvariantS3>) {
          const Quat q = Quat::from_vec4(x.coords);
          return {x, (q * Quat::pure(f.a_l)).vec4()};
        } else {
          return {x, f.eval(x.coords)};
        }
      },
      A.family);
}

TangentVec theta_contraction(const PriorField& A, const EmbeddedPoint& x,
                             const Vec& X) {
  check_manifold(A, x, "theta_contraction");
  return std::visit(
      [&](const auto& f) -> TangentVec {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, PriorField::ConstantE>) {
          return {x, Vec::Zero(X.size())};
        } else if constexpr (std::is_same_v<T, PriorField::AffineE>) {
          return {x, (f.B - f.B.transpose()) * X};
        } else if constexpr (std::is_same_v<T, PriorField::Symmetric>) {
          const Eigen::Vector3d p = x.coords;
          const Eigen::Vector3d Xv = X;
          const double sigma = f.sigma;
          const double w = sigma * (p[0] * Xv[1] - p[1] * Xv[0]);
          const double bb = f.beta(p[2]);
          const double bp = f.beta.deriv(p[2]);
          Eigen::Vector3d out =
              2.0 * bb * (Eigen::Vector3d(-Xv[1], Xv[0], 0.0) + w * p);
          if (bp != 0.0)
            out += bp * (Eigen::Vector3d(-p[1] * Xv[2], p[0] * Xv[2], -w) +
                         w * p[2] * p);
          return {x, out};
        } else if constexpr (std::is_same_v<T, PriorField::LeftInvariantS3>) {
          // Left reduction: X_L = x^{-1} X, then [X_L, A_L] lifted back.
          const Quat q = Quat::from_vec4(x.coords);
          const Quat xl = q.conjugate() * Quat::from_vec4(Eigen::Vector4d(X));
          const Eigen::Vector3d bracket = 2.0 * xl.imag().cross(f.a_l);
          return {x, (q * Quat::pure(bracket)).vec4()};
        } else {
          const ManifoldTag tag = f.tag;
          const Mat J = f.jacobian ? f.jacobian(x.coords) : fd_jacobian(f, tag, x.coords);
          const Mat G = metric_matrix(tag);
          const Vec u = J * X - G * J.transpose() * G * X;
          return project_to_tangent(x, u);
        }
      },
      A.family);
}

TangentVec grad_norm_sq(const PriorField& A, const EmbeddedPoint& x) {
  check_manifold(A, x, "grad_norm_sq");
  return std::visit(
      [&](const auto& f) -> TangentVec {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, PriorField::ConstantE>) {
          return {x, Vec::Zero(x.coords.size())};
        } else if constexpr (std::is_same_v<T, PriorField::AffineE>) {
          return {x, f.B.transpose() * (f.B * x.coords + f.c)};
        } else if constexpr (std::is_same_v<T, PriorField::Symmetric>) {
          const Eigen::Vector3d p = x.coords;
          const double x3 = p[2];
          const double q = f.beta(x3) * f.beta(x3) + f.gamma(x3) * f.gamma(x3);
          const double qp =
              f.beta(x3) * f.beta.deriv(x3) + f.gamma(x3) * f.gamma.deriv(x3);
          const double one_m = 1.0 - x3 * x3;
          Eigen::Vector3d out(q * p[0], q * p[1], qp * one_m);
          out -= (q + qp * x3) * one_m * p;
          return {x, out};
        } else if constexpr (std::is_same_v<T, PriorField::LeftInvariantS3>) {
          return {x, Vec::Zero(4)};  // |A| is constant on the group
        } else {
          const ManifoldTag tag = f.tag;
          const Mat G = metric_matrix(tag);
          const double h = fd_step(x.coords);
          const int n = static_cast<int>(x.coords.size());
          Vec g(n);
          for (int j = 0; j < n; ++j) {
            Vec hi = x.coords, lo = x.coords;
            hi[j] += h;
            lo[j] -= h;
            const Vec ahi = eval_retracted(f, tag, hi);
            const Vec alo = eval_retracted(f, tag, lo);
            g[j] = (ahi.dot(G * ahi) - alo.dot(G * alo)) / (2.0 * h);
          }
          return project_to_tangent(x, Vec(0.5 * (G * g)));
        }
      },
      A.family);
}

Mat field_jacobian(const PriorField& A, const Vec& x) {
  return std::visit(
      [&](const auto& f) -> Mat {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, PriorField::ConstantE>) {
          return Mat::Zero(f.c.size(), f.c.size());
        } else if constexpr (std::is_same_v<T, PriorField::AffineE>) {
          return f.B;
        } else if constexpr (std::is_same_v<T, PriorField::Symmetric>) {
          const Eigen::Vector3d p = x;
          const double x3 = p[2];
          Mat J = Mat::Zero(3, 3);
          J(0, 1) = -f.beta(x3);
          J(1, 0) = f.beta(x3);
          const Eigen::Vector3d dcol =
              f.beta.deriv(x3) * field_B(p) + f.gamma.deriv(x3) * field_C(p);
          J.col(2) += dcol;
          // gamma * dC, dC = -(x e3^T + x3 I)
          J.col(2) -= f.gamma(x3) * p;
          J -= f.gamma(x3) * x3 * Mat::Identity(3, 3);
          return J;
        } else if constexpr (std::is_same_v<T, PriorField::LeftInvariantS3>) {
          // x -> x a_l is right multiplication, a linear map of x.
          const Eigen::Vector3d& a = f.a_l;
          Mat R(4, 4);
          R << 0.0, -a[0], -a[1], -a[2],
               a[0], 0.0, a[2], -a[1],
               a[1], -a[2], 0.0, a[0],
               a[2], a[1], -a[0], 0.0;
          return R;
        } else {
          if (f.jacobian) return f.jacobian(x);
          return fd_jacobian(f, f.tag, x);
        }
      },
      A.family);
}

double exterior_two_form(const PriorField& A, const EmbeddedPoint& x,
                         const Vec& X, const Vec& Y) {
  const TangentVec th = theta_contraction(A, x, X);
  return metric_inner(x.tag, th.vec, Y);
}

ClosednessReport closedness_check(const PriorField& A,
                                  std::span<const ClosednessSample> samples,
                                  double tol) {
  if (samples.empty())
    throw std::invalid_argument("closedness_check: empty sample list");
  double worst = 0.0;
  for (const auto& s : samples)
    worst = std::max(worst, std::abs(exterior_two_form(A, s.x, s.X, s.Y)));
  return {worst <= tol, worst};
}

double reflexivity_constant(const PotentialFn& phi, const EmbeddedPoint& x0,
                            const EmbeddedPoint& xn) {
  return 4.0 * (phi.phi(xn) - phi.phi(x0));
}

}  // namespace condex
