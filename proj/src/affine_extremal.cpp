#include "condex/affine_extremal.hpp"

#include <unsupported/Eigen/MatrixFunctions>

namespace condex {

namespace {

struct FlowTerms {
  Mat expB;   // e^{tau B}
  Mat G1;     // int_0^tau e^{-uB} e^{-uB^T} du
  Mat G2;     // int_0^tau e^{-uB} du
};

// Van Loan blocks: the upper-right block of exp(tau [[-B, Q], [0, S]]) is
// int_0^tau e^{-B(tau-u)} Q e^{S u} du.
FlowTerms flow_terms(const Mat& B, double tau) {
  const auto m = B.rows();
  FlowTerms ft;
  ft.expB = (tau * B).exp();

  Mat H = Mat::Zero(2 * m, 2 * m);
  H.topLeftCorner(m, m) = -B;
  H.topRightCorner(m, m) = Mat::Identity(m, m);
  H.bottomRightCorner(m, m) = B.transpose();
  const Mat E = (tau * H).exp();
  // F = int e^{-B(tau-u)} e^{B^T u} du; G1 = F e^{-tau B^T}.
  ft.G1 = E.topRightCorner(m, m) * (-tau * B.transpose()).exp();

  H.bottomRightCorner(m, m).setZero();
  ft.G2 = (tau * H).exp().topRightCorner(m, m);
  return ft;
}

void check_dims(const Mat& B, const Vec& c, const Vec& x0) {
  if (B.rows() != B.cols() || B.rows() != c.size() || c.size() != x0.size())
    throw std::invalid_argument("affine extremal: dimension mismatch");
}

}  // namespace

Vec affine_extremal_eval(const AffineExtremal& sol, double t) {
  check_dims(sol.B, sol.c, sol.x0);
  const double tau = t - sol.t0;
  const FlowTerms ft = flow_terms(sol.B, tau);
  const Vec dshift = (-sol.t0 * sol.B.transpose()).exp() * sol.d;
  return ft.expB * (sol.x0 + ft.G1 * dshift + ft.G2 * sol.c);
}

Vec affine_extremal_velocity(const AffineExtremal& sol, double t) {
  const Vec x = affine_extremal_eval(sol, t);
  return sol.B * x + (-t * sol.B.transpose()).exp() * sol.d + sol.c;
}

EndpointSolve solve_endpoint_d(const Mat& B, const Vec& c, const Vec& x0,
                               const Vec& x1, double t0, double t1) {
  check_dims(B, c, x0);
  if (!(t1 > t0)) throw std::invalid_argument("solve_endpoint_d: t1 <= t0");
  const double tau = t1 - t0;
  const FlowTerms ft = flow_terms(B, tau);
  const Mat M = ft.expB * ft.G1 * (-t0 * B.transpose()).exp();
  const Vec rhs = x1 - ft.expB * (x0 + ft.G2 * c);
  Eigen::FullPivLU<Mat> lu(M);
  if (!lu.isInvertible()) return {EndpointSolveStatus::Singular, Vec()};
  return {EndpointSolveStatus::Ok, lu.solve(rhs)};
}

}  // namespace condex
