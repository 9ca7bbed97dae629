#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace condex {

/// Unit quaternion (group element) or pure-imaginary quaternion
/// (Lie-algebra element), stored as (w, i, j, k).
struct Quat {
  double w = 1.0, x = 0.0, y = 0.0, z = 0.0;

  static Quat identity() { return {1.0, 0.0, 0.0, 0.0}; }
  static Quat pure(const Eigen::Vector3d& v) { return {0.0, v[0], v[1], v[2]}; }
  static Quat from_vec4(const Eigen::Vector4d& q) { return {q[0], q[1], q[2], q[3]}; }

  Eigen::Vector4d vec4() const { return {w, x, y, z}; }
  Eigen::Vector3d imag() const { return {x, y, z}; }

  Quat conjugate() const { return {w, -x, -y, -z}; }
  double norm() const { return vec4().norm(); }
  Quat normalized() const {
    const double n = norm();
    if (n == 0.0) throw std::domain_error("Quat: zero norm");
    return {w / n, x / n, y / n, z / n};
  }

  friend Quat operator*(const Quat& a, const Quat& b) {
    return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
  }
  friend Quat operator*(double s, const Quat& q) { return {s * q.w, s * q.x, s * q.y, s * q.z}; }
  friend Quat operator+(const Quat& a, const Quat& b) { return {a.w + b.w, a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Quat operator-(const Quat& a, const Quat& b) { return {a.w - b.w, a.x - b.x, a.y - b.y, a.z - b.z}; }
};

/// e^{t u} for a pure-imaginary generator u: cos(t|u|) + sin(t|u|) u/|u|,
/// with a series branch near |u| t = 0.
Quat qexp(const Eigen::Vector3d& u, double t = 1.0);

/// Principal logarithm of a unit quaternion, |qlog(q)| <= pi.
/// Throws std::domain_error at the antipode (q = -1), where the
/// logarithm is multivalued.
Eigen::Vector3d qlog(const Quat& q);

/// Adjoint action q u q^{-1} on pure quaternions.
Eigen::Vector3d quat_ad(const Quat& q, const Eigen::Vector3d& u);

/// One observed group element with its time.
struct QuatObservation {
  Quat point;
  double t = 0.0;
};

/// One closed-form extremal arc on S^3 for the translation-invariant prior
/// with generator a_l: x(t) = x_start e^{(t-t_start)B_L} e^{(t-t_start)A_L}.
struct SegmentSolution {
  Eigen::Vector3d a_l = Eigen::Vector3d::Zero();
  Eigen::Vector3d b_l = Eigen::Vector3d::Zero();
  Quat x_start;
  double t_start = 0.0, t_end = 1.0;

  double duration() const { return t_end - t_start; }
};

/// Solves e^{s B_L} e^{s A_L} = x1 x0^{-1} for B_L on the principal branch
/// (minimal correcting arc). This right-quotient relation is the one the
/// prior-fitting pipeline (stationarity_residual, optimize_prior_AL,
/// three_point_AL) is built on. Throws std::domain_error when the argument
/// of the log is antipodal; both candidate branches are then +/- pi times
/// the undetermined axis.
Eigen::Vector3d solve_segment_BL(const Eigen::Vector3d& a_l, const Quat& x0,
                                 const Quat& x1, double s);

/// Builds the extremal arc through (t0, x0) and (t1, x1): solves
/// e^{s B_L} e^{s A_L} = x0^{-1} x1 so that the left-translated product
/// interpolates and satisfies the reduced equation V' = [V, A_L].
SegmentSolution make_segment(const Eigen::Vector3d& a_l, const Quat& x0,
                             const Quat& x1, double t0, double t1);

Quat segment_eval(const SegmentSolution& seg, double t);
/// Analytic velocity x_start e^{tB}(A_L+B_L)e^{tA} of the arc.
Eigen::Vector4d segment_velocity(const SegmentSolution& seg, double t);

/// (t_end - t_start) |B_L|^2 in the bi-invariant metric inherited from E^4.
double segment_cost(const SegmentSolution& seg);

/// Applies ((1 - e^{-s ad_{A_L}})/ad_{A_L}) to w, with ad_{A_L} w = 2 A_L x w;
/// Rodrigues-style closed form, series fallback for |A_L| s < 1e-4.
Eigen::Vector3d transport_operator(const Eigen::Vector3d& a_l, double s,
                                   const Eigen::Vector3d& w);

struct StationarityReport {
  Eigen::Vector3d weighted_sum;            // sum_k s_k T(A_L, s_k) B_{L,k}
  Eigen::Vector3d plain_sum;               // sum_k B_{L,k}
  std::vector<Eigen::Vector3d> b_ls;       // per-segment B_{L,k}
};

/// First-order optimality data for the prior generator: the weighted sum
/// vanishes at a critical point over the full algebra, and the plain sum
/// vanishes under equal spacing.
StationarityReport stationarity_residual(const Eigen::Vector3d& a_l,
                                         std::span<const QuatObservation> obs);

struct PriorFitResult {
  Eigen::Vector3d a_l;
  double cost = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Minimizes sum_k s_k |B_{L,k}(A_L)|^2 over A_L by BFGS with
/// central-difference gradients (step 1e-7); deterministic given the seed
/// point. Stops when |grad| < 1e-9 or after 200 iterations.
PriorFitResult optimize_prior_AL(std::span<const QuatObservation> obs,
                                 const Eigen::Vector3d& a_l_init);

/// Total fitted cost sum_k s_k |B_{L,k}|^2 at a given generator.
double prior_cost(const Eigen::Vector3d& a_l,
                  std::span<const QuatObservation> obs);

struct ThreePointResult {
  Eigen::Vector3d a_l;
  Eigen::Vector3d b_l1;
};

/// Closed-form optimal generator for three equally spaced observations:
/// e^{s A_L} is the geodesic midpoint of y1 = x1 x0^{-1} and y2 = x2 x1^{-1},
/// and B_{L,1} solves e^{s B_{L,1}} e^{s A_L} = y1.
ThreePointResult three_point_AL(const Quat& x0, const Quat& x1, const Quat& x2,
                                double s);

}  // namespace condex
