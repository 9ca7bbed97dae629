#include "condex/quaternion.hpp"

#include <cmath>

namespace condex {

namespace {

constexpr double kSmallAngle = 1e-4;

double sinc(double t) {
  if (std::abs(t) < kSmallAngle) {
    const double t2 = t * t;
    return 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
  }
  return std::sin(t) / t;
}

}  // namespace

Quat qexp(const Eigen::Vector3d& u, double t) {
  const double theta = t * u.norm();
  const Eigen::Vector3d v = (t * sinc(theta)) * u;
  return {std::cos(theta), v[0], v[1], v[2]};
}

Eigen::Vector3d qlog(const Quat& q) {
  const Eigen::Vector3d v = q.imag();
  const double s = v.norm();
  if (s < 1e-12) {
    if (q.w < 0.0)
      throw std::domain_error("qlog: antipodal input, log is multivalued");
    return v / q.w;
  }
  const double angle = std::atan2(s, q.w);  // in (0, pi]
  return (angle / s) * v;
}

Eigen::Vector3d quat_ad(const Quat& q, const Eigen::Vector3d& u) {
  return (q * Quat::pure(u) * q.conjugate()).imag();
}

Eigen::Vector3d solve_segment_BL(const Eigen::Vector3d& a_l, const Quat& x0,
                                 const Quat& x1, double s) {
  if (!(s > 0.0)) throw std::invalid_argument("solve_segment_BL: s must be > 0");
  const Quat y = x1 * x0.conjugate();
  const Quat arg = y * qexp(a_l, -s);
  try {
    return qlog(arg) / s;
  } catch (const std::domain_error&) {
    throw std::domain_error(
        "solve_segment_BL: y e^{-s A_L} is antipodal; candidate branches are "
        "+/-(pi/s) times any axis");
  }
}

SegmentSolution make_segment(const Eigen::Vector3d& a_l, const Quat& x0,
                             const Quat& x1, double t0, double t1) {
  const double s = t1 - t0;
  if (!(s > 0.0)) throw std::invalid_argument("make_segment: t1 must exceed t0");
  const Quat y = x0.conjugate() * x1;  // left quotient
  const Quat arg = y * qexp(a_l, -s);
  Eigen::Vector3d b_l;
  try {
    b_l = qlog(arg) / s;
  } catch (const std::domain_error&) {
    throw std::domain_error("make_segment: antipodal configuration");
  }
  return {a_l, b_l, x0.normalized(), t0, t1};
}

Quat segment_eval(const SegmentSolution& seg, double t) {
  const double u = t - seg.t_start;
  return (seg.x_start * qexp(seg.b_l, u) * qexp(seg.a_l, u)).normalized();
}

Eigen::Vector4d segment_velocity(const SegmentSolution& seg, double t) {
  const double u = t - seg.t_start;
  const Quat mid = Quat::pure(seg.a_l + seg.b_l);
  return (seg.x_start * qexp(seg.b_l, u) * mid * qexp(seg.a_l, u)).vec4();
}

double segment_cost(const SegmentSolution& seg) {
  return seg.duration() * seg.b_l.squaredNorm();
}

Eigen::Vector3d transport_operator(const Eigen::Vector3d& a_l, double s,
                                   const Eigen::Vector3d& w) {
  const double na = a_l.norm();
  if (na * std::abs(s) < kSmallAngle) {
    // sum_{k>=0} (-s ad)^k s/(k+1)! w
    Eigen::Vector3d term = w;
    Eigen::Vector3d acc = s * w;
    double coeff = s;
    for (int k = 1; k < 12; ++k) {
      term = 2.0 * a_l.cross(term) * (-s);
      coeff /= (k + 1);
      acc += coeff * term;
    }
    return acc;
  }
  const Eigen::Vector3d axis = a_l / na;
  const double theta = 2.0 * na;  // rotation rate of ad_{A_L} on the normal plane
  const Eigen::Vector3d w_par = axis.dot(w) * axis;
  const Eigen::Vector3d w_perp = w - w_par;
  const double st = std::sin(s * theta) / theta;
  const double ct = (1.0 - std::cos(s * theta)) / theta;
  return s * w_par + st * w_perp - ct * axis.cross(w_perp);
}

namespace {

std::vector<double> spacings(std::span<const QuatObservation> obs) {
  if (obs.size() < 2)
    throw std::invalid_argument("need at least two observations");
  std::vector<double> s(obs.size() - 1);
  for (std::size_t k = 0; k + 1 < obs.size(); ++k) {
    s[k] = obs[k + 1].t - obs[k].t;
    if (!(s[k] > 0.0))
      throw std::invalid_argument("observation times must be increasing");
  }
  return s;
}

}  // namespace

StationarityReport stationarity_residual(const Eigen::Vector3d& a_l,
                                         std::span<const QuatObservation> obs) {
  const auto s = spacings(obs);
  StationarityReport rep;
  rep.weighted_sum.setZero();
  rep.plain_sum.setZero();
  rep.b_ls.reserve(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    const Eigen::Vector3d b =
        solve_segment_BL(a_l, obs[k].point, obs[k + 1].point, s[k]);
    rep.b_ls.push_back(b);
    rep.plain_sum += b;
    rep.weighted_sum += s[k] * transport_operator(a_l, s[k], b);
  }
  return rep;
}

double prior_cost(const Eigen::Vector3d& a_l,
                  std::span<const QuatObservation> obs) {
  const auto s = spacings(obs);
  double cost = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    const Eigen::Vector3d b =
        solve_segment_BL(a_l, obs[k].point, obs[k + 1].point, s[k]);
    cost += s[k] * b.squaredNorm();
  }
  return cost;
}

PriorFitResult optimize_prior_AL(std::span<const QuatObservation> obs,
                                 const Eigen::Vector3d& a_l_init) {
  constexpr double kGradStep = 1e-7;
  constexpr double kGradTol = 1e-9;
  constexpr int kMaxIter = 200;

  const auto f = [&obs](const Eigen::Vector3d& a) { return prior_cost(a, obs); };
  const auto grad = [&f](const Eigen::Vector3d& a) {
    Eigen::Vector3d g;
    for (int i = 0; i < 3; ++i) {
      Eigen::Vector3d hi = a, lo = a;
      hi[i] += kGradStep;
      lo[i] -= kGradStep;
      g[i] = (f(hi) - f(lo)) / (2.0 * kGradStep);
    }
    return g;
  };

  Eigen::Vector3d a = a_l_init;
  double fa = f(a);
  Eigen::Vector3d g = grad(a);
  Eigen::Matrix3d H = Eigen::Matrix3d::Identity();  // inverse Hessian estimate

  PriorFitResult res{a, fa, 0, false};
  for (int it = 0; it < kMaxIter; ++it) {
    if (g.norm() < kGradTol) {
      res.converged = true;
      break;
    }
    Eigen::Vector3d p = -H * g;
    if (p.dot(g) >= 0.0) {  // lost descent direction, reset
      H.setIdentity();
      p = -g;
    }
    double alpha = 1.0;
    double fn = fa;
    Eigen::Vector3d an = a;
    bool accepted = false;
    for (int ls = 0; ls < 50; ++ls) {
      an = a + alpha * p;
      fn = f(an);
      if (fn <= fa + 1e-4 * alpha * g.dot(p)) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;  // stalled within finite-difference noise

    const Eigen::Vector3d gn = grad(an);
    const Eigen::Vector3d sv = an - a;
    const Eigen::Vector3d yv = gn - g;
    const double sy = sv.dot(yv);
    if (sy > 1e-14 * sv.norm() * yv.norm()) {
      const Eigen::Matrix3d I = Eigen::Matrix3d::Identity();
      const Eigen::Matrix3d V = I - sv * yv.transpose() / sy;
      H = V * H * V.transpose() + sv * sv.transpose() / sy;
    }
    a = an;
    fa = fn;
    g = gn;
    res.iterations = it + 1;
  }
  res.a_l = a;
  res.cost = fa;
  if (g.norm() < kGradTol) res.converged = true;
  return res;
}

ThreePointResult three_point_AL(const Quat& x0, const Quat& x1, const Quat& x2,
                                double s) {
  if (!(s > 0.0)) throw std::invalid_argument("three_point_AL: s must be > 0");
  const Quat y1 = x1 * x0.conjugate();
  const Quat y2 = x2 * x1.conjugate();
  Eigen::Vector3d half;
  try {
    half = 0.5 * qlog(y1.conjugate() * y2);
  } catch (const std::domain_error&) {
    throw std::domain_error("three_point_AL: y1, y2 antipodal, midpoint ambiguous");
  }
  const Quat mid = y1 * qexp(half);  // bi-invariant geodesic midpoint
  ThreePointResult res;
  res.a_l = qlog(mid) / s;
  res.b_l1 = solve_segment_BL(res.a_l, x0, x1, s);
  return res;
}

}  // namespace condex
