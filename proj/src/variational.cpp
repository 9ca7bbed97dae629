#include "condex/variational.hpp"

#include "condex/extremal_ode.hpp"

#include <algorithm>
#include <cmath>

namespace condex {

namespace {

Mat metric_matrix(const ManifoldTag& tag) {
  Mat G = Mat::Identity(tag.ambient_dim(), tag.ambient_dim());
  if (tag.kind == ManifoldKind::SpaceForm) G(2, 2) = tag.sigma;
  return G;
}

void check_waypoints(const std::vector<double>& times,
                     const std::vector<Vec>& points) {
  if (times.size() != points.size() || times.size() < 2)
    throw std::invalid_argument("waypoints: need at least two, sizes equal");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1]))
      throw std::invalid_argument("waypoints: times must be strictly increasing");
}

// Unit tangent at a pointing along the geodesic toward b, and the distance.
std::pair<Vec, double> geodesic_direction(const ManifoldTag& tag, const Vec& a,
                                          const Vec& b) {
  switch (tag.kind) {
    case ManifoldKind::Euclidean: {
      const double d = (b - a).norm();
      if (d < 1e-15) return {Vec::Zero(a.size()), 0.0};
      return {(b - a) / d, d};
    }
    case ManifoldKind::SpaceForm: {
      if (tag.sigma > 0) {
        const double cosd = std::clamp(metric_inner(tag, a, b), -1.0, 1.0);
        const double d = std::acos(cosd);
        if (d < 1e-12) return {Vec::Zero(3), 0.0};
        const Vec dir = (b - cosd * a) / std::sin(d);
        return {dir, d};
      }
      const double coshd = std::max(1.0, -metric_inner(tag, a, b));
      const double d = std::acosh(coshd);
      if (d < 1e-12) return {Vec::Zero(3), 0.0};
      const Vec dir = (b - coshd * a) / std::sinh(d);
      return {dir, d};
    }
    case ManifoldKind::UnitQuaternions: {
      const double cosd = std::clamp(a.dot(b), -1.0, 1.0);
      const double d = std::acos(cosd);
      if (d < 1e-12) return {Vec::Zero(4), 0.0};
      const Vec dir = (b - cosd * a) / std::sin(d);
      return {dir, d};
    }
  }
  return {Vec(), 0.0};
}

}  // namespace

bool DiscreteCurve::is_pinned(int i) const {
  return std::binary_search(pinned.begin(), pinned.end(), i);
}

DiscreteCurve geodesic_init(const ManifoldTag& tag,
                            const std::vector<double>& waypoint_times,
                            const std::vector<Vec>& waypoints,
                            int samples_per_segment) {
  check_waypoints(waypoint_times, waypoints);
  if (samples_per_segment < 2)
    throw std::invalid_argument("geodesic_init: need >= 2 samples per segment");
  const int segs = static_cast<int>(waypoints.size()) - 1;
  const int n = segs * samples_per_segment + 1;

  DiscreteCurve curve;
  curve.tag = tag;
  curve.times.resize(n);
  curve.points.resize(tag.ambient_dim(), n);
  for (int s = 0; s < segs; ++s) {
    const EmbeddedPoint a{tag, waypoints[s]};
    const auto [dir, dist] = geodesic_direction(tag, waypoints[s], waypoints[s + 1]);
    const TangentVec tv{a, dir};
    for (int j = 0; j < samples_per_segment; ++j) {
      const int i = s * samples_per_segment + j;
      const double frac = static_cast<double>(j) / samples_per_segment;
      curve.times[i] = waypoint_times[s] +
                       frac * (waypoint_times[s + 1] - waypoint_times[s]);
      curve.points.col(i) = geodesic_point(a, tv, frac * dist).coords;
    }
    curve.pinned.push_back(s * samples_per_segment);
  }
  curve.times[n - 1] = waypoint_times.back();
  curve.points.col(n - 1) = waypoints.back();
  curve.pinned.push_back(n - 1);
  return curve;
}

DiscreteCurve integral_curve_init(const PriorField& A,
                                  const std::vector<double>& waypoint_times,
                                  const std::vector<Vec>& waypoints,
                                  int samples_per_segment) {
  DiscreteCurve curve =
      geodesic_init(A.manifold(), waypoint_times, waypoints, samples_per_segment);
  const ManifoldTag tag = curve.tag;
  // Follow x' = A(x) from the first waypoint across the whole grid, then
  // re-pin the waypoints.
  Vec x = waypoints.front();
  for (int i = 1; i < curve.samples(); ++i) {
    const double h = curve.times[i] - curve.times[i - 1];
    // One RK4 step of the integral-curve flow.
    const auto f = [&](const Vec& p) {
      return eval_field(A, EmbeddedPoint{tag, project_point(tag, p)}).vec;
    };
    const Vec k1 = f(x);
    const Vec k2 = f(x + 0.5 * h * k1);
    const Vec k3 = f(x + 0.5 * h * k2);
    const Vec k4 = f(x + h * k3);
    x = project_point(tag, x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
    if (!curve.is_pinned(i)) curve.points.col(i) = x;
  }
  return curve;
}

double discrete_J(const DiscreteCurve& curve, const PriorField& A) {
  if (A.manifold() != curve.tag)
    throw std::invalid_argument("discrete_J: manifold mismatch");
  const Mat G = metric_matrix(curve.tag);
  double acc = 0.0;
  for (int i = 0; i + 1 < curve.samples(); ++i) {
    const double h = curve.times[i + 1] - curve.times[i];
    const EmbeddedPoint p{curve.tag, curve.points.col(i)};
    const Vec u = (curve.points.col(i + 1) - curve.points.col(i)) / h -
                  eval_field(A, p).vec;
    acc += h * u.dot(G * u);
  }
  return acc;
}

Mat discrete_J_gradient(const DiscreteCurve& curve, const PriorField& A) {
  const int n = curve.samples();
  const Mat G = metric_matrix(curve.tag);
  Mat grad = Mat::Zero(curve.tag.ambient_dim(), n);

  // u_i = v_i - A(p_i) per interval.
  std::vector<Vec> u(n - 1);
  for (int i = 0; i + 1 < n; ++i) {
    const double h = curve.times[i + 1] - curve.times[i];
    const EmbeddedPoint p{curve.tag, curve.points.col(i)};
    u[i] = (curve.points.col(i + 1) - curve.points.col(i)) / h -
           eval_field(A, p).vec;
  }
  for (int j = 0; j < n; ++j) {
    if (curve.is_pinned(j)) continue;
    Vec g = Vec::Zero(curve.tag.ambient_dim());
    if (j > 0) g += 2.0 * u[j - 1];
    if (j + 1 < n) {
      const double h = curve.times[j + 1] - curve.times[j];
      const Mat J = field_jacobian(A, curve.points.col(j));
      g += -2.0 * u[j] - 2.0 * h * (G * (J.transpose() * (G * u[j])));
    }
    grad.col(j) = project_tangent(curve.tag, curve.points.col(j), g);
  }
  return grad;
}

namespace {

// Retraction of every free column; returns false when a step leaves the
// retractable region (e.g. crosses the hyperboloid cone).
bool retract_all(DiscreteCurve& curve, const Mat& base, const Mat& dir,
                 double alpha) {
  const int n = curve.samples();
  for (int i = 0; i < n; ++i) {
    if (curve.is_pinned(i)) continue;
    Vec p = base.col(i) - alpha * dir.col(i);
    try {
      p = project_point(curve.tag, p);
    } catch (const std::domain_error&) {
      return false;
    }
    if (curve.tag.kind == ManifoldKind::SpaceForm && curve.tag.sigma < 0 &&
        p[2] <= 0.0)
      return false;
    curve.points.col(i) = p;
  }
  return true;
}

}  // namespace

MinimizeResult minimize_curve(DiscreteCurve init, const PriorField& A,
                              const MinimizeOptions& opts) {
  MinimizeResult res;
  res.curve = std::move(init);
  DiscreteCurve& curve = res.curve;

  double J = discrete_J(curve, A);
  Mat grad = discrete_J_gradient(curve, A);
  double alpha = 1e-3;
  double last_accepted = alpha;
  int last_halvings = 0;
  Mat prev_points, prev_grad;

  for (int it = 0; it < opts.max_iter; ++it) {
    const double gnorm = grad.norm();
    if (gnorm < opts.grad_tol) {
      res.converged = true;
      break;
    }
    // Barzilai-Borwein trial step. When the previous search had to backtrack
    // deeply (near-singular curvature directions), cap the next trial by the
    // last accepted step so the monotone search stays shallow.
    if (it > 0) {
      const Mat ds = curve.points - prev_points;
      const Mat dg = grad - prev_grad;
      const double sy = (ds.array() * dg.array()).sum();
      const double yy = (dg.array() * dg.array()).sum();
      if (sy > 0.0 && yy > 0.0)
        alpha = std::clamp(sy / yy, 1e-12, 1e3);
      if (last_halvings >= 8) alpha = std::min(alpha, 4.0 * last_accepted);
    }
    prev_points = curve.points;
    prev_grad = grad;

    bool accepted = false;
    double step = alpha;
    for (int ls = 0; ls < 48; ++ls) {
      DiscreteCurve trial = curve;
      if (retract_all(trial, prev_points, grad, step)) {
        const double Jt = discrete_J(trial, A);
        if (Jt <= J - 1e-4 * step * gnorm * gnorm) {
          curve = std::move(trial);
          J = Jt;
          accepted = true;
          last_accepted = step;
          last_halvings = ls;
          break;
        }
      }
      step *= 0.5;
    }
    res.iterations = it + 1;
    if (!accepted) {
      res.line_search_stalled = true;
      break;
    }
    grad = discrete_J_gradient(curve, A);
  }
  if (grad.norm() < opts.grad_tol) res.converged = true;
  res.J = J;
  return res;
}

DiscreteCurve reverse_data(const DiscreteCurve& curve) {
  const int n = curve.samples();
  DiscreteCurve r;
  r.tag = curve.tag;
  r.times.resize(n);
  r.points.resize(curve.points.rows(), n);
  for (int i = 0; i < n; ++i) {
    r.times[i] = -curve.times[n - 1 - i];
    r.points.col(i) = curve.points.col(n - 1 - i);
  }
  for (int p : curve.pinned) r.pinned.push_back(n - 1 - p);
  std::sort(r.pinned.begin(), r.pinned.end());
  return r;
}

std::pair<std::vector<double>, std::vector<Vec>> reverse_scenario(
    const std::vector<double>& waypoint_times,
    const std::vector<Vec>& waypoints) {
  std::vector<double> times(waypoint_times.rbegin(), waypoint_times.rend());
  for (double& t : times) t = -t;
  std::vector<Vec> points(waypoints.rbegin(), waypoints.rend());
  return {std::move(times), std::move(points)};
}

double report_J(const DiscreteCurve& curve, const PriorField& A) {
  const int n = curve.samples();
  if (n < 3) throw std::invalid_argument("report_J: fewer than 3 samples");
  const double h = curve.times[1] - curve.times[0];
  ExtremalCurve c;
  c.tag = curve.tag;
  c.times = curve.times;
  c.points.resize(n);
  c.velocities.resize(n);
  for (int i = 0; i < n; ++i) {
    c.points[i] = curve.points.col(i);
    if (i == 0)
      c.velocities[i] = (-3.0 * curve.points.col(0) + 4.0 * curve.points.col(1) -
                         curve.points.col(2)) /
                        (2.0 * h);
    else if (i == n - 1)
      c.velocities[i] = (3.0 * curve.points.col(n - 1) -
                         4.0 * curve.points.col(n - 2) + curve.points.col(n - 3)) /
                        (2.0 * h);
    else
      c.velocities[i] =
          (curve.points.col(i + 1) - curve.points.col(i - 1)) / (2.0 * h);
  }
  return functional_J(c, A);
}

}  // namespace condex
