#include "condex/extremal_ode.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace condex {

namespace {

// Raw-state right-hand side shared by the integrator; assumes x on the
// manifold and v tangent.
Vec rhs_raw(const PriorField& A, const ManifoldTag& tag, const Vec& x,
            const Vec& v) {
  EmbeddedPoint px{tag, x};
  TangentVec tv{px, v};
  Vec acc = grad_norm_sq(A, px).vec + theta_contraction(A, px, v).vec;
  switch (tag.kind) {
    case ManifoldKind::Euclidean:
      break;
    case ManifoldKind::SpaceForm:
      acc -= tag.sigma * metric_inner(tag, v, v) * x;
      break;
    case ManifoldKind::UnitQuaternions:
      acc -= v.squaredNorm() * x;
      break;
  }
  return acc;
}

double field_norm_sq(const PriorField& A, const ManifoldTag& tag, const Vec& x) {
  const TangentVec a = eval_field(A, EmbeddedPoint{tag, x});
  return metric_inner(tag, a.vec, a.vec);
}

std::optional<double> rotational_constant(const PriorField& A,
                                          const ManifoldTag& tag, const Vec& x,
                                          const Vec& v) {
  const auto* sym = std::get_if<PriorField::Symmetric>(&A.family);
  if (!sym || tag.kind != ManifoldKind::SpaceForm) return std::nullopt;
  const double w = tag.sigma * (x[0] * v[1] - x[1] * v[0]);
  return w - sym->beta(x[2]) * (1.0 - x[2] * x[2]);
}

}  // namespace

std::vector<std::pair<std::size_t, std::size_t>> ExtremalCurve::segment_ranges()
    const {
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  std::size_t first = 0;
  for (std::size_t marker : segments) {
    ranges.emplace_back(first, marker - 1);
    first = marker;
  }
  ranges.emplace_back(first, times.size() - 1);
  return ranges;
}

ExtremalCurve make_curve(const ManifoldTag& tag, std::vector<double> times,
                         std::vector<Vec> points, std::vector<Vec> velocities) {
  if (times.size() != points.size() || times.size() != velocities.size())
    throw std::invalid_argument("make_curve: size mismatch");
  ExtremalCurve c;
  c.tag = tag;
  c.times = std::move(times);
  c.points = std::move(points);
  c.velocities = std::move(velocities);
  return c;
}

ExtremalCurve reverse_curve(const ExtremalCurve& curve) {
  ExtremalCurve r;
  r.tag = curve.tag;
  const std::size_t n = curve.size();
  r.times.resize(n);
  r.points.resize(n);
  r.velocities.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = n - 1 - i;
    r.times[i] = -curve.times[j];
    r.points[i] = curve.points[j];
    r.velocities[i] = -curve.velocities[j];
  }
  for (auto it = curve.segments.rbegin(); it != curve.segments.rend(); ++it)
    r.segments.push_back(n - *it);
  r.b = curve.b;
  if (curve.c) r.c = -*curve.c;
  return r;
}

Vec el_rhs(const PriorField& A, const EmbeddedPoint& x, const TangentVec& v) {
  if (A.manifold() != x.tag)
    throw std::invalid_argument("el_rhs: manifold mismatch");
  return rhs_raw(A, x.tag, x.coords, v.vec);
}

IvpResult integrate_ivp(const PriorField& A, const EmbeddedPoint& x0,
                        const TangentVec& v0, double t0, double t1,
                        double step, const IvpOptions& opts) {
  if (A.manifold() != x0.tag)
    throw std::invalid_argument("integrate_ivp: manifold mismatch");
  if (!(step > 0.0)) throw std::invalid_argument("integrate_ivp: step <= 0");

  const ManifoldTag tag = x0.tag;
  const double span = t1 - t0;
  const long nsteps = std::max<long>(1, std::lround(std::ceil(std::abs(span) / step - 1e-12)));
  const double h = span / static_cast<double>(nsteps);

  IvpResult res;
  ExtremalCurve& curve = res.curve;
  curve.tag = tag;
  curve.times.reserve(nsteps + 1);
  curve.points.reserve(nsteps + 1);
  curve.velocities.reserve(nsteps + 1);

  Vec x = x0.coords;
  Vec v = v0.vec;
  curve.b = metric_inner(tag, v, v) - field_norm_sq(A, tag, x);
  curve.c = rotational_constant(A, tag, x, v);
  const double drift_scale =
      std::max(1.0, std::abs(curve.b) + field_norm_sq(A, tag, x));

  curve.times.push_back(t0);
  curve.points.push_back(x);
  curve.velocities.push_back(v);

  for (long i = 1; i <= nsteps; ++i) {
    const Vec k1x = v;
    const Vec k1v = rhs_raw(A, tag, x, v);
    const Vec k2x = v + 0.5 * h * k1v;
    const Vec k2v = rhs_raw(A, tag, project_point(tag, x + 0.5 * h * k1x),
                            k2x);
    const Vec k3x = v + 0.5 * h * k2v;
    const Vec k3v = rhs_raw(A, tag, project_point(tag, x + 0.5 * h * k2x),
                            k3x);
    const Vec k4x = v + h * k3v;
    const Vec k4v = rhs_raw(A, tag, project_point(tag, x + h * k3x), k4x);

    x += (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    v += (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    if (!x.allFinite() || !v.allFinite()) {
      res.status = IvpStatus::DriftFailure;
      res.fail_time = t0 + h * static_cast<double>(i);
      res.max_drift = std::numeric_limits<double>::infinity();
      return res;
    }
    x = project_point(tag, x);
    v = project_tangent(tag, x, v);

    const double t = t0 + h * static_cast<double>(i);
    curve.times.push_back(t);
    curve.points.push_back(x);
    curve.velocities.push_back(v);

    const double residual =
        std::abs(metric_inner(tag, v, v) - field_norm_sq(A, tag, x) - curve.b) /
        drift_scale;
    res.max_drift = std::max(res.max_drift, residual);
    if (residual > opts.drift_tol_fail) {
      res.status = IvpStatus::DriftFailure;
      res.fail_time = t;
      return res;
    }
  }
  if (res.max_drift > opts.drift_tol) res.status = IvpStatus::DriftWarning;
  return res;
}

namespace {

// Integrate and return the ambient endpoint only. Blowups (drift failure,
// leaving the retractable region) just disqualify this trial velocity.
Vec shoot_endpoint(const PriorField& A, const EmbeddedPoint& x0, const Vec& v,
                   double t0, double t1, const ShootOptions& opts,
                   bool* failed) {
  try {
    const TangentVec tv = project_to_tangent(x0, v);
    const IvpResult r = integrate_ivp(A, x0, tv, t0, t1, opts.step, opts.ivp);
    *failed = (r.status == IvpStatus::DriftFailure);
    return r.curve.points.back();
  } catch (const std::domain_error&) {
    *failed = true;
    return x0.coords;
  }
}

// Rough geodesic speed between the endpoints, used to scale restarts.
double endpoint_speed(const ManifoldTag& tag, const Vec& a, const Vec& b,
                      double dt) {
  double dist = (b - a).norm();
  switch (tag.kind) {
    case ManifoldKind::Euclidean:
      break;
    case ManifoldKind::SpaceForm:
      if (tag.sigma > 0)
        dist = std::acos(std::clamp(metric_inner(tag, a, b), -1.0, 1.0));
      else
        dist = std::acosh(std::max(1.0, -metric_inner(tag, a, b)));
      break;
    case ManifoldKind::UnitQuaternions:
      dist = 2.0 * std::asin(std::clamp(0.5 * dist, 0.0, 1.0));
      break;
  }
  return std::max(dist / std::abs(dt), 1e-3);
}

}  // namespace

ShootResult shoot_bvp(const PriorField& A, const EmbeddedPoint& x0,
                      const EmbeddedPoint& x1, double t0, double t1,
                      const TangentVec& v0_init, const ShootOptions& opts) {
  if (x0.tag != x1.tag)
    throw std::invalid_argument("shoot_bvp: endpoint manifolds differ");
  const ManifoldTag tag = x0.tag;
  const Mat basis = tangent_basis(x0);
  const int dim = static_cast<int>(basis.cols());
  const Mat G = [&] {
    Mat g = Mat::Identity(tag.ambient_dim(), tag.ambient_dim());
    if (tag.kind == ManifoldKind::SpaceForm) g(2, 2) = tag.sigma;
    return g;
  }();
  // Coordinates of v in the basis: xi_i = <v, e_i>_metric.
  const auto to_coords = [&](const Vec& v) -> Vec {
    return basis.transpose() * (G * v);
  };

  std::vector<Vec> starts;
  starts.push_back(to_coords(v0_init.vec));
  {
    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double speed = endpoint_speed(tag, x0.coords, x1.coords, t1 - t0);
    for (int r = 0; r < opts.restarts; ++r) {
      Vec xi(dim);
      for (int i = 0; i < dim; ++i) xi[i] = gauss(rng);
      xi.normalize();
      const double scale = speed * (0.5 + 1.5 * (r % 4) / 3.0);
      starts.push_back(scale * xi);
    }
  }

  ShootResult best;
  best.residual = std::numeric_limits<double>::infinity();

  for (const Vec& start : starts) {
    Vec xi = start;
    bool bad = false;
    Vec endp = shoot_endpoint(A, x0, basis * xi, t0, t1, opts, &bad);
    if (bad) continue;
    Vec r = endp - x1.coords;
    int it = 0;
    for (; it < opts.max_iter && r.norm() > opts.bvp_tol; ++it) {
      // Forward-difference Jacobian of the endpoint map.
      Mat J(r.size(), dim);
      const double delta = 1e-7 * std::max(1.0, xi.norm());
      bool jac_bad = false;
      for (int k = 0; k < dim; ++k) {
        Vec xik = xi;
        xik[k] += delta;
        bool f = false;
        const Vec ek = shoot_endpoint(A, x0, basis * xik, t0, t1, opts, &f);
        if (f) {
          jac_bad = true;
          break;
        }
        J.col(k) = (ek - endp) / delta;
      }
      if (jac_bad) break;
      const Vec dxi = J.colPivHouseholderQr().solve(-r);
      // Backtrack on the ambient mismatch.
      double alpha = 1.0;
      bool improved = false;
      for (int ls = 0; ls < 30; ++ls) {
        bool f = false;
        const Vec e2 = shoot_endpoint(A, x0, basis * (xi + alpha * dxi), t0, t1,
                                      opts, &f);
        if (!f && (e2 - x1.coords).norm() < r.norm()) {
          xi += alpha * dxi;
          endp = e2;
          r = endp - x1.coords;
          improved = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!improved) break;
    }
    if (r.norm() < best.residual) {
      best.residual = r.norm();
      best.iterations = it;
      best.v0 = basis * xi;
      if (r.norm() <= opts.bvp_tol) {
        best.status = ShootStatus::Converged;
        break;
      }
    }
  }

  if (best.v0.size() > 0) {
    const TangentVec v = project_to_tangent(x0, best.v0);
    best.curve = integrate_ivp(A, x0, v, t0, t1, opts.step, opts.ivp).curve;
  }
  return best;
}

ExtremalCurve track_sum(std::span<const ExtremalCurve> segments) {
  if (segments.empty()) throw std::invalid_argument("track_sum: no segments");
  ExtremalCurve out = segments[0];
  for (std::size_t s = 1; s < segments.size(); ++s) {
    const ExtremalCurve& seg = segments[s];
    if (seg.tag != out.tag)
      throw std::invalid_argument("track_sum: mixed manifolds");
    const double tj = out.times.back();
    if (std::abs(seg.times.front() - tj) > 1e-9 * std::max(1.0, std::abs(tj)))
      throw std::invalid_argument("track_sum: segment times do not abut");
    if ((seg.points.front() - out.points.back()).norm() > 10 * kTolManifold)
      throw std::invalid_argument("track_sum: junction mismatch");
    out.segments.push_back(out.times.size());
    out.times.insert(out.times.end(), seg.times.begin(), seg.times.end());
    out.points.insert(out.points.end(), seg.points.begin(), seg.points.end());
    out.velocities.insert(out.velocities.end(), seg.velocities.begin(),
                          seg.velocities.end());
  }
  return out;
}

namespace {

// Composite Simpson over samples [first, last] of a uniform grid, with a
// 3/8 tail when the interval count is odd.
double simpson(const std::vector<double>& t, const std::vector<double>& f,
               std::size_t first, std::size_t last) {
  const std::size_t n = last - first;  // interval count
  if (n < 2) throw std::invalid_argument("functional_J: fewer than 3 samples");
  const double h = (t[last] - t[first]) / static_cast<double>(n);
  double acc = 0.0;
  std::size_t i = first;
  std::size_t stop = (n % 2 == 0) ? last : last - 3;
  for (; i + 2 <= stop; i += 2)
    acc += (h / 3.0) * (f[i] + 4.0 * f[i + 1] + f[i + 2]);
  if (n % 2 != 0)
    acc += (3.0 * h / 8.0) * (f[last - 3] + 3.0 * f[last - 2] +
                              3.0 * f[last - 1] + f[last]);
  return acc;
}

}  // namespace

double functional_J(const ExtremalCurve& curve, const PriorField& A) {
  if (curve.size() < 3)
    throw std::invalid_argument("functional_J: fewer than 3 samples");
  std::vector<double> integrand(curve.size());
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const EmbeddedPoint p{curve.tag, curve.points[i]};
    const Vec diff = curve.velocities[i] - eval_field(A, p).vec;
    integrand[i] = metric_inner(curve.tag, diff, diff);
  }
  double total = 0.0;
  for (const auto& [first, last] : curve.segment_ranges())
    total += simpson(curve.times, integrand, first, last);
  return total;
}

}  // namespace condex
