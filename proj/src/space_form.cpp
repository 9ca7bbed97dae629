#include "condex/space_form.hpp"

#include "condex/extremal_ode.hpp"

#include <cmath>

namespace condex {

namespace {

void require_space_form(const EmbeddedPoint& x, double sigma, const char* op) {
  if (x.tag.kind != ManifoldKind::SpaceForm || x.tag.sigma != sigma)
    throw std::invalid_argument(std::string(op) + ": point not on M_sigma");
}

}  // namespace

SymmetricScenario conserved_constants(double sigma, const ScalarFn& beta,
                                      const ScalarFn& gamma,
                                      const EmbeddedPoint& x0,
                                      const TangentVec& v0) {
  require_space_form(x0, sigma, "conserved_constants");
  const Eigen::Vector3d x = x0.coords;
  const Eigen::Vector3d v = v0.vec;
  const double x3 = x[2];
  const double one_m = 1.0 - x3 * x3;
  const double bb = beta(x3), gg = gamma(x3);

  SymmetricScenario sc;
  sc.sigma = sigma;
  sc.beta = beta;
  sc.gamma = gamma;
  sc.b = sigma * metric_inner(sigma, v, v) - (bb * bb + gg * gg) * one_m;
  sc.c = sigma * (x[0] * v[1] - x[1] * v[0]) - bb * one_m;
  sc.d = v[2] * v[2] + sc.b * x3 * x3 - gg * gg * one_m * one_m +
         2.0 * bb * sc.c * one_m;
  return sc;
}

double x3_first_order_residual(const SymmetricScenario& sc, double x3,
                               double x3dot) {
  const double one_m = 1.0 - x3 * x3;
  const double bb = sc.beta(x3), gg = sc.gamma(x3);
  const double lhs = x3dot * x3dot + sc.b * x3 * x3;
  const double rhs = gg * gg * one_m * one_m - 2.0 * bb * sc.c * one_m + sc.d;
  return lhs - rhs;
}

std::vector<double> psi_quadrature(const SymmetricScenario& sc,
                                   const std::vector<double>& times,
                                   const std::vector<double>& x3,
                                   double psi0) {
  const std::size_t n = times.size();
  if (n != x3.size() || n < 2)
    throw std::invalid_argument("psi_quadrature: bad grid");
  const double h = times[1] - times[0];
  for (std::size_t i = 1; i < n; ++i)
    if (std::abs(times[i] - times[i - 1] - h) > 1e-9 * std::max(1.0, std::abs(h)))
      throw std::invalid_argument("psi_quadrature: grid not uniform");

  std::vector<double> rate(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double one_m = 1.0 - x3[i] * x3[i];
    if (std::abs(one_m) < 1e-8)
      throw std::domain_error("psi_quadrature: pole crossing at t = " +
                              std::to_string(times[i]) +
                              "; split the curve at the pole");
    rate[i] = sc.beta(x3[i]) + sc.c / one_m;
  }

  std::vector<double> psi(n);
  psi[0] = psi0;
  for (std::size_t i = 1; i < n; ++i) {
    if (i % 2 == 0) {
      psi[i] = psi[i - 2] + h / 3.0 * (rate[i - 2] + 4.0 * rate[i - 1] + rate[i]);
    } else if (i + 1 < n) {
      psi[i] = psi[i - 1] +
               h * (5.0 * rate[i - 1] + 8.0 * rate[i] - rate[i + 1]) / 12.0;
    } else {
      psi[i] = psi[i - 1] +
               h * (-rate[i - 2] + 8.0 * rate[i - 1] + 5.0 * rate[i]) / 12.0;
    }
  }
  return psi;
}

std::vector<ConstantFamily> constant_solutions(double sigma, double beta,
                                               double gamma) {
  std::vector<ConstantFamily> out;
  if (beta == 0.0 && gamma == 0.0) {
    out.push_back({ConstantFamily::Kind::AllConstant, 0.0, false, 0.0, true,
                   "every constant curve is a (degenerate) geodesic"});
  }
  if (sigma > 0) {
    out.push_back({ConstantFamily::Kind::Equator, 0.0, true, 0.0, false,
                   "x(t) = (cos(w t + psi0), sin(w t + psi0), 0), any w"});
    out.push_back({ConstantFamily::Kind::FixedPoint, 0.0, false, 1.0, false,
                   "north pole"});
    out.push_back({ConstantFamily::Kind::FixedPoint, 0.0, false, -1.0, false,
                   "south pole"});
  } else {
    out.push_back({ConstantFamily::Kind::FixedPoint, 0.0, false, 1.0, false,
                   "hyperboloid vertex"});
  }
  if (gamma == 0.0 && beta != 0.0) {
    // x(t) = (sqrt(sigma(1-h^2)) cos(beta t + psi0), ..., h)
    out.push_back({ConstantFamily::Kind::Latitude, beta, false, 0.0, true,
                   sigma > 0 ? "any |h| < 1" : "any h > 1"});
  }
  return out;
}

double HorizontalForm::rot_constant() const {
  if (sigma > 0) return signpsi * eps * std::sqrt(std::max(0.0, 1.0 - lambda * lambda));
  return -signpsi * eps * std::sqrt(std::max(0.0, lambda * lambda - 1.0));
}

double HorizontalForm::energy_constant() const {
  return 2.0 * beta * rot_constant() + sigma * eps * eps;
}

double horizontal_psi(const HorizontalForm& hf, double t) {
  const double th = t * hf.eps + hf.v0;
  double psi = hf.psi0 + t * hf.beta;
  if (hf.sigma > 0) {
    const double k2 = 1.0 - hf.lambda * hf.lambda;
    if (std::abs(k2) < 1e-14) return psi;  // lambda^2 = 1 branch
    const double k = std::sqrt(k2);
    // arctan(k tan(th)) continued across the poles of tan.
    const double pi = 4.0 * std::atan(1.0);
    const double n = std::round(th / pi);
    psi += hf.signpsi * (std::atan(k * std::tan(th - n * pi)) + n * pi);
    return psi;
  }
  const double l2 = hf.lambda * hf.lambda - 1.0;
  if (std::abs(l2) < 1e-14) return psi;
  psi += hf.signpsi * std::atan(std::tanh(th) / std::sqrt(l2));
  return psi;
}

EmbeddedPoint horizontal_closed_form(const HorizontalForm& hf, double t) {
  const double th = t * hf.eps + hf.v0;
  const double psi = horizontal_psi(hf, t);
  double x3, r;
  if (hf.sigma > 0) {
    x3 = hf.sign3 * hf.lambda * std::sin(th);
    if (std::abs(1.0 - hf.lambda * hf.lambda) < 1e-14)
      r = std::cos(th);  // signed radius: smooth through the poles
    else
      r = std::sqrt(1.0 - hf.lambda * hf.lambda * std::sin(th) * std::sin(th));
  } else {
    x3 = hf.sign3 * hf.lambda * std::cosh(th);
    if (x3 <= 0.0)
      throw std::domain_error("horizontal_closed_form: lower sheet (need sign3*lambda > 0)");
    if (std::abs(hf.lambda * hf.lambda - 1.0) < 1e-14)
      r = std::sinh(th);  // signed radius through the vertex
    else
      r = std::sqrt(hf.lambda * hf.lambda * std::cosh(th) * std::cosh(th) - 1.0);
  }
  Eigen::Vector3d p(r * std::cos(psi), r * std::sin(psi), x3);
  return EmbeddedPoint{ManifoldTag::space_form(hf.sigma), p};
}

TangentVec horizontal_velocity(const HorizontalForm& hf, double t) {
  const double th = t * hf.eps + hf.v0;
  const double psi = horizontal_psi(hf, t);
  const double c = hf.rot_constant();
  double x3, x3dot, r, rdot, psidot;
  if (hf.sigma > 0) {
    x3 = hf.sign3 * hf.lambda * std::sin(th);
    x3dot = hf.sign3 * hf.lambda * hf.eps * std::cos(th);
    if (std::abs(1.0 - hf.lambda * hf.lambda) < 1e-14) {
      r = std::cos(th);
      rdot = -hf.eps * std::sin(th);
      psidot = hf.beta;
    } else {
      const double s2 = std::sin(th) * std::sin(th);
      r = std::sqrt(1.0 - hf.lambda * hf.lambda * s2);
      rdot = -hf.lambda * hf.lambda * hf.eps * std::sin(th) * std::cos(th) / r;
      psidot = hf.beta + c / (1.0 - x3 * x3);
    }
  } else {
    x3 = hf.sign3 * hf.lambda * std::cosh(th);
    x3dot = hf.sign3 * hf.lambda * hf.eps * std::sinh(th);
    if (std::abs(hf.lambda * hf.lambda - 1.0) < 1e-14) {
      r = std::sinh(th);
      rdot = hf.eps * std::cosh(th);
      psidot = hf.beta;
    } else {
      r = std::sqrt(hf.lambda * hf.lambda * std::cosh(th) * std::cosh(th) - 1.0);
      rdot = hf.lambda * hf.lambda * hf.eps * std::cosh(th) * std::sinh(th) / r;
      psidot = hf.beta + c / (1.0 - x3 * x3);
    }
  }
  Eigen::Vector3d v(rdot * std::cos(psi) - r * psidot * std::sin(psi),
                    rdot * std::sin(psi) + r * psidot * std::cos(psi), x3dot);
  return TangentVec{horizontal_closed_form(hf, t), v};
}

HorizontalForm derive_horizontal_form(double sigma, double beta,
                                      const EmbeddedPoint& x0,
                                      const TangentVec& v0) {
  require_space_form(x0, sigma, "derive_horizontal_form");
  const SymmetricScenario sc =
      conserved_constants(sigma, ScalarFn::constant(beta),
                          ScalarFn::constant(0.0), x0, v0);
  const double gap = sc.b - 2.0 * beta * sc.c;
  if (std::abs(gap) < 1e-12)
    throw std::domain_error(
        "derive_horizontal_form: b = 2 beta c, x3 is constant "
        "(see constant_solutions)");
  if (sigma * gap < 0.0)
    throw std::domain_error(
        "derive_horizontal_form: sign of b - 2 beta c inconsistent with sigma");
  const double eps = std::sqrt(std::abs(gap));

  HorizontalForm hf;
  hf.sigma = sigma;
  hf.eps = eps;
  hf.beta = beta;
  hf.sign3 = +1;
  const double x30 = x0.coords[2], v30 = v0.vec[2];
  if (sigma > 0) {
    const double lam2 = std::max(0.0, 1.0 - sc.c * sc.c / (eps * eps));
    hf.lambda = std::sqrt(lam2);
    if (hf.lambda < 1e-9)
      throw std::domain_error("derive_horizontal_form: equatorial motion");
    hf.signpsi = sc.c >= 0.0 ? +1 : -1;
    hf.v0 = std::atan2(x30 / hf.lambda, v30 / (hf.lambda * eps));
  } else {
    hf.lambda = std::sqrt(1.0 + sc.c * sc.c / (eps * eps));
    hf.signpsi = sc.c > 0.0 ? -1 : +1;
    const double ch = std::max(1.0, x30 / hf.lambda);
    hf.v0 = (v30 >= 0.0 ? 1.0 : -1.0) * std::acosh(ch);
  }

  // Fix psi0 so the curve starts at the given angle; the signed radius of
  // the through-pole branches decides which angle that is.
  hf.psi0 = 0.0;
  const Vec probe = horizontal_closed_form(hf, 0.0).coords;
  const double r_model = std::hypot(probe[0], probe[1]);
  double psi_actual;
  if (r_model > 1e-9) {
    const double psi_model = std::atan2(probe[1], probe[0]);
    psi_actual = std::atan2(x0.coords[1], x0.coords[0]) - psi_model;
  } else {
    // starting at the pole/vertex: align the horizontal velocity instead
    const Vec vprobe = horizontal_velocity(hf, 0.0).vec;
    psi_actual = std::atan2(v0.vec[1], v0.vec[0]) -
                 std::atan2(vprobe[1], vprobe[0]);
  }
  hf.psi0 = psi_actual;

  const Vec rx = horizontal_closed_form(hf, 0.0).coords;
  const Vec rv = horizontal_velocity(hf, 0.0).vec;
  if ((rx - x0.coords).norm() > 1e-7 || (rv - v0.vec).norm() > 1e-6 * std::max(1.0, v0.vec.norm()))
    throw std::runtime_error("derive_horizontal_form: reconstruction mismatch");
  return hf;
}

std::array<double, 4> weierstrass_invariants(double gamma, double beta,
                                             double b, double c, double d) {
  if (gamma == 0.0)
    throw std::invalid_argument(
        "weierstrass_invariants: gamma = 0 has the trigonometric closed form "
        "(horizontal_closed_form), not the elliptic one");
  const double g2sq = gamma * gamma;
  const double delta_bar = (2.0 * beta * c - b - 2.0 * g2sq) / (3.0 * g2sq);
  const double d_bar = -4.0 * (g2sq - 2.0 * beta * c + d) / g2sq;
  const double g2 = 12.0 * delta_bar * delta_bar + d_bar;
  const double g3 = -8.0 * delta_bar * delta_bar * delta_bar - delta_bar * d_bar;
  return {delta_bar, d_bar, g2, g3};
}

Cx find_shift_a(double x30, double x3dot0, double gamma, double delta_bar,
                double g2, double g3) {
  if (gamma == 0.0) throw std::invalid_argument("find_shift_a: gamma = 0");
  const double p0 = x30 * x30 + delta_bar;
  const double dp0 = 2.0 * x30 * x3dot0 / gamma;
  return wp_find_shift(p0, dp0, g2, g3);
}

namespace {

// Real part of wp(a + tau) - delta_bar along the line through the shift,
// +inf near poles.
double line_q(const WeierstrassForm& wf, double tau) {
  try {
    const WpValue v = wp_eval(wf.a + Cx(tau, 0.0), wf.g2, wf.g3);
    return v.p.real() - wf.delta_bar;
  } catch (const std::domain_error&) {
    return std::numeric_limits<double>::infinity();
  }
}

// Locate the minimum of line_q over one period by scan plus ternary search.
double locate_minimum(const WeierstrassForm& wf) {
  const int m = 512;
  double best_tau = 0.0, best_q = std::numeric_limits<double>::infinity();
  for (int i = 0; i < m; ++i) {
    const double tau = wf.period * (i + 0.5) / m;
    const double q = line_q(wf, tau);
    if (q < best_q) {
      best_q = q;
      best_tau = tau;
    }
  }
  double lo = best_tau - wf.period / m;
  double hi = best_tau + wf.period / m;
  for (int it = 0; it < 200 && hi - lo > 1e-13 * wf.period; ++it) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (line_q(wf, m1) < line_q(wf, m2))
      hi = m2;
    else
      lo = m1;
  }
  return 0.5 * (lo + hi);
}

// Number of sign flips of x3 between line positions 0 and tau (tau of
// either sign); flips sit at cross_pos + k*period.
long count_flips(const WeierstrassForm& wf, double tau) {
  if (!wf.crossings || tau == 0.0) return 0;
  const double P = wf.period;
  const double c0 = wf.cross_pos;
  if (tau > 0.0) {
    const long kmin = static_cast<long>(std::floor((0.0 - c0) / P)) + 1;
    const long kmax = static_cast<long>(std::floor((tau - c0) / P));
    return std::max<long>(0, kmax - kmin + 1);
  }
  const long kmin = static_cast<long>(std::ceil((tau - c0) / P));
  const long kmax = static_cast<long>(std::ceil((0.0 - c0) / P)) - 1;
  return std::max<long>(0, kmax - kmin + 1);
}

}  // namespace

WeierstrassForm make_weierstrass_form(const SymmetricScenario& sc, double x30,
                                      double x3dot0) {
  if (!sc.constant_coeffs())
    throw std::invalid_argument("make_weierstrass_form: coefficients must be constant");
  const double gamma = sc.gamma(0.0), beta = sc.beta(0.0);
  const auto inv = weierstrass_invariants(gamma, beta, sc.b, sc.c, sc.d);

  WeierstrassForm wf;
  wf.gamma = gamma;
  wf.beta = beta;
  wf.b = sc.b;
  wf.c = sc.c;
  wf.d = sc.d;
  wf.delta_bar = inv[0];
  wf.d_bar = inv[1];
  wf.g2 = inv[2];
  wf.g3 = inv[3];
  try {
    wf.a = find_shift_a(x30, x3dot0, gamma, wf.delta_bar, wf.g2, wf.g3);
    wf.period = wp_real_period(wf.g2, wf.g3);
  } catch (const std::domain_error& e) {
    throw std::domain_error(std::string(e.what()) +
                            "; separatrix-level initial data has no elliptic "
                            "closed form, use the general integrator");
  }
  wf.sign0 = (std::abs(x30) < 1e-12) ? (x3dot0 >= 0.0 ? +1 : -1)
                                     : (x30 >= 0.0 ? +1 : -1);

  // x3 changes sign iff it reaches 0 transversally: the speed there is
  // kappa = gamma^2 - 2 beta c + d, and the wp line must actually touch
  // delta_bar. On the hyperboloid x3 >= 1 and no flip can occur.
  const double kappa = gamma * gamma - 2.0 * beta * sc.c + sc.d;
  if (sc.sigma > 0 && kappa > 1e-12) {
    wf.cross_pos = locate_minimum(wf);
    const double qmin = line_q(wf, wf.cross_pos);
    wf.crossings = std::abs(qmin) < 1e-6 * std::max(1.0, std::abs(wf.delta_bar));
  }
  return wf;
}

double weierstrass_x3(const WeierstrassForm& wf, double t) {
  const double tau = wf.gamma * t;
  const WpValue v = wp_eval(wf.a + Cx(tau, 0.0), wf.g2, wf.g3);
  const double scale = std::max(1.0, std::abs(v.p.real()));
  if (std::abs(v.p.imag()) > 1e-8 * scale)
    throw std::domain_error(
        "weierstrass_x3: wp not real along the motion line (inconsistent shift)");
  const double q = std::max(0.0, v.p.real() - wf.delta_bar);
  const int sign = (count_flips(wf, tau) % 2 == 0) ? wf.sign0 : -wf.sign0;
  return sign * std::sqrt(q);
}

double weierstrass_x3dot(const WeierstrassForm& wf, double t) {
  const double tau = wf.gamma * t;
  const WpValue v = wp_eval(wf.a + Cx(tau, 0.0), wf.g2, wf.g3);
  const double x3 = weierstrass_x3(wf, t);
  if (std::abs(x3) > 1e-6)
    return wf.gamma * v.dp.real() / (2.0 * x3);
  // At a zero touch the speed comes from the first-order identity.
  const double kappa = wf.gamma * wf.gamma - 2.0 * wf.beta * wf.c + wf.d;
  const int sign_next =
      (count_flips(wf, tau + 1e-9 * wf.period) % 2 == 0) ? wf.sign0 : -wf.sign0;
  return sign_next * std::sqrt(std::max(0.0, kappa));
}

double x3_period(const WeierstrassForm& wf) {
  const double base = wf.period / std::abs(wf.gamma);
  return wf.crossings ? 2.0 * base : base;
}

double integrand_closed_form(const SymmetricScenario& sc, double x3,
                             double x3dot) {
  if (!sc.constant_coeffs())
    throw std::invalid_argument("integrand_closed_form: coefficients must be constant");
  const double beta = sc.beta(0.0), gamma = sc.gamma(0.0);
  return sc.b - 2.0 * beta * sc.c + 2.0 * gamma * gamma * (1.0 - x3 * x3) -
         2.0 * gamma * x3dot;
}

Eigen::Vector2d poincare_map(const Eigen::Vector3d& y) {
  if (!(y[2] > 0.0))
    throw std::domain_error("poincare_map: lower hyperboloid sheet");
  return Eigen::Vector2d(y[0], y[1]) / (1.0 + y[2]);
}

ExtremalCurve sample_horizontal_curve(const HorizontalForm& hf, double t0,
                                      double t1, long n) {
  if (n < 2) throw std::invalid_argument("sample_horizontal_curve: n < 2");
  ExtremalCurve curve;
  curve.tag = ManifoldTag::space_form(hf.sigma);
  curve.times.reserve(n + 1);
  curve.points.reserve(n + 1);
  curve.velocities.reserve(n + 1);
  for (long i = 0; i <= n; ++i) {
    const double t = t0 + (t1 - t0) * static_cast<double>(i) / n;
    curve.times.push_back(t);
    curve.points.push_back(horizontal_closed_form(hf, t).coords);
    curve.velocities.push_back(horizontal_velocity(hf, t).vec);
  }
  curve.b = hf.sigma * hf.energy_constant();  // |v|^2 - |A|^2 convention
  curve.c = hf.rot_constant();
  return curve;
}

ExtremalCurve sample_weierstrass_curve(const SymmetricScenario& sc,
                                       const WeierstrassForm& wf, double psi0,
                                       double t0, double t1, long n) {
  if (n < 2) throw std::invalid_argument("sample_weierstrass_curve: n < 2");
  const double sigma = sc.sigma;
  std::vector<double> times(n + 1), x3(n + 1), x3dot(n + 1);
  for (long i = 0; i <= n; ++i) {
    times[i] = t0 + (t1 - t0) * static_cast<double>(i) / n;
    x3[i] = weierstrass_x3(wf, times[i]);
    x3dot[i] = weierstrass_x3dot(wf, times[i]);
  }
  const std::vector<double> psi = psi_quadrature(sc, times, x3, psi0);

  ExtremalCurve curve;
  curve.tag = ManifoldTag::space_form(sigma);
  curve.times = times;
  curve.points.resize(n + 1);
  curve.velocities.resize(n + 1);
  for (long i = 0; i <= n; ++i) {
    const double one_m = 1.0 - x3[i] * x3[i];
    const double r = std::sqrt(sigma * one_m);
    const double rdot = -sigma * x3[i] * x3dot[i] / r;
    const double psidot = sc.beta(x3[i]) + sc.c / one_m;
    curve.points[i] =
        Eigen::Vector3d(r * std::cos(psi[i]), r * std::sin(psi[i]), x3[i]);
    curve.velocities[i] = Eigen::Vector3d(
        rdot * std::cos(psi[i]) - r * psidot * std::sin(psi[i]),
        rdot * std::sin(psi[i]) + r * psidot * std::cos(psi[i]), x3dot[i]);
  }
  curve.b = sigma * sc.b;
  curve.c = sc.c;
  return curve;
}

}  // namespace condex
