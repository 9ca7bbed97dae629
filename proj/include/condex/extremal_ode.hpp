#pragma once

#include "condex/prior_field.hpp"

#include <optional>
#include <span>
#include <vector>

namespace condex {

/// A sampled solution of the extremal equation: one grid of times with
/// points and velocities, the conserved constants recorded from the initial
/// data, and marker indices where track-sum junctions sit. At a junction the
/// sample is duplicated (same time, same point, one-sided velocities), so
/// times are nondecreasing and strictly increase away from markers.
struct ExtremalCurve {
  ManifoldTag tag;
  std::vector<double> times;
  std::vector<Vec> points;
  std::vector<Vec> velocities;
  double b = 0.0;                       // |x'|^2 - |A(x)|^2
  std::optional<double> c;              // rotational constant (symmetric priors)
  std::vector<std::size_t> segments;    // start index of each later segment

  std::size_t size() const { return times.size(); }
  /// Half-open index ranges [first, last] per smooth segment.
  std::vector<std::pair<std::size_t, std::size_t>> segment_ranges() const;
};

ExtremalCurve make_curve(const ManifoldTag& tag, std::vector<double> times,
                         std::vector<Vec> points, std::vector<Vec> velocities);

/// Reverse u -> x(-u): reversed points, negated velocities, negated and
/// reversed times.
ExtremalCurve reverse_curve(const ExtremalCurve& curve);

/// Ambient second derivative prescribed by the extremal equation:
/// the tangential forcing (grad |A|^2 / 2 + theta_{A,v}^{-T}) plus the
/// curvature (constraint) term of the embedding.
Vec el_rhs(const PriorField& A, const EmbeddedPoint& x, const TangentVec& v);

enum class IvpStatus { Ok, DriftWarning, DriftFailure };

struct IvpOptions {
  double drift_tol = 1e-6;       // warn above this (scaled) residual
  double drift_tol_fail = 1e-3;  // abort above this
};

struct IvpResult {
  IvpStatus status = IvpStatus::Ok;
  ExtremalCurve curve;
  double max_drift = 0.0;   // worst |  |v|^2 - |A|^2 - b | / max(1, scale)
  double fail_time = 0.0;   // offending time when status == DriftFailure
};

/// Fixed-step RK4 on (x, v) with per-step reprojection of x onto the
/// manifold and v onto the tangent space. Records b (and c for symmetric
/// priors) from the initial data and monitors the conservation residual.
IvpResult integrate_ivp(const PriorField& A, const EmbeddedPoint& x0,
                        const TangentVec& v0, double t0, double t1,
                        double step, const IvpOptions& opts = {});

enum class ShootStatus { Converged, NoConvergence };

struct ShootOptions {
  double bvp_tol = 1e-9;   // ambient endpoint distance
  int max_iter = 50;
  int restarts = 8;        // deterministic pseudo-random extra starts
  unsigned seed = 0;
  double step = 1e-3;      // integrator step
  IvpOptions ivp;
};

struct ShootResult {
  ShootStatus status = ShootStatus::NoConvergence;
  ExtremalCurve curve;
  double residual = 0.0;
  int iterations = 0;
  Vec v0;                  // initial velocity of the returned curve
};

/// Two-point boundary value solve by shooting: Gauss-Newton on the initial
/// velocity in an orthonormal tangent basis at x0, forward-difference
/// Jacobian, with deterministic seeded restarts (distinct extremals
/// coexist, so the converged one depends on the start).
ShootResult shoot_bvp(const PriorField& A, const EmbeddedPoint& x0,
                      const EmbeddedPoint& x1, double t0, double t1,
                      const TangentVec& v0_init, const ShootOptions& opts = {});

/// Concatenates consecutive solution arcs into one track-sum curve;
/// junction points must match and times must abut.
ExtremalCurve track_sum(std::span<const ExtremalCurve> segments);

/// Composite-Simpson value of integral |x' - A(x)|^2 dt over the curve's
/// grid, segment by segment. Requires at least 3 samples per segment.
double functional_J(const ExtremalCurve& curve, const PriorField& A);

}  // namespace condex
