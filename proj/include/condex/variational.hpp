#pragma once

#include "condex/prior_field.hpp"

#include <utility>
#include <vector>

namespace condex {

/// A curve discretized as a list of on-manifold points on a time grid,
/// with waypoint samples pinned in place during optimization.
struct DiscreteCurve {
  ManifoldTag tag;
  std::vector<double> times;
  Mat points;                 // ambient_dim x sample count
  std::vector<int> pinned;    // sorted sample indices held fixed

  int samples() const { return static_cast<int>(times.size()); }
  bool is_pinned(int i) const;
};

/// Discrete geodesic interpolant of the waypoints, n samples per segment
/// (so segments share their junction sample).
DiscreteCurve geodesic_init(const ManifoldTag& tag,
                            const std::vector<double>& waypoint_times,
                            const std::vector<Vec>& waypoints,
                            int samples_per_segment);

/// Initialization along the prior's integral curve from the first waypoint
/// (waypoints still pinned afterwards); used to explore other basins.
DiscreteCurve integral_curve_init(const PriorField& A,
                                  const std::vector<double>& waypoint_times,
                                  const std::vector<Vec>& waypoints,
                                  int samples_per_segment);

/// Rectangle-rule objective with forward-difference velocities:
/// sum_i h_i |(p_{i+1}-p_i)/h_i - A(p_i)|^2.
double discrete_J(const DiscreteCurve& curve, const PriorField& A);

/// Riemannian gradient of discrete_J per sample (tangent-projected ambient
/// columns; zero at pinned samples).
Mat discrete_J_gradient(const DiscreteCurve& curve, const PriorField& A);

struct MinimizeOptions {
  double grad_tol = 1e-8;
  int max_iter = 20000;
};

struct MinimizeResult {
  DiscreteCurve curve;
  double J = 0.0;
  int iterations = 0;
  bool converged = false;
  bool line_search_stalled = false;
};

/// Projected gradient descent with a Barzilai-Borwein trial step and
/// monotone backtracking line search; each accepted step retracts every
/// free sample back onto the manifold. Deterministic.
MinimizeResult minimize_curve(DiscreteCurve init, const PriorField& A,
                              const MinimizeOptions& opts = {});

/// u -> x(-u): reversed points, reversed and negated times, pinned indices
/// remapped.
DiscreteCurve reverse_data(const DiscreteCurve& curve);

/// Reversed waypoint data: order flipped, times negated and reversed.
std::pair<std::vector<double>, std::vector<Vec>> reverse_scenario(
    const std::vector<double>& waypoint_times, const std::vector<Vec>& waypoints);

/// Simpson value of the functional on a converged discrete curve, with
/// second-order central-difference velocities (reporting quadrature; the
/// optimizer itself uses discrete_J).
double report_J(const DiscreteCurve& curve, const PriorField& A);

}  // namespace condex
