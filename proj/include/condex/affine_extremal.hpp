#pragma once

#include "condex/geometry.hpp"

namespace condex {

/// Closed-form extremal on E^m for the affine prior A(y) = By + c:
/// x(t) = e^{(t-t0)B} x0 + e^{tB} int_{t0}^t e^{-sB}(e^{-sB^T} d + c) ds.
struct AffineExtremal {
  Mat B;
  Vec c;
  Vec x0;
  Vec d;
  double t0 = 0.0;
};

/// Evaluates the closed form; the integral terms come from augmented-block
/// matrix exponentials rather than quadrature.
Vec affine_extremal_eval(const AffineExtremal& sol, double t);

/// x'(t) = B x(t) + e^{-tB^T} d + c.
Vec affine_extremal_velocity(const AffineExtremal& sol, double t);

enum class EndpointSolveStatus { Ok, Singular };

struct EndpointSolve {
  EndpointSolveStatus status = EndpointSolveStatus::Singular;
  Vec d;
};

/// Solves for the free constant d with x(t1) = x1. The endpoint map is
/// affine in d; a singular map is reported, never pseudo-inverted.
EndpointSolve solve_endpoint_d(const Mat& B, const Vec& c, const Vec& x0,
                               const Vec& x1, double t0, double t1);

}  // namespace condex
