#pragma once

#include "condex/extremal_ode.hpp"
#include "condex/prior_field.hpp"

#include <string>
#include <vector>

namespace condex {

/// One curve to draw and its stroke colour.
struct FigureCurve {
  const ExtremalCurve* curve;
  std::string color = "#c0392b";
  double width = 1.6;
};

struct FigureStyle {
  int size_px = 480;
  int field_orbits = 8;        // reference integral curves of the prior
  double orbit_span = 6.0;     // integration span per orbit
  bool draw_boundary = true;   // sphere outline / disc boundary
};

/// Renders curves that share a manifold: S^2 through a fixed orthographic
/// projection with hidden-hemisphere dimming, H^2 through the Poincare disc
/// chart, E^m by its first two coordinates, S^3 through the exponential
/// chart at the identity. Prior-field orbits are overlaid in black.
std::string emit_figure(const std::vector<FigureCurve>& curves,
                        const PriorField& prior, const FigureStyle& style = {});

}  // namespace condex
