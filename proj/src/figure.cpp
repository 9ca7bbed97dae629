#include "condex/figure.hpp"

#include "condex/quaternion.hpp"
#include "condex/space_form.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace condex {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

// Fixed orthographic camera for S^2 and the S^3 chart image.
struct Camera {
  Eigen::Vector3d view{0.25, -0.75, 0.35};
  Eigen::Vector3d right, up;
  Camera() {
    view.normalize();
    right = Eigen::Vector3d(0, 0, 1).cross(view).normalized();
    up = view.cross(right).normalized();
  }
  Eigen::Vector2d project(const Eigen::Vector3d& p) const {
    return {right.dot(p), up.dot(p)};
  }
  bool visible(const Eigen::Vector3d& p) const { return view.dot(p) >= 0.0; }
};

struct Mapped {
  Eigen::Vector2d xy;
  bool dim = false;
};

// Chart the curve into the plane per manifold.
std::vector<Mapped> map_points(const ManifoldTag& tag,
                               const std::vector<Vec>& pts,
                               const Camera& cam) {
  std::vector<Mapped> out;
  out.reserve(pts.size());
  for (const Vec& p : pts) {
    Mapped m;
    switch (tag.kind) {
      case ManifoldKind::SpaceForm:
        if (tag.sigma > 0) {
          m.xy = cam.project(p);
          m.dim = !cam.visible(p);
        } else {
          m.xy = poincare_map(p);
        }
        break;
      case ManifoldKind::Euclidean:
        m.xy = Eigen::Vector2d(p[0], p.size() > 1 ? p[1] : 0.0);
        break;
      case ManifoldKind::UnitQuaternions: {
        const Eigen::Vector3d chart = qlog(Quat::from_vec4(p));
        m.xy = cam.project(chart);
        break;
      }
    }
    out.push_back(m);
  }
  return out;
}

// Polyline split into sub-paths wherever visibility flips.
void append_path(std::ostringstream& svg, const std::vector<Mapped>& pts,
                 const std::string& color, double width, bool dim_pass,
                 double scale, double cx, double cy) {
  bool open = false;
  std::ostringstream d;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pts[i].dim != dim_pass) {
      open = false;
      continue;
    }
    const double x = cx + scale * pts[i].xy[0];
    const double y = cy - scale * pts[i].xy[1];
    d << (open ? " L " : " M ") << fmt(x) << ' ' << fmt(y);
    open = true;
  }
  const std::string path = d.str();
  if (path.empty()) return;
  svg << "  <path fill=\"none\" stroke=\"" << color << "\" stroke-width=\""
      << fmt(dim_pass ? width * 0.6 : width) << "\" stroke-opacity=\""
      << (dim_pass ? "0.25" : "1.0") << "\" d=\"" << path << "\"/>\n";
}

// Integral curves of the prior from a deterministic seed set.
std::vector<ExtremalCurve> field_orbits(const PriorField& prior, int count,
                                        double span) {
  std::vector<ExtremalCurve> orbits;
  const ManifoldTag tag = prior.manifold();
  std::vector<Vec> seeds;
  switch (tag.kind) {
    case ManifoldKind::SpaceForm:
      for (int i = 0; i < count; ++i) {
        const double h = tag.sigma > 0
                             ? -0.9 + 1.8 * (i + 0.5) / count
                             : 1.02 + 0.35 * i;
        const double r = std::sqrt(std::max(0.0, tag.sigma * (1 - h * h)));
        const double phi = 2.39996 * i;  // spread the longitudes
        seeds.push_back(Eigen::Vector3d(r * std::cos(phi), r * std::sin(phi), h));
      }
      break;
    case ManifoldKind::Euclidean:
      for (int i = 0; i < count; ++i) {
        Vec s = Vec::Zero(tag.dim);
        s[0] = std::cos(2.39996 * i) * (1.0 + 0.3 * i);
        if (tag.dim > 1) s[1] = std::sin(2.39996 * i) * (1.0 + 0.3 * i);
        seeds.push_back(s);
      }
      break;
    case ManifoldKind::UnitQuaternions:
      for (int i = 0; i < count; ++i) {
        const double a = 2.39996 * i;
        seeds.push_back(
            Quat{std::cos(a / 3), 0.4 * std::sin(a), 0.4 * std::cos(a),
                 0.3 * std::sin(a / 2)}
                .normalized()
                .vec4());
      }
      break;
  }
  for (const Vec& s : seeds) {
    ExtremalCurve orbit;
    orbit.tag = tag;
    Vec x = project_point(tag, s);
    const int steps = 240;
    const double h = span / steps;
    for (int k = 0; k <= steps; ++k) {
      orbit.times.push_back(k * h);
      orbit.points.push_back(x);
      orbit.velocities.push_back(eval_field(prior, EmbeddedPoint{tag, x}).vec);
      // RK4 flow step of x' = A(x)
      auto f = [&](const Vec& p) {
        return eval_field(prior, EmbeddedPoint{tag, project_point(tag, p)}).vec;
      };
      const Vec k1 = f(x), k2 = f(x + 0.5 * h * k1), k3 = f(x + 0.5 * h * k2),
                k4 = f(x + h * k3);
      x = project_point(tag, x + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4));
    }
    orbits.push_back(std::move(orbit));
  }
  return orbits;
}

}  // namespace

std::string emit_figure(const std::vector<FigureCurve>& curves,
                        const PriorField& prior, const FigureStyle& style) {
  if (curves.empty()) throw std::invalid_argument("emit_figure: no curves");
  const ManifoldTag tag = curves.front().curve->tag;
  for (const auto& fc : curves)
    if (fc.curve->tag != tag)
      throw std::invalid_argument("emit_figure: curves on different manifolds");
  if (prior.manifold() != tag)
    throw std::invalid_argument("emit_figure: prior on a different manifold");

  const Camera cam;
  const auto orbits = field_orbits(prior, style.field_orbits, style.orbit_span);

  // Common scale over everything drawn.
  double extent = 1.0;
  auto widen = [&](const std::vector<Mapped>& pts) {
    for (const auto& m : pts)
      extent = std::max({extent, std::abs(m.xy[0]), std::abs(m.xy[1])});
  };
  std::vector<std::vector<Mapped>> orbit_pts, curve_pts;
  for (const auto& o : orbits) orbit_pts.push_back(map_points(tag, o.points, cam));
  for (const auto& fc : curves)
    curve_pts.push_back(map_points(tag, fc.curve->points, cam));
  // the unit disc/sphere outline dominates unless the data runs farther
  if (tag.kind != ManifoldKind::SpaceForm)
    for (const auto& pts : curve_pts) widen(pts);

  const double cx = style.size_px / 2.0, cy = style.size_px / 2.0;
  const double scale = 0.45 * style.size_px / extent;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << style.size_px
      << "\" height=\"" << style.size_px << "\" viewBox=\"0 0 "
      << style.size_px << ' ' << style.size_px << "\">\n";
  svg << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (style.draw_boundary && tag.kind == ManifoldKind::SpaceForm) {
    svg << "  <circle cx=\"" << fmt(cx) << "\" cy=\"" << fmt(cy) << "\" r=\""
        << fmt(scale) << "\" fill=\"none\" stroke=\"#888888\" stroke-width=\"1\"/>\n";
  }
  for (const auto& pts : orbit_pts) {
    append_path(svg, pts, "#222222", 0.8, true, scale, cx, cy);
    append_path(svg, pts, "#222222", 0.8, false, scale, cx, cy);
  }
  for (std::size_t i = 0; i < curves.size(); ++i) {
    append_path(svg, curve_pts[i], curves[i].color, curves[i].width, true,
                scale, cx, cy);
    append_path(svg, curve_pts[i], curves[i].color, curves[i].width, false,
                scale, cx, cy);
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace condex
