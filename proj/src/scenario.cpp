#include "condex/scenario.hpp"

#include "condex/affine_extremal.hpp"
#include "condex/figure.hpp"
#include "condex/quaternion.hpp"
#include "condex/space_form.hpp"
#include "condex/variational.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace condex {

using nlohmann::ordered_json;

namespace {

int line_of_offset(const std::string& text, std::size_t offset) {
  int line = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

Vec to_vec(const ordered_json& arr, const char* what) {
  if (!arr.is_array() || arr.empty())
    throw std::invalid_argument(std::string(what) + ": expected a number array");
  Vec v(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) v[i] = arr[i].get<double>();
  return v;
}

ManifoldTag parse_manifold(const ordered_json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "sphere") return ManifoldTag::sphere();
  if (kind == "hyperboloid") return ManifoldTag::hyperboloid();
  if (kind == "unit_quaternions") return ManifoldTag::unit_quaternions();
  if (kind == "euclidean") return ManifoldTag::euclidean(j.value("dim", 2));
  throw std::invalid_argument("manifold.kind: unknown value '" + kind + "'");
}

PriorField parse_prior(const ordered_json& j, const ManifoldTag& tag) {
  const std::string family = j.at("family").get<std::string>();
  if (family == "symmetric") {
    if (tag.kind != ManifoldKind::SpaceForm)
      throw std::invalid_argument("prior: symmetric family needs a space form");
    return PriorField::symmetric(tag.sigma, j.at("beta").get<double>(),
                                 j.at("gamma").get<double>());
  }
  if (family == "constant") return PriorField::constant_e(to_vec(j.at("c"), "prior.c"));
  if (family == "affine") {
    const auto& bj = j.at("B");
    Mat B(bj.size(), bj.size());
    for (std::size_t r = 0; r < bj.size(); ++r)
      for (std::size_t c = 0; c < bj.size(); ++c)
        B(r, c) = bj[r][c].get<double>();
    return PriorField::affine_e(B, to_vec(j.at("c"), "prior.c"));
  }
  if (family == "left_invariant_s3") {
    const Vec a = to_vec(j.at("a_l"), "prior.a_l");
    return PriorField::left_invariant_s3(Eigen::Vector3d(a));
  }
  throw std::invalid_argument("prior.family: unknown value '" + family + "'");
}

}  // namespace

ScenarioConfig parse_scenario(const std::string& json_text,
                              std::vector<std::string>* warnings) {
  ordered_json j;
  try {
    j = ordered_json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("scenario parse error at line " +
                                std::to_string(line_of_offset(json_text, e.byte)) +
                                ": " + e.what());
  }

  ScenarioConfig cfg;
  cfg.source_text = json_text;
  cfg.name = j.value("name", "scenario");
  cfg.manifold = parse_manifold(j.at("manifold"));
  cfg.prior = parse_prior(j.at("prior"), cfg.manifold);
  if (j.at("prior").contains("optimize"))
    cfg.optimize_prior = j.at("prior").at("optimize").get<bool>();

  if (j.contains("waypoints")) {
    for (const auto& w : j.at("waypoints")) {
      cfg.waypoint_times.push_back(w.at("t").get<double>());
      Vec p = to_vec(w.at("point"), "waypoint.point");
      if (p.size() != cfg.manifold.ambient_dim())
        throw std::invalid_argument("waypoint dimension mismatch");
      // auto-project near-manifold inputs (constraint defect below 1e-3),
      // reject the rest
      const double defect = std::abs(constraint_residual(cfg.manifold, p));
      if (defect > 1e-3)
        throw std::invalid_argument("waypoint violates the " +
                                    cfg.manifold.name() + " constraint by " +
                                    format_g17(defect));
      const Vec proj = project_point(cfg.manifold, p);
      if (defect > 10 * kTolManifold && warnings) {
        char msg[128];
        std::snprintf(msg, sizeof msg,
                      "waypoint projected onto %s (defect %.2e, moved %.2e)",
                      cfg.manifold.name().c_str(), defect, (proj - p).norm());
        warnings->push_back(msg);
      }
      cfg.waypoints.push_back(proj);
    }
  }
  for (std::size_t i = 1; i < cfg.waypoint_times.size(); ++i)
    if (!(cfg.waypoint_times[i] > cfg.waypoint_times[i - 1]))
      throw std::invalid_argument("waypoint times must be strictly increasing");

  if (j.contains("initial_velocity"))
    cfg.initial_velocity = to_vec(j.at("initial_velocity"), "initial_velocity");
  if (j.contains("horizon")) cfg.horizon = j.at("horizon").get<double>();
  if (j.contains("horizontal_form")) {
    if (cfg.manifold.kind != ManifoldKind::SpaceForm)
      throw std::invalid_argument("horizontal_form: needs a space form");
    const auto& hj = j.at("horizontal_form");
    HorizontalForm hf;
    hf.sigma = cfg.manifold.sigma;
    hf.lambda = hj.at("lambda").get<double>();
    hf.eps = hj.at("eps").get<double>();
    hf.v0 = hj.value("v0", 0.0);
    hf.psi0 = hj.value("psi0", 0.0);
    hf.beta = std::get<PriorField::Symmetric>(cfg.prior.family).beta(0.0);
    hf.sign3 = hj.value("sign3", 1);
    hf.signpsi = hj.value("signpsi", 1);
    cfg.horizontal_form = hf;
  }

  const std::string solver = j.value("solver", "all");
  if (solver == "closed_form") cfg.solver = SolverChoice::ClosedForm;
  else if (solver == "shoot") cfg.solver = SolverChoice::Shoot;
  else if (solver == "variational") cfg.solver = SolverChoice::Variational;
  else if (solver == "all") cfg.solver = SolverChoice::All;
  else throw std::invalid_argument("solver: unknown value '" + solver + "'");

  if (j.contains("grid")) {
    cfg.grid.n = j.at("grid").value("n", cfg.grid.n);
    cfg.grid.step = j.at("grid").value("step", cfg.grid.step);
  }
  cfg.seed = j.value("seed", 0u);
  if (j.contains("output") && j.at("output").contains("dir"))
    cfg.output_dir = j.at("output").at("dir").get<std::string>();
  return cfg;
}

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string content_hash(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string curve_to_csv(const ExtremalCurve& curve, const PriorField& prior,
                         const std::string& scenario_hash) {
  const int d = curve.tag.ambient_dim();
  std::ostringstream out;
  out << "# " << kToolVersion << " scenario=" << scenario_hash
      << " manifold=" << curve.tag.name() << " b=" << format_g17(curve.b);
  if (curve.c) out << " c=" << format_g17(*curve.c);
  if (!curve.segments.empty()) {
    out << " segments=";
    for (std::size_t i = 0; i < curve.segments.size(); ++i)
      out << (i ? ";" : "") << curve.segments[i];
  }
  out << "\n";
  out << "t";
  for (int i = 0; i < d; ++i) out << ",x" << i;
  for (int i = 0; i < d; ++i) out << ",v" << i;
  out << ",integrand,res_energy";
  const bool rot = curve.c.has_value();
  if (rot) out << ",res_rot";
  out << "\n";

  const auto* sym = std::get_if<PriorField::Symmetric>(&prior.family);
  for (std::size_t k = 0; k < curve.size(); ++k) {
    const EmbeddedPoint p{curve.tag, curve.points[k]};
    const Vec a = eval_field(prior, p).vec;
    const Vec diff = curve.velocities[k] - a;
    const double integrand = metric_inner(curve.tag, diff, diff);
    const double energy =
        metric_inner(curve.tag, curve.velocities[k], curve.velocities[k]) -
        metric_inner(curve.tag, a, a) - curve.b;
    out << format_g17(curve.times[k]);
    for (int i = 0; i < d; ++i) out << ',' << format_g17(curve.points[k][i]);
    for (int i = 0; i < d; ++i) out << ',' << format_g17(curve.velocities[k][i]);
    out << ',' << format_g17(integrand) << ',' << format_g17(energy);
    if (rot) {
      const double x3 = curve.points[k][2];
      const double w = curve.tag.sigma * (curve.points[k][0] * curve.velocities[k][1] -
                                          curve.points[k][1] * curve.velocities[k][0]);
      const double res =
          w - (sym ? sym->beta(x3) : 0.0) * (1.0 - x3 * x3) - *curve.c;
      out << ',' << format_g17(res);
    }
    out << "\n";
  }
  return out.str();
}

ExtremalCurve curve_from_csv(const std::string& text, const ManifoldTag& tag) {
  ExtremalCurve curve;
  curve.tag = tag;
  std::istringstream in(text);
  std::string line;
  const int d = tag.ambient_dim();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream hs(line);
      std::string tok;
      while (hs >> tok) {
        if (tok.rfind("b=", 0) == 0) curve.b = std::strtod(tok.c_str() + 2, nullptr);
        if (tok.rfind("c=", 0) == 0) curve.c = std::strtod(tok.c_str() + 2, nullptr);
        if (tok.rfind("segments=", 0) == 0) {
          std::istringstream ss(tok.substr(9));
          std::string part;
          while (std::getline(ss, part, ';'))
            curve.segments.push_back(std::stoul(part));
        }
      }
      continue;
    }
    if (line[0] == 't') continue;  // column header
    std::istringstream ls(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ls, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
    if (static_cast<int>(row.size()) < 1 + 2 * d)
      throw std::invalid_argument("curve_from_csv: short row");
    curve.times.push_back(row[0]);
    Vec p(d), v(d);
    for (int i = 0; i < d; ++i) p[i] = row[1 + i];
    for (int i = 0; i < d; ++i) v[i] = row[1 + d + i];
    curve.points.push_back(std::move(p));
    curve.velocities.push_back(std::move(v));
  }
  return curve;
}

namespace {

ordered_json vec_json(const Vec& v) {
  ordered_json a = ordered_json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

// Uniformly resampled closed-form S^3 track through the waypoints.
ExtremalCurve s3_track(const std::vector<SegmentSolution>& segs, int per_seg) {
  std::vector<ExtremalCurve> curves;
  for (const auto& seg : segs) {
    ExtremalCurve c;
    c.tag = ManifoldTag::unit_quaternions();
    for (int i = 0; i <= per_seg; ++i) {
      const double t =
          seg.t_start + (seg.t_end - seg.t_start) * static_cast<double>(i) / per_seg;
      c.times.push_back(t);
      c.points.push_back(segment_eval(seg, t).vec4());
      c.velocities.push_back(segment_velocity(seg, t));
    }
    c.b = (seg.a_l + seg.b_l).squaredNorm() - seg.a_l.squaredNorm();
    curves.push_back(std::move(c));
  }
  return track_sum(curves);
}

// Deterministic generator fits from several seeds; lowest cost wins.
PriorFitResult fit_prior_multistart(std::span<const QuatObservation> obs) {
  std::vector<Eigen::Vector3d> inits;
  inits.emplace_back(Eigen::Vector3d::Zero());
  Eigen::Vector3d avg = Eigen::Vector3d::Zero();
  for (std::size_t k = 0; k + 1 < obs.size(); ++k)
    avg += qlog(obs[k + 1].point * obs[k].point.conjugate()) /
           (obs[k + 1].t - obs[k].t);
  avg /= static_cast<double>(obs.size() - 1);
  inits.push_back(avg);
  inits.push_back(0.5 * avg);
  PriorFitResult best;
  best.cost = std::numeric_limits<double>::infinity();
  for (const auto& i0 : inits) {
    const PriorFitResult r = optimize_prior_AL(obs, i0);
    if (r.cost < best.cost) best = r;
  }
  return best;
}

struct RunContext {
  const ScenarioConfig& cfg;
  std::string hash;
  ScenarioReport& rep;
  ordered_json& summary;
  std::vector<ExtremalCurve> figure_curves;

  void add_curve(const std::string& solver, ExtremalCurve curve) {
    rep.csv_files[cfg.name + "_" + solver + ".csv"] =
        curve_to_csv(curve, cfg.prior, hash);
    figure_curves.push_back(std::move(curve));
  }
};

void run_closed_form(RunContext& ctx) {
  const ScenarioConfig& cfg = ctx.cfg;
  ordered_json out;
  switch (cfg.manifold.kind) {
    case ManifoldKind::Euclidean: {
      const auto* aff = std::get_if<PriorField::AffineE>(&cfg.prior.family);
      if (!aff) throw std::invalid_argument("closed form on E^m needs an affine prior");
      if (cfg.waypoints.size() != 2)
        throw std::invalid_argument("affine closed form needs two waypoints");
      const auto es = solve_endpoint_d(aff->B, aff->c, cfg.waypoints[0],
                                       cfg.waypoints[1], cfg.waypoint_times[0],
                                       cfg.waypoint_times[1]);
      if (es.status != EndpointSolveStatus::Ok)
        throw std::runtime_error("degenerate endpoint map (singular)");
      const AffineExtremal sol{aff->B, aff->c, cfg.waypoints[0], es.d,
                               cfg.waypoint_times[0]};
      ExtremalCurve curve;
      curve.tag = cfg.manifold;
      const int n = cfg.grid.n;
      for (int i = 0; i <= n; ++i) {
        const double t = cfg.waypoint_times[0] +
                         (cfg.waypoint_times[1] - cfg.waypoint_times[0]) * i / double(n);
        curve.times.push_back(t);
        curve.points.push_back(affine_extremal_eval(sol, t));
        curve.velocities.push_back(affine_extremal_velocity(sol, t));
      }
      const Vec a0 = aff->B * curve.points[0] + aff->c;
      curve.b = curve.velocities[0].squaredNorm() - a0.squaredNorm();
      out["J"] = functional_J(curve, cfg.prior);
      out["d"] = vec_json(es.d);
      ctx.add_curve("closed_form", std::move(curve));
      break;
    }
    case ManifoldKind::UnitQuaternions: {
      const auto* li = std::get_if<PriorField::LeftInvariantS3>(&cfg.prior.family);
      if (!li) throw std::invalid_argument("closed form on S^3 needs a left-invariant prior");
      if (cfg.waypoints.size() < 2)
        throw std::invalid_argument("S^3 closed form needs waypoints");
      std::vector<QuatObservation> obs;
      for (std::size_t k = 0; k < cfg.waypoints.size(); ++k)
        obs.push_back({Quat::from_vec4(cfg.waypoints[k]), cfg.waypoint_times[k]});

      Eigen::Vector3d a_l = li->a_l;
      if (cfg.optimize_prior) {
        const PriorFitResult fit = fit_prior_multistart(obs);
        a_l = fit.a_l;
        out["a_l"] = vec_json(Vec(a_l));
        out["fit_cost"] = fit.cost;
        out["fit_iterations"] = fit.iterations;
        const auto rep = stationarity_residual(a_l, obs);
        ordered_json bls = ordered_json::array();
        for (const auto& b : rep.b_ls) bls.push_back(vec_json(Vec(b)));
        out["b_ls"] = bls;
        out["sum_b_norm"] = rep.plain_sum.norm();
        out["weighted_sum_norm"] = rep.weighted_sum.norm();
      }
      // extremal track through the waypoints for this generator
      std::vector<SegmentSolution> segs;
      double J = 0.0;
      for (std::size_t k = 0; k + 1 < obs.size(); ++k) {
        segs.push_back(make_segment(a_l, obs[k].point, obs[k + 1].point,
                                    obs[k].t, obs[k + 1].t));
        J += segment_cost(segs.back());
      }
      out["J"] = J;
      if (segs.size() == 1) out["b_l"] = vec_json(Vec(segs[0].b_l));
      ctx.add_curve("closed_form", s3_track(segs, cfg.grid.n));
      break;
    }
    case ManifoldKind::SpaceForm: {
      const auto* sym = std::get_if<PriorField::Symmetric>(&cfg.prior.family);
      if (!sym) throw std::invalid_argument("closed form on a space form needs the symmetric prior");
      if (cfg.horizontal_form) {
        const HorizontalForm& hf = *cfg.horizontal_form;
        const double t0 = cfg.waypoint_times.empty() ? 0.0 : cfg.waypoint_times[0];
        const double t1 = cfg.horizon ? *cfg.horizon : t0 + 1.0;
        out["family"] = "horizontal";
        out["lambda"] = hf.lambda;
        out["eps"] = hf.eps;
        out["b"] = hf.energy_constant();
        out["c"] = hf.rot_constant();
        ExtremalCurve curve = sample_horizontal_curve(hf, t0, t1, cfg.grid.n);
        out["J"] = functional_J(curve, cfg.prior);
        out["J_reversed"] = functional_J(reverse_curve(curve), cfg.prior);
        ctx.add_curve("closed_form", std::move(curve));
        break;
      }
      if (cfg.waypoints.empty() || !cfg.initial_velocity)
        throw std::invalid_argument(
            "space-form closed form needs a start waypoint and initial_velocity");
      const EmbeddedPoint x0{cfg.manifold, cfg.waypoints[0]};
      const TangentVec v0 = project_to_tangent(x0, *cfg.initial_velocity);
      const double t0 = cfg.waypoint_times[0];
      const double t1 = cfg.horizon ? *cfg.horizon : cfg.waypoint_times.back();
      if (!(t1 > t0)) throw std::invalid_argument("empty closed-form time span");

      const SymmetricScenario sc =
          conserved_constants(sym->sigma, sym->beta, sym->gamma, x0, v0);
      out["b"] = sc.b;
      out["c"] = sc.c;
      out["d"] = sc.d;
      ExtremalCurve curve;
      const double gamma = sym->gamma(x0.coords[2]);
      if (!sym->gamma.is_constant || !sym->beta.is_constant)
        throw std::invalid_argument("closed forms need constant coefficients");
      if (gamma == 0.0) {
        out["family"] = "horizontal";
        try {
          const HorizontalForm hf =
              derive_horizontal_form(sym->sigma, sym->beta(0.0), x0, v0);
          out["lambda"] = hf.lambda;
          out["eps"] = hf.eps;
          curve = sample_horizontal_curve(hf, t0, t1, cfg.grid.n);
        } catch (const std::domain_error&) {
          // constant-x3 family: emit the equatorial/latitude circle directly
          out["family"] = "constant_x3";
          const double x30 = x0.coords[2];
          const double r = std::sqrt(sym->sigma * (1.0 - x30 * x30));
          const double omega =
              (x0.coords[0] * v0.vec[1] - x0.coords[1] * v0.vec[0]) / (r * r);
          const double psi0 = std::atan2(x0.coords[1], x0.coords[0]);
          curve.tag = cfg.manifold;
          for (int i = 0; i <= cfg.grid.n; ++i) {
            const double t = t0 + (t1 - t0) * i / double(cfg.grid.n);
            const double ps = omega * (t - t0) + psi0;
            curve.times.push_back(t);
            curve.points.push_back(
                Eigen::Vector3d(r * std::cos(ps), r * std::sin(ps), x30));
            curve.velocities.push_back(Eigen::Vector3d(
                -r * omega * std::sin(ps), r * omega * std::cos(ps), 0.0));
          }
          const Vec af = eval_field(cfg.prior, x0).vec;
          curve.b = metric_inner(cfg.manifold, v0.vec, v0.vec) -
                    metric_inner(cfg.manifold, af, af);
          curve.c = sc.c;
        }
      } else {
        out["family"] = "weierstrass";
        const WeierstrassForm wf =
            make_weierstrass_form(sc, x0.coords[2], v0.vec[2]);
        out["delta_bar"] = wf.delta_bar;
        out["g2"] = wf.g2;
        out["g3"] = wf.g3;
        out["a_re"] = wf.a.real();
        out["a_im"] = wf.a.imag();
        out["wp_period"] = wf.period;
        out["x3_period"] = x3_period(wf);
        const double psi0 = std::atan2(x0.coords[1], x0.coords[0]);
        curve = sample_weierstrass_curve(sc, wf, psi0, t0, t1, cfg.grid.n);
      }
      out["J"] = functional_J(curve, cfg.prior);
      out["J_reversed"] = functional_J(reverse_curve(curve), cfg.prior);
      ctx.add_curve("closed_form", std::move(curve));
      break;
    }
  }
  ctx.summary["closed_form"] = out;
}

void run_shoot(RunContext& ctx) {
  const ScenarioConfig& cfg = ctx.cfg;
  if (cfg.waypoints.size() < 2)
    throw std::invalid_argument("shoot needs at least two waypoints");
  ordered_json out;
  std::vector<ExtremalCurve> legs;
  double worst_res = 0.0;
  ordered_json v0s = ordered_json::array();
  for (std::size_t k = 0; k + 1 < cfg.waypoints.size(); ++k) {
    const EmbeddedPoint a{cfg.manifold, cfg.waypoints[k]};
    const EmbeddedPoint b{cfg.manifold, cfg.waypoints[k + 1]};
    ShootOptions opts;
    opts.step = cfg.grid.step;
    opts.seed = cfg.seed + static_cast<unsigned>(k);
    // start from the closed form's own velocity (or the scenario's initial
    // velocity) when one is named, so shooting reproduces that extremal
    // rather than a nearby one; otherwise aim along the chord
    TangentVec init = project_to_tangent(
        a, (b.coords - a.coords) /
               (cfg.waypoint_times[k + 1] - cfg.waypoint_times[k]));
    if (cfg.horizontal_form)
      init = project_to_tangent(
          a, horizontal_velocity(*cfg.horizontal_form, cfg.waypoint_times[k]).vec);
    else if (k == 0 && cfg.initial_velocity)
      init = project_to_tangent(a, *cfg.initial_velocity);
    const auto res = shoot_bvp(cfg.prior, a, b, cfg.waypoint_times[k],
                               cfg.waypoint_times[k + 1], init, opts);
    if (res.status != ShootStatus::Converged)
      throw std::runtime_error("shooting failed on segment " + std::to_string(k) +
                               " (best residual " + format_g17(res.residual) + ")");
    worst_res = std::max(worst_res, res.residual);
    v0s.push_back(vec_json(res.v0));
    legs.push_back(res.curve);
  }
  ExtremalCurve track = track_sum(legs);
  out["J"] = functional_J(track, cfg.prior);
  out["residual"] = worst_res;
  out["segments"] = legs.size();
  out["v0"] = v0s;
  ctx.summary["shoot"] = out;
  ctx.add_curve("shoot", std::move(track));
}

void run_variational(RunContext& ctx) {
  const ScenarioConfig& cfg = ctx.cfg;
  if (cfg.waypoints.size() < 2)
    throw std::invalid_argument("variational needs at least two waypoints");
  ordered_json out;
  const DiscreteCurve init =
      geodesic_init(cfg.manifold, cfg.waypoint_times, cfg.waypoints, cfg.grid.n);
  const auto res = minimize_curve(init, cfg.prior, {});
  out["J_discrete"] = res.J;
  out["J"] = report_J(res.curve, cfg.prior);
  out["iterations"] = res.iterations;
  out["converged"] = res.converged;
  out["line_search_stalled"] = res.line_search_stalled;

  // reversal experiment: minimize the reversed data too and cross-evaluate
  const auto [rt, rp] = reverse_scenario(cfg.waypoint_times, cfg.waypoints);
  const auto rres =
      minimize_curve(geodesic_init(cfg.manifold, rt, rp, cfg.grid.n), cfg.prior, {});
  out["J_reverse_min"] = rres.J;
  out["J_reverse_of_forward_min"] = discrete_J(reverse_data(res.curve), cfg.prior);
  out["J_forward_of_reverse_min"] = discrete_J(reverse_data(rres.curve), cfg.prior);

  ExtremalCurve curve;
  curve.tag = cfg.manifold;
  const int n = res.curve.samples();
  for (int i = 0; i < n; ++i) {
    curve.times.push_back(res.curve.times[i]);
    curve.points.push_back(res.curve.points.col(i));
    if (i + 1 < n) {
      const double h = res.curve.times[i + 1] - res.curve.times[i];
      curve.velocities.push_back(
          (res.curve.points.col(i + 1) - res.curve.points.col(i)) / h);
    } else {
      curve.velocities.push_back(curve.velocities.back());
    }
  }
  const Vec a0 = eval_field(cfg.prior, EmbeddedPoint{cfg.manifold, curve.points[0]}).vec;
  curve.b = metric_inner(cfg.manifold, curve.velocities[0], curve.velocities[0]) -
            metric_inner(cfg.manifold, a0, a0);
  ctx.summary["variational"] = out;
  ctx.add_curve("variational", std::move(curve));
}

}  // namespace

ScenarioReport run_scenario(const ScenarioConfig& cfg) {
  ScenarioReport rep;
  ordered_json summary;
  summary["tool"] = kToolVersion;
  summary["scenario"] = cfg.name;
  const std::string hash = content_hash(cfg.source_text);
  summary["hash"] = hash;
  summary["manifold"] = cfg.manifold.name();
  summary["seed"] = cfg.seed;

  RunContext ctx{cfg, hash, rep, summary, {}};
  try {
    const bool all = cfg.solver == SolverChoice::All;
    if (all || cfg.solver == SolverChoice::ClosedForm) run_closed_form(ctx);
    if ((all && cfg.waypoints.size() >= 2) || cfg.solver == SolverChoice::Shoot)
      run_shoot(ctx);
    if ((all && cfg.waypoints.size() >= 2) || cfg.solver == SolverChoice::Variational)
      run_variational(ctx);

    if (!ctx.figure_curves.empty()) {
      std::vector<FigureCurve> fig;
      const char* colors[] = {"#c0392b", "#2e86c1", "#1e8449", "#8e44ad"};
      for (std::size_t i = 0; i < ctx.figure_curves.size(); ++i)
        fig.push_back({&ctx.figure_curves[i], colors[i % 4], 1.6});
      rep.svg_files[cfg.name + ".svg"] = emit_figure(fig, cfg.prior);
    }
    rep.ok = true;
  } catch (const std::exception& e) {
    rep.ok = false;
    rep.error = e.what();
    summary["error"] = e.what();
  }
  rep.summary_json = summary.dump(2) + "\n";
  return rep;
}

void write_report(const ScenarioReport& report, const std::string& name,
                  const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  auto write = [&](const std::string& fname, const std::string& content) {
    std::ofstream f(fs::path(out_dir) / fname, std::ios::binary);
    f << content;
  };
  write(name + "_summary.json", report.summary_json);
  for (const auto& [fname, content] : report.csv_files) write(fname, content);
  for (const auto& [fname, content] : report.svg_files) write(fname, content);
}

}  // namespace condex
