#pragma once

#include "condex/extremal_ode.hpp"
#include "condex/prior_field.hpp"
#include "condex/space_form.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace condex {

struct GridSpec {
  int n = 400;        // variational samples per segment / closed-form samples
  double step = 1e-3; // integrator step
};

enum class SolverChoice { ClosedForm, Shoot, Variational, All };

/// One scenario: manifold, prior, waypoints, solver and grid options.
/// Parsed from a single JSON document.
struct ScenarioConfig {
  std::string name;
  ManifoldTag manifold;
  PriorField prior;
  bool optimize_prior = false;  // S^3: fit the generator to the waypoints
  std::vector<double> waypoint_times;
  std::vector<Vec> waypoints;
  std::optional<Vec> initial_velocity;  // initial-value style scenarios
  std::optional<double> horizon;        // end time when shooting from (x0, v0)
  std::optional<HorizontalForm> horizontal_form;  // explicit closed-form params
  SolverChoice solver = SolverChoice::All;
  GridSpec grid;
  unsigned seed = 0;
  std::optional<std::string> output_dir;  // default sink, CLI --out overrides
  std::string source_text;  // raw JSON, hashed into output headers

  ScenarioConfig() : manifold(ManifoldTag::sphere()), prior{PriorField::symmetric(1.0, 0.0, 0.0)} {}
};

/// Parses and validates a scenario document; error messages carry the line
/// number for syntax errors and the field path for semantic ones. Waypoints
/// within 1e-3 of the manifold are projected onto it (recorded in the
/// report's warnings), farther ones are rejected.
ScenarioConfig parse_scenario(const std::string& json_text,
                              std::vector<std::string>* warnings = nullptr);

/// Everything a run produces, kept in memory so callers control all I/O and
/// byte-level determinism is testable.
struct ScenarioReport {
  bool ok = false;
  std::string error;
  std::string summary_json;                       // deterministic serialization
  std::map<std::string, std::string> csv_files;   // filename -> content
  std::map<std::string, std::string> svg_files;   // filename -> content
};

ScenarioReport run_scenario(const ScenarioConfig& config);

/// Writes the report's files plus <name>_summary.json under out_dir.
void write_report(const ScenarioReport& report, const std::string& name,
                  const std::string& out_dir);

/// Fixed 17-significant-digit decimal formatting used for every CSV number.
std::string format_g17(double v);

/// Curve serialization: versioned header comment carrying the tool version
/// and the scenario hash, one row per sample.
std::string curve_to_csv(const ExtremalCurve& curve, const PriorField& prior,
                         const std::string& scenario_hash);

/// Inverse of curve_to_csv (used by the round-trip checks).
ExtremalCurve curve_from_csv(const std::string& text, const ManifoldTag& tag);

/// FNV-1a 64-bit content hash, hex-encoded; stamps outputs.
std::string content_hash(const std::string& text);

inline constexpr const char* kToolVersion = "condex 1.0.0";

}  // namespace condex
