#pragma once

#include <map>
#include <string>
#include <vector>

namespace condex::verify {

/// One acceptance criterion's outcome. `expected_failure` marks the single
/// sub-check whose published target value is documented as unreproducible
/// (see README / the criterion's detail text): it stays red honestly but
/// does not flip the suite's exit status.
struct CheckResult {
  int id = 0;
  std::string name;
  bool passed = false;
  bool expected_failure = false;
  std::string details;
};

struct Outcome {
  std::vector<CheckResult> checks;
  std::map<std::string, std::string> files;  // bundled-scenario outputs

  /// True when every check passed except those marked expected_failure.
  bool acceptable() const;
  /// True when literally every check passed.
  bool all_passed() const;
};

/// Runs the full acceptance suite (all ten criteria) and produces the
/// bundled-scenario outputs used by the determinism check.
Outcome run_acceptance();

/// One pass/fail line per criterion.
std::string render_table(const Outcome& outcome);

/// The bundled scenario documents, keyed by name.
const std::map<std::string, std::string>& bundled_scenarios();

}  // namespace condex::verify
