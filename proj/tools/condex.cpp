#include "condex/scenario.hpp"
#include "condex/verify.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

int run_command(const std::string& scenario_path, const std::string& solver,
                std::string out_dir, bool out_given, int seed) {
  std::vector<std::string> warnings;
  condex::ScenarioConfig cfg;
  try {
    cfg = condex::parse_scenario(slurp(scenario_path), &warnings);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  if (!out_given && cfg.output_dir) out_dir = *cfg.output_dir;
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
  if (!solver.empty()) {
    if (solver == "closed_form") cfg.solver = condex::SolverChoice::ClosedForm;
    else if (solver == "shoot") cfg.solver = condex::SolverChoice::Shoot;
    else if (solver == "variational") cfg.solver = condex::SolverChoice::Variational;
    else if (solver == "all") cfg.solver = condex::SolverChoice::All;
    else {
      std::cerr << "error: unknown solver '" << solver << "'\n";
      return 2;
    }
  }
  if (seed >= 0) cfg.seed = static_cast<unsigned>(seed);

  const condex::ScenarioReport rep = condex::run_scenario(cfg);
  condex::write_report(rep, cfg.name, out_dir);
  std::cout << rep.summary_json;
  if (!rep.ok) {
    std::cerr << "error: " << rep.error << "\n";
    return 1;
  }
  return 0;
}

int verify_command(const std::string& out_dir) {
  const condex::verify::Outcome outcome = condex::verify::run_acceptance();
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  for (const auto& [name, content] : outcome.files) {
    std::ofstream f(fs::path(out_dir) / name, std::ios::binary);
    f << content;
  }
  std::cout << condex::verify::render_table(outcome);
  std::cout << (outcome.acceptable() ? "VERIFY: acceptable\n" : "VERIFY: FAILED\n");
  return outcome.acceptable() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"conditional extrema on space forms and the quaternion group"};
  app.require_subcommand(1);

  std::string scenario_path, solver, out_dir = "out";
  int seed = -1;

  CLI::App* run = app.add_subcommand("run", "run one scenario file");
  run->add_option("scenario", scenario_path, "scenario JSON path")->required();
  run->add_option("--solver", solver, "closed_form | shoot | variational | all");
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--seed", seed, "override the scenario seed");

  CLI::App* verify = app.add_subcommand("verify", "run the acceptance suite");
  verify->add_option("--out", out_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed())
      return run_command(scenario_path, solver, out_dir,
                         run->count("--out") > 0, seed);
    return verify_command(out_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
