#pragma once

// File-driven experiment configuration. One JSON config per run; unknown keys
// are rejected, defaults are filled, and identical config + seed produces
// byte-identical output files.

#include "oscspec/discrete.hpp"
#include "oscspec/potential.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace oscspec {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct VerifyConfig {
  int j_max = 5;
  int trials = 100;
  std::uint64_t seed = 1;
  int catalan_j_max = 12;
};

struct SimulateConfig {
  std::vector<double> etas{1.0};
  double x_max = 200.0;
  double theta0 = 0.0;
  double tol = 1e-10;
  double route_tolerance = 1e-6;
  double sample_step = 0.5;  // comparison checkpoints
};

struct ScanConfigFile {
  double eta_min = 0.5;
  double eta_max = 2.5;
  int n_grid = 2048;
  double x_max = 500.0;
  double growth_threshold = 1.0;
  double cap = 1e3;
  double tol = 1e-10;
  std::vector<double> dimension_scales;  // defaults derived from the grid
};

struct BoundConfig {
  std::vector<double> etas{2.0};
  double a = 0.0;
};

struct DiscreteConfig {
  // either raw alphas or structured terms (+ n)
  std::vector<std::complex<double>> alphas;
  std::vector<DiscreteTerm> terms;
  int n = 200;
  std::vector<double> etas{1.0};
  double theta0 = 0.0;
  double szego_tolerance = 1e-9;
  std::vector<double> oprl_a, oprl_b;
};

struct HolderConfig {
  std::vector<double> alphas{0.25, 0.5, 0.75};
  int psi_points = 101;
  int n_quad = 15;
  double slack = 1e-6;
};

struct Config {
  std::optional<Potential> potential;
  VerifyConfig verify;
  SimulateConfig simulate;
  ScanConfigFile scan;
  BoundConfig bound;
  DiscreteConfig discrete;
  HolderConfig holder;
  std::string out_dir = "out";
};

// Parses and validates; throws ConfigError naming the offending key.
Config load_config(const std::string& path);

// Shared schema for potential/coefficient term records.
Potential parse_potential_json(const std::string& json_text);

// cmd in {verify, simulate, scan, bound, discrete, holder}. Returns 0 on
// success, 1 when a module-level contract fails; usage errors surface as
// ConfigError before this runs. Thread count comes from OSCSPEC_THREADS.
int run_command(const std::string& cmd, const Config& cfg, const std::string& out_override = "");

}  // namespace oscspec
