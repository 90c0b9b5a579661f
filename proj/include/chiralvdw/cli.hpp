#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "chiralvdw/structured_text.hpp"

namespace chiralvdw {

// Run configuration, structured text:
//
//   scenario = scan                  # potential | scan | cavity | greens-dump
//   units = internal                 # internal | SI (lengths in, results out)
//   omega_ref = 4.134137333518e16    # rad/s
//   molecules { A = "preset:3mcp-like", B = "preset:rb-like" }
//   handedness { A = +1 }            # optional, overrides the molecule files
//   environment = plate              # free | plate | cavity
//   plate { z0 = 0, chirality = +1 }
//   quadrature { mode = nr, xi_nodes = 32, ... }
//
// plus scenario blocks (positions, grid, cavity, greens, calibration).
// Precedence: built-in defaults < config file < flags < --set overrides.
struct RunConfig {
  std::string scenario;
  TextDocument doc;      // effective configuration, echoed into every output
  std::string base_dir;  // relative molecule paths are also tried from here
};

const std::vector<std::string>& scenario_names();
TextDocument default_run_config(const std::string& scenario);

struct RunOverrides {
  std::vector<std::string> set;  // "key=value", dotted keys
  bool full = false;
  int nodes = 0;           // 0 = keep
  std::string handedness;  // "A=+1,C=-1"
  std::string out;
};

RunConfig make_run_config(const std::string& scenario, const std::string& config_path, const RunOverrides& overrides);
// Same, with the configuration given as text.
RunConfig make_run_config_from_text(const std::string& scenario, const std::string& text, const RunOverrides& overrides);

struct ScenarioOutput {
  std::string text;  // header + records
  std::vector<std::string> warnings;
};
ScenarioOutput run_scenario(const RunConfig& cfg);

// Exit codes: 0 success, 1 configuration, 2 numerical failure, 3 I/O.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Extracts the configuration echoed into an output header.
std::string echoed_config(const std::string& output);

}  // namespace chiralvdw
