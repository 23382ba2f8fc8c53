#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qxval/xval.h"

namespace qxval {

struct ConfigParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Experiment-level keys found in a config file; absent fields keep the
/// per-experiment defaults. Flags still override these.
struct ExperimentOverrides {
  std::optional<int> experiment;
  std::optional<int> replicas;
  std::optional<int> trials;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::optional<std::vector<int>> n_mem_sweep;
  std::optional<std::vector<double>> d_sweep_km;
  std::optional<std::vector<double>> p_g_grid;
  std::optional<std::vector<double>> p_m_grid;
  std::optional<std::vector<double>> tau_sweep_s;
};

struct ParsedConfig {
  Config domain;  // defaults with file overrides applied; not yet validated
  ExperimentOverrides experiment;
};

/// Parses the flat key/value grammar:
///   - one `namespaced.key = value` per line
///   - `#` starts a comment line; blank lines are ignored
///   - lists are comma-separated; `inf` is accepted for durations
/// Unknown or duplicate keys are errors; all problems are reported together
/// in the exception message.
ParsedConfig parse_config_text(const std::string& text);
ParsedConfig parse_config_file(const std::string& path);

/// The exhaustive list of accepted keys (for docs and error messages).
const std::vector<std::string>& known_config_keys();

}  // namespace qxval
