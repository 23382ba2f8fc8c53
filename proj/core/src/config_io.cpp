#include "qxval/config_io.h"

#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

namespace qxval {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t");
  return s.substr(begin, end - begin + 1);
}

double parse_real(const std::string& v) {
  if (v == "inf") return std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  const double x = std::stod(v, &used);
  if (used != v.size()) throw std::invalid_argument("not a number: '" + v + "'");
  return x;
}

long long parse_int(const std::string& v) {
  std::size_t used = 0;
  const long long x = std::stoll(v, &used);
  if (used != v.size()) throw std::invalid_argument("not an integer: '" + v + "'");
  return x;
}

std::vector<double> parse_real_list(const std::string& v) {
  std::vector<double> out;
  std::string::size_type start = 0;
  for (;;) {
    const auto pos = v.find(',', start);
    const std::string item = trim(pos == std::string::npos ? v.substr(start) : v.substr(start, pos - start));
    if (item.empty()) throw std::invalid_argument("empty list element");
    out.push_back(parse_real(item));
    if (pos == std::string::npos) return out;
    start = pos + 1;
  }
}

std::vector<int> parse_int_list(const std::string& v) {
  std::vector<int> out;
  for (double x : parse_real_list(v)) {
    if (x != std::floor(x)) throw std::invalid_argument("expected integers");
    out.push_back(static_cast<int>(x));
  }
  return out;
}

using Setter = std::function<void(ParsedConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"geometry.L_km", [](ParsedConfig& c, const std::string& v) { c.domain.geometry.node_distance_km = parse_real(v); }},
      {"geometry.d_km", [](ParsedConfig& c, const std::string& v) { c.domain.geometry.bsa_offset_km = parse_real(v); }},
      {"geometry.c_km_s", [](ParsedConfig& c, const std::string& v) { c.domain.geometry.light_speed_km_s = parse_real(v); }},
      {"geometry.alpha_db_km", [](ParsedConfig& c, const std::string& v) { c.domain.geometry.attenuation_db_km = parse_real(v); }},
      {"hardware.n_memories", [](ParsedConfig& c, const std::string& v) { c.domain.hardware.n_memories = static_cast<int>(parse_int(v)); }},
      {"hardware.t_sep_s", [](ParsedConfig& c, const std::string& v) { c.domain.hardware.t_sep_s = parse_real(v); }},
      {"hardware.t_wait_multiplier", [](ParsedConfig& c, const std::string& v) { c.domain.hardware.t_wait_multiplier = static_cast<int>(parse_int(v)); }},
      {"hardware.p_bsm", [](ParsedConfig& c, const std::string& v) { c.domain.hardware.p_bsm = parse_real(v); }},
      {"hardware.repetition_rate_hz", [](ParsedConfig& c, const std::string& v) { c.domain.hardware.repetition_rate_hz = parse_real(v); }},
      {"noise.p_gate", [](ParsedConfig& c, const std::string& v) { c.domain.noise.p_gate = parse_real(v); }},
      {"noise.p_meas", [](ParsedConfig& c, const std::string& v) { c.domain.noise.p_meas = parse_real(v); }},
      {"noise.coherence_time_s", [](ParsedConfig& c, const std::string& v) { c.domain.noise.coherence_time_s = parse_real(v); }},
      {"noise.slice_duration_s", [](ParsedConfig& c, const std::string& v) { c.domain.noise.slice_duration_s = parse_real(v); }},
      {"noise.pauli_weights",
       [](ParsedConfig& c, const std::string& v) {
         const auto list = parse_real_list(v);
         if (list.size() != kPauliErrorCount)
           throw std::invalid_argument("pauli_weights needs exactly 15 entries, got " +
                                       std::to_string(list.size()));
         std::copy(list.begin(), list.end(), c.domain.noise.pauli_weights.begin());
       }},
      {"request.n_bell", [](ParsedConfig& c, const std::string& v) { c.domain.request.n_bell = parse_int(v); }},
      {"protocol.sequence_negotiation_fraction",
       [](ParsedConfig& c, const std::string& v) { c.domain.protocol.sequence_negotiation_fraction = parse_real(v); }},
      {"protocol.round_processing_delay_s",
       [](ParsedConfig& c, const std::string& v) { c.domain.protocol.round_processing_delay_s = parse_real(v); }},
      {"kernel.watchdog_events",
       [](ParsedConfig& c, const std::string& v) { c.domain.protocol.watchdog_events = static_cast<std::uint64_t>(parse_int(v)); }},
      {"experiment.id", [](ParsedConfig& c, const std::string& v) { c.experiment.experiment = static_cast<int>(parse_int(v)); }},
      {"experiment.replicas", [](ParsedConfig& c, const std::string& v) { c.experiment.replicas = static_cast<int>(parse_int(v)); }},
      {"experiment.trials", [](ParsedConfig& c, const std::string& v) { c.experiment.trials = static_cast<int>(parse_int(v)); }},
      {"experiment.seed", [](ParsedConfig& c, const std::string& v) { c.experiment.seed = static_cast<std::uint64_t>(parse_int(v)); }},
      {"experiment.jobs", [](ParsedConfig& c, const std::string& v) { c.experiment.jobs = static_cast<int>(parse_int(v)); }},
      {"experiment.n_mem_sweep", [](ParsedConfig& c, const std::string& v) { c.experiment.n_mem_sweep = parse_int_list(v); }},
      {"experiment.d_sweep_km", [](ParsedConfig& c, const std::string& v) { c.experiment.d_sweep_km = parse_real_list(v); }},
      {"experiment.p_g_grid", [](ParsedConfig& c, const std::string& v) { c.experiment.p_g_grid = parse_real_list(v); }},
      {"experiment.p_m_grid", [](ParsedConfig& c, const std::string& v) { c.experiment.p_m_grid = parse_real_list(v); }},
      {"experiment.tau_sweep_ms",
       [](ParsedConfig& c, const std::string& v) {
         auto list = parse_real_list(v);
         for (double& x : list) x *= 1e-3;
         c.experiment.tau_sweep_s = std::move(list);
       }},
  };
  return table;
}

}  // namespace

const std::vector<std::string>& known_config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    for (const auto& [key, setter] : setters()) out.push_back(key);
    return out;
  }();
  return keys;
}

ParsedConfig parse_config_text(const std::string& text) {
  ParsedConfig parsed;
  std::vector<std::string> problems;
  std::map<std::string, int> seen;

  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped.front() == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      problems.push_back("line " + std::to_string(line_no) + ": expected 'key = value'");
      continue;
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) {
      problems.push_back("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
      continue;
    }
    if (auto [pos, inserted] = seen.emplace(key, line_no); !inserted) {
      problems.push_back("line " + std::to_string(line_no) + ": duplicate key '" + key +
                         "' (first set on line " + std::to_string(pos->second) + ")");
      continue;
    }
    try {
      it->second(parsed, value);
    } catch (const std::exception& e) {
      problems.push_back("line " + std::to_string(line_no) + ": " + key + ": " + e.what());
    }
  }

  if (!problems.empty()) {
    std::string msg = "config parse failed:";
    for (const auto& p : problems) msg += " [" + p + "]";
    throw ConfigParseError(msg);
  }
  return parsed;
}

ParsedConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigParseError("cannot read config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

}  // namespace qxval
