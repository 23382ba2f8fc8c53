#include "qxval/domain.h"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace qxval {

SimTime SimTime::from_ps(std::int64_t ps) {
  if (ps < 0) throw std::invalid_argument("SimTime: negative picosecond count");
  return SimTime(ps);
}

SimTime SimTime::from_seconds(double s) {
  if (!(s >= 0.0) || !std::isfinite(s))
    throw std::invalid_argument("SimTime: time must be finite and nonnegative");
  const double ps = s * 1e12;
  if (ps >= 9.2e18) throw std::invalid_argument("SimTime: overflow");
  return SimTime(std::llround(ps));  // half away from zero == half-up for s >= 0
}

namespace {

void require(std::vector<ConfigViolation>& errors, bool ok, const char* field,
             const std::string& message) {
  if (!ok) errors.push_back({field, message});
}

std::string num(double v) {
  return std::to_string(v);
}

}  // namespace

ValidationResult validate_config(const Config& cfg) {
  ValidationResult result;
  auto& errs = result.errors;

  const auto& g = cfg.geometry;
  require(errs, g.node_distance_km > 0, "geometry.L_km", "L > 0 violated (got " + num(g.node_distance_km) + ")");
  require(errs, g.bsa_offset_km >= 0, "geometry.d_km", "d >= 0 violated (got " + num(g.bsa_offset_km) + ")");
  require(errs, g.bsa_offset_km <= g.node_distance_km, "geometry.d_km",
          "d <= L violated (got d=" + num(g.bsa_offset_km) + ", L=" + num(g.node_distance_km) + ")");
  require(errs, g.light_speed_km_s > 0, "geometry.c_km_s", "c > 0 violated (got " + num(g.light_speed_km_s) + ")");
  require(errs, g.attenuation_db_km >= 0, "geometry.alpha_db_km",
          "alpha >= 0 violated (got " + num(g.attenuation_db_km) + ")");

  const auto& h = cfg.hardware;
  require(errs, h.n_memories >= 1, "hardware.n_memories", "N_mem >= 1 violated (got " + std::to_string(h.n_memories) + ")");
  require(errs, h.t_sep_s > 0, "hardware.t_sep_s", "t_sep > 0 violated (got " + num(h.t_sep_s) + ")");
  require(errs, h.t_wait_multiplier >= 1, "hardware.t_wait_multiplier",
          "t_wait multiplier >= 1 violated (got " + std::to_string(h.t_wait_multiplier) + ")");
  require(errs, h.p_bsm >= 0 && h.p_bsm <= 1, "hardware.p_bsm", "p_bsm in [0,1] violated (got " + num(h.p_bsm) + ")");
  require(errs, h.repetition_rate_hz > 0, "hardware.repetition_rate_hz",
          "repetition rate > 0 violated (got " + num(h.repetition_rate_hz) + ")");
  if (h.t_sep_s > 0 && h.repetition_rate_hz > 0) {
    require(errs, h.t_sep_s >= 1.0 / h.repetition_rate_hz, "hardware.t_sep_s",
            "t_sep >= 1/repetition_rate violated (got t_sep=" + num(h.t_sep_s) +
                ", 1/rate=" + num(1.0 / h.repetition_rate_hz) + ")");
  }

  const auto& n = cfg.noise;
  require(errs, n.p_gate >= 0 && n.p_gate <= 1, "noise.p_gate", "p_gate in [0,1] violated (got " + num(n.p_gate) + ")");
  require(errs, n.p_meas >= 0 && n.p_meas <= 1, "noise.p_meas", "p_meas in [0,1] violated (got " + num(n.p_meas) + ")");
  require(errs, n.coherence_time_s > 0, "noise.coherence_time_s",
          "coherence time > 0 violated (got " + num(n.coherence_time_s) + ")");
  require(errs, n.slice_duration_s > 0 && std::isfinite(n.slice_duration_s), "noise.slice_duration_s",
          "slice duration > 0 violated (got " + num(n.slice_duration_s) + ")");
  double weight_sum = 0.0;
  bool weights_nonneg = true;
  for (double w : n.pauli_weights) {
    weight_sum += w;
    weights_nonneg = weights_nonneg && w >= 0;
  }
  require(errs, weights_nonneg, "noise.pauli_weights", "pauli weights must be nonnegative");
  require(errs, std::abs(weight_sum - 1.0) <= 1e-6, "noise.pauli_weights",
          "pauli weights must sum to 1 (got " + num(weight_sum) + ")");

  require(errs, cfg.request.n_bell >= 1, "request.n_bell",
          "N_Bell >= 1 violated (got " + std::to_string(cfg.request.n_bell) + ")");

  const auto& p = cfg.protocol;
  require(errs, p.sequence_negotiation_fraction >= 0 && p.sequence_negotiation_fraction <= 1,
          "protocol.sequence_negotiation_fraction",
          "fraction in [0,1] violated (got " + num(p.sequence_negotiation_fraction) + ")");
  require(errs, p.round_processing_delay_s >= 0, "protocol.round_processing_delay_s",
          "delay >= 0 violated (got " + num(p.round_processing_delay_s) + ")");
  require(errs, p.watchdog_events >= 1, "kernel.watchdog_events", "watchdog cap >= 1 violated");

  if (!errs.empty()) return result;

  Config normalized = cfg;
  if (normalized.geometry.bsa_offset_km < normalized.geometry.node_distance_km / 2) {
    // The link is symmetric under endpoint exchange; relabel so d >= L/2.
    normalized.geometry.bsa_offset_km = normalized.geometry.node_distance_km - normalized.geometry.bsa_offset_km;
    normalized.endpoints_swapped = !normalized.endpoints_swapped;
  }
  // Renormalize only when the sum is meaningfully off; re-validating an
  // already-normalized config must change nothing, including weight bits.
  if (std::abs(weight_sum - 1.0) > 1e-12) {
    for (double& w : normalized.noise.pauli_weights) w /= weight_sum;
  }
  result.config = normalized;
  return result;
}

}  // namespace qxval
