#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace qxval {

/// Integer simulation clock in picoseconds.
///
/// Model formulas are evaluated in real seconds and rounded half-up to
/// picoseconds when scheduling, so 1 ns photon spacing and all Table-style
/// propagation delays are represented exactly and event ordering is
/// deterministic. seconds -> SimTime -> seconds round-trips exactly for
/// ps counts below 2^51 (about 26 days of simulated time).
class SimTime {
 public:
  constexpr SimTime() : ps_(0) {}

  static SimTime from_ps(std::int64_t ps);
  static SimTime from_seconds(double s);  // throws std::invalid_argument if s < 0 or not finite

  constexpr std::int64_t ps() const { return ps_; }
  double seconds() const { return static_cast<double>(ps_) / 1e12; }

  friend constexpr bool operator==(SimTime a, SimTime b) { return a.ps_ == b.ps_; }
  friend constexpr auto operator<=>(SimTime a, SimTime b) { return a.ps_ <=> b.ps_; }
  friend SimTime operator+(SimTime a, SimTime b) { return from_ps(a.ps_ + b.ps_); }

 private:
  explicit constexpr SimTime(std::int64_t ps) : ps_(ps) {}
  std::int64_t ps_;
};

/// Fiber link between two nodes with a Bell-state analyzer at offset d.
/// d is measured from node A; after validation d >= L/2 always holds
/// (endpoints are relabeled, not rejected), so node A is the far node.
struct LinkGeometry {
  double node_distance_km = 20.0;   // L
  double bsa_offset_km = 10.0;      // d, node A to BSA
  double light_speed_km_s = 2.0e5;  // c in fiber
  double attenuation_db_km = 0.2;   // alpha
};

struct HardwareParams {
  int n_memories = 1;                 // memories per node, >= 1
  double t_sep_s = 1e-9;              // photon-train spacing
  int t_wait_multiplier = 10;         // t_wait = multiplier * t_sep
  double p_bsm = 0.5;                 // BSM success probability given both photons arrive
  double repetition_rate_hz = 1.0e9;  // source repetition rate; t_sep >= 1/rate
};

inline constexpr int kPauliErrorCount = 15;  // {I,X,Y,Z}^2 minus I(x)I

struct NoiseParams {
  double p_gate = 0.0;
  double p_meas = 0.0;
  double coherence_time_s = std::numeric_limits<double>::infinity();  // tau
  double slice_duration_s = 1e-6;                                     // delta t
  // Weights over the 15 nontrivial two-qubit Paulis, row-major over
  // (first,second) in I,X,Y,Z order with I(x)I skipped. Uniform by default.
  std::array<double, kPauliErrorCount> pauli_weights{
      1.0 / 15, 1.0 / 15, 1.0 / 15, 1.0 / 15, 1.0 / 15,
      1.0 / 15, 1.0 / 15, 1.0 / 15, 1.0 / 15, 1.0 / 15,
      1.0 / 15, 1.0 / 15, 1.0 / 15, 1.0 / 15, 1.0 / 15};
};

struct RequestSpec {
  std::int64_t n_bell = 1000;
};

/// Protocol-level knobs that are not part of the published timing formulas.
struct ProtocolOptions {
  // Fraction of the 4L/c per-pair-handshake round spent on negotiation;
  // only intra-round timestamps depend on it, never the round total.
  double sequence_negotiation_fraction = 0.75;
  // Extra per-round BSA processing delay for the round-train model, added to
  // T_round in both the simulator and the oracle. Default matches the
  // published formulas (zero).
  double round_processing_delay_s = 0.0;
  std::uint64_t watchdog_events = 1'000'000'000;
};

struct Config {
  LinkGeometry geometry;
  HardwareParams hardware;
  NoiseParams noise;
  RequestSpec request;
  ProtocolOptions protocol;
  bool endpoints_swapped = false;  // set when validation relabeled A<->B
};

struct ConfigViolation {
  std::string field;    // e.g. "geometry.d_km"
  std::string message;  // names the violated bound
};

struct ValidationResult {
  std::vector<ConfigViolation> errors;
  std::optional<Config> config;  // normalized config, present iff errors empty

  bool ok() const { return errors.empty(); }
};

/// Checks every invariant and returns either the normalized configuration
/// (endpoint relabeling applied so d >= L/2, pauli weights renormalized) or
/// the full list of violations. Idempotent on its own output.
ValidationResult validate_config(const Config& cfg);

}  // namespace qxval
