#pragma once

#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "qxval/domain.h"
#include "qxval/rng.h"

namespace qxval {

/// The two link-level entanglement-generation protocols under comparison.
enum class ProtocolModel {
  kRoundTrain,        // QuISP-style: one setup handshake, then photon-train rounds
  kPerPairHandshake,  // SeQUeNCe-style: fresh negotiation every round, 4L/c each
};

std::string_view model_name(ProtocolModel m);  // "quisp" / "sequence"

/// One heralded pair: when the BSM succeeded and when each node learned of it.
/// "far" is the node at distance d from the BSA (node A after normalization),
/// "near" the one at L-d.
struct PairRecord {
  double creation_s = 0.0;
  double herald_far_s = 0.0;
  double herald_near_s = 0.0;
};

struct GenerationReport {
  double completion_s = 0.0;  // until the far node learns the N_Bell-th pair exists
  std::vector<PairRecord> pairs;
  std::int64_t rounds = 0;
  std::int64_t attempts = 0;
};

/// Combined probability of both photons reaching the BSA and a successful
/// BSM: 10^(-alpha d/10) * 10^(-alpha (L-d)/10) * p_bsm — depends on the
/// total length only, never on the BSA placement.
double success_probability(const LinkGeometry& geometry, const HardwareParams& hw);

/// Round-train protocol: two-way handshake (2L/c) + BSA timing message (d/c),
/// then rounds of t_wait + a photon train of N_mem attempts; the BSA batches
/// the round's results into one message. Requires a validated config
/// (d >= L/2). Throws SimulationError when p_succ == 0.
///
/// Draw order: exactly one uniform per photon attempt, in emission order
/// within each round; no other draws.
GenerationReport run_quisp_link(const Config& cfg, Rng& rng, std::ostream* trace = nullptr);

/// Per-pair-handshake protocol: every round is a fresh negotiation plus
/// emission/herald cycle costing exactly 4L/c regardless of d; N_mem memory
/// pairs run in parallel with multiplexing delays ignored.
///
/// Draw order: one uniform per attempt, in memory order within each round.
GenerationReport run_sequence_link(const Config& cfg, Rng& rng, std::ostream* trace = nullptr);

GenerationReport run_link(ProtocolModel model, const Config& cfg, Rng& rng,
                          std::ostream* trace = nullptr);

}  // namespace qxval
