#include "qxval/linkgen.h"

#include <cmath>
#include <utility>

#include "qxval/kernel.h"

namespace qxval {

std::string_view model_name(ProtocolModel m) {
  return m == ProtocolModel::kRoundTrain ? "quisp" : "sequence";
}

double success_probability(const LinkGeometry& geometry, const HardwareParams& hw) {
  const double db_loss = geometry.attenuation_db_km * geometry.node_distance_km;
  return std::pow(10.0, -db_loss / 10.0) * hw.p_bsm;
}

namespace {

struct RoundTrainRun {
  const Config& cfg;
  Rng& rng;
  Simulator sim;
  double p_succ;

  // leg lengths in seconds of flight time
  double far_leg_s;   // BSA <-> far node (distance d)
  double near_leg_s;  // BSA <-> near node (distance L-d)
  double t_wait_s;
  double t_sep_s;
  int n_mem;

  GenerationReport report;
  std::int64_t successes = 0;
  std::vector<std::size_t> round_pair_indices;

  RoundTrainRun(const Config& c, Rng& r)
      : cfg(c), rng(r), sim(c.protocol.watchdog_events) {
    const auto& g = c.geometry;
    p_succ = success_probability(g, c.hardware);
    far_leg_s = g.bsa_offset_km / g.light_speed_km_s;
    near_leg_s = (g.node_distance_km - g.bsa_offset_km) / g.light_speed_km_s;
    t_sep_s = c.hardware.t_sep_s;
    t_wait_s = c.hardware.t_wait_multiplier * t_sep_s;
    n_mem = c.hardware.n_memories;
  }

  void start_round() {
    // Fired when the far node receives the BSA's timing/results message.
    round_pair_indices.clear();
    const double last_emission = t_wait_s + (n_mem - 1) * t_sep_s;
    for (int j = 0; j < n_mem; ++j)
      sim.schedule(t_wait_s + j * t_sep_s + far_leg_s, "bsm", [this] { on_bsm(); });
    const double results_sent = last_emission + far_leg_s + cfg.protocol.round_processing_delay_s;
    sim.schedule(results_sent + near_leg_s, "results_near", [this] { on_results_near(); });
    sim.schedule(results_sent + far_leg_s, "results_far", [this] { on_results_far(); });
  }

  void on_bsm() {
    ++report.attempts;
    if (!rng.bernoulli(p_succ)) return;
    if (successes >= cfg.request.n_bell) return;  // surplus in the final train is discarded
    ++successes;
    round_pair_indices.push_back(report.pairs.size());
    report.pairs.push_back(PairRecord{sim.now().seconds(), 0.0, 0.0});
  }

  void on_results_near() {
    const double now = sim.now().seconds();
    for (std::size_t idx : round_pair_indices) report.pairs[idx].herald_near_s = now;
  }

  void on_results_far() {
    const double now = sim.now().seconds();
    for (std::size_t idx : round_pair_indices) report.pairs[idx].herald_far_s = now;
    ++report.rounds;
    if (successes >= cfg.request.n_bell) {
      report.completion_s = now;
    } else {
      start_round();
    }
  }
};

}  // namespace

GenerationReport run_quisp_link(const Config& cfg, Rng& rng, std::ostream* trace) {
  if (success_probability(cfg.geometry, cfg.hardware) <= 0.0)
    throw SimulationError("unreachable request: success probability is zero");

  RoundTrainRun run(cfg, rng);
  run.sim.set_trace(trace);

  const double hop = cfg.geometry.node_distance_km / cfg.geometry.light_speed_km_s;  // L/c
  // Connection setup: request (far -> near), ack (near -> far), then the BSA
  // timing message, whose arrival at the far node starts round 1.
  run.sim.schedule(0.0, "request_sent", [&run, hop] {
    run.sim.schedule(hop, "request_received", [&run, hop] {
      run.sim.schedule(hop, "ack_received", [&run] {
        run.sim.schedule(run.near_leg_s, "timing_near", [] {});
        run.sim.schedule(run.far_leg_s, "timing_far", [&run] { run.start_round(); });
      });
    });
  });
  run.sim.run_until_idle();
  return std::move(run.report);
}

GenerationReport run_sequence_link(const Config& cfg, Rng& rng, std::ostream* trace) {
  const double p_succ = success_probability(cfg.geometry, cfg.hardware);
  if (p_succ <= 0.0)
    throw SimulationError("unreachable request: success probability is zero");

  Simulator sim(cfg.protocol.watchdog_events);
  sim.set_trace(trace);

  const double round_s = 4.0 * cfg.geometry.node_distance_km / cfg.geometry.light_speed_km_s;
  const double negotiation_s = cfg.protocol.sequence_negotiation_fraction * round_s;
  const int n_mem = cfg.hardware.n_memories;

  GenerationReport report;
  std::int64_t successes = 0;
  std::vector<std::size_t> round_pair_indices;

  // Each round: fresh negotiation, then all memory pairs attempt in parallel
  // (multiplexing delay ignored), heralds delivered at the round boundary.
  std::function<void()> start_round = [&] {
    round_pair_indices.clear();
    sim.schedule(negotiation_s, "emission", [&] {
      const double now = sim.now().seconds();
      for (int j = 0; j < n_mem; ++j) {
        ++report.attempts;
        if (rng.bernoulli(p_succ) && successes < cfg.request.n_bell) {
          ++successes;
          round_pair_indices.push_back(report.pairs.size());
          report.pairs.push_back(PairRecord{now, 0.0, 0.0});
        }
      }
    });
    sim.schedule(round_s, "round_done", [&] {
      const double now = sim.now().seconds();
      for (std::size_t idx : round_pair_indices) {
        report.pairs[idx].herald_far_s = now;
        report.pairs[idx].herald_near_s = now;
      }
      ++report.rounds;
      if (successes >= cfg.request.n_bell) {
        report.completion_s = now;
      } else {
        start_round();
      }
    });
  };
  sim.schedule(0.0, "negotiation_start", start_round);
  sim.run_until_idle();
  return report;
}

GenerationReport run_link(ProtocolModel model, const Config& cfg, Rng& rng, std::ostream* trace) {
  return model == ProtocolModel::kRoundTrain ? run_quisp_link(cfg, rng, trace)
                                             : run_sequence_link(cfg, rng, trace);
}

}  // namespace qxval
