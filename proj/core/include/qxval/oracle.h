#pragma once

#include <cstdint>

#include "qxval/domain.h"

namespace qxval::oracle {

/// Closed-form timing prediction for one link-generation run.
struct TimingPrediction {
  double t_setup_s = 0.0;   // zero for the per-pair-handshake model
  double t_round_s = 0.0;
  std::int64_t rounds = 0;  // k
  double t_exp_s = 0.0;     // t_setup + k * t_round, resp. k * 4L/c
};

/// k = ceil(N_Bell / (N_mem * p_succ)), evaluated with exact rational
/// arithmetic over the binary value of p_succ so 5023.9999... float artifacts
/// cannot shift the ceiling. Throws on p_succ <= 0.
std::int64_t expected_rounds(std::int64_t n_bell, int n_mem, double p_succ);

/// Round-train model: T_setup = 2L/c + d/c,
/// T_round = 2 d/c + (t_wait_mult + N_mem - 1) t_sep + processing_delay.
/// Requires a validated config (d >= L/2).
TimingPrediction quisp_expected_time(const Config& cfg);

/// Per-pair-handshake model: T_exp = k * 4L/c, independent of d.
TimingPrediction sequence_expected_time(const Config& cfg);

/// End-to-end swap fidelity with noiseless link pairs, uniform gate-error
/// weights and per-measurement flip probability p_m:
///   (1-p_g)(1-p_m)^2 + (3/15)p_g(1-p_m)^2 + (8/15)p_g(1-p_m)p_m + (4/15)p_g p_m^2
double f_swap(double p_g, double p_m);

/// f_swap degraded by memory depolarization over 2*t1 + 2*t2 + 2*T, using the
/// per-slice probability calibrated from (tau, dt).
double f_swap_decoherence(double p_g, double p_m, double t1_s, double t2_s, double t_msg_s,
                          double tau_s, double slice_duration_s);

/// Swap of two Werner pairs with fidelities f1, f2 under complete two-qubit
/// depolarization (prob p_g) and measurement flips (prob p_m each):
///   p_g/4 + (1-p_g)[(1-p_m)^2 (F1F2+3e1e2) + p_m(2-p_m)(F1e2+e1F2+2e1e2)]
/// with e_i = (1-F_i)/3. The sign of the cross term is fixed by an exact
/// density-matrix computation of the swap channel (see the test-suite
/// oracle): the flipped-correction branch adds probability of landing on the
/// target state, and the maximally mixed input must be a fixed point for
/// every p_m.
double f_swap_werner(double f1, double f2, double p_g, double p_m);

}  // namespace qxval::oracle
