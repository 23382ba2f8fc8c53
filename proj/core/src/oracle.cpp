#include "qxval/oracle.h"

#include <gmp.h>

#include <cmath>
#include <stdexcept>

#include "qxval/linkgen.h"
#include "qxval/noise.h"

namespace qxval::oracle {

std::int64_t expected_rounds(std::int64_t n_bell, int n_mem, double p_succ) {
  if (!(p_succ > 0.0)) throw std::invalid_argument("expected_rounds: p_succ must be positive");
  if (p_succ > 1.0) throw std::invalid_argument("expected_rounds: p_succ must be <= 1");
  if (n_bell < 1 || n_mem < 1) throw std::invalid_argument("expected_rounds: N_Bell and N_mem must be >= 1");

  // ceil(n_bell / (n_mem * p)) over the exact rational value of the double p.
  mpq_t p;
  mpq_init(p);
  mpq_set_d(p, p_succ);

  mpz_t numerator, denominator, k;
  mpz_init(numerator);
  mpz_init(denominator);
  mpz_init(k);
  // n_bell / (n_mem * num/den) = (n_bell * den) / (n_mem * num)
  mpz_set_si(numerator, n_bell);
  mpz_mul(numerator, numerator, mpq_denref(p));
  mpz_set_si(denominator, n_mem);
  mpz_mul(denominator, denominator, mpq_numref(p));
  mpz_cdiv_q(k, numerator, denominator);

  if (!mpz_fits_slong_p(k)) {
    mpq_clear(p);
    mpz_clear(numerator);
    mpz_clear(denominator);
    mpz_clear(k);
    throw std::invalid_argument("expected_rounds: round count overflows");
  }
  const std::int64_t result = mpz_get_si(k);
  mpq_clear(p);
  mpz_clear(numerator);
  mpz_clear(denominator);
  mpz_clear(k);
  return result;
}

TimingPrediction quisp_expected_time(const Config& cfg) {
  const auto& g = cfg.geometry;
  const auto& h = cfg.hardware;
  const double t0 = g.bsa_offset_km / g.light_speed_km_s;  // BSA to the far node
  TimingPrediction pred;
  pred.t_setup_s = 2.0 * g.node_distance_km / g.light_speed_km_s + t0;
  pred.t_round_s = 2.0 * t0 + (h.t_wait_multiplier + h.n_memories - 1) * h.t_sep_s +
                   cfg.protocol.round_processing_delay_s;
  pred.rounds = expected_rounds(cfg.request.n_bell, h.n_memories, success_probability(g, h));
  pred.t_exp_s = pred.t_setup_s + static_cast<double>(pred.rounds) * pred.t_round_s;
  return pred;
}

TimingPrediction sequence_expected_time(const Config& cfg) {
  const auto& g = cfg.geometry;
  TimingPrediction pred;
  pred.t_setup_s = 0.0;
  pred.t_round_s = 4.0 * g.node_distance_km / g.light_speed_km_s;
  pred.rounds = expected_rounds(cfg.request.n_bell, cfg.hardware.n_memories,
                                success_probability(g, cfg.hardware));
  pred.t_exp_s = static_cast<double>(pred.rounds) * pred.t_round_s;
  return pred;
}

double f_swap(double p_g, double p_m) {
  const double keep = 1.0 - p_m;
  return (1.0 - p_g) * keep * keep + (3.0 / 15.0) * p_g * keep * keep +
         (8.0 / 15.0) * p_g * keep * p_m + (4.0 / 15.0) * p_g * p_m * p_m;
}

double f_swap_decoherence(double p_g, double p_m, double t1_s, double t2_s, double t_msg_s,
                          double tau_s, double slice_duration_s) {
  if (std::isinf(tau_s)) return f_swap(p_g, p_m);
  const double p = calibrate_depolarizing(tau_s, slice_duration_s);
  const std::uint64_t n = slice_count(2.0 * t1_s + 2.0 * t2_s + 2.0 * t_msg_s, slice_duration_s);
  return f_swap(p_g, p_m) * depolarizing_q00(p, n);
}

double f_swap_werner(double f1, double f2, double p_g, double p_m) {
  const double e1 = (1.0 - f1) / 3.0;
  const double e2 = (1.0 - f2) / 3.0;
  const double matched = f1 * f2 + 3.0 * e1 * e2;
  const double crossed = f1 * e2 + e1 * f2 + 2.0 * e1 * e2;
  return p_g / 4.0 +
         (1.0 - p_g) * ((1.0 - p_m) * (1.0 - p_m) * matched + p_m * (2.0 - p_m) * crossed);
}

}  // namespace qxval::oracle
