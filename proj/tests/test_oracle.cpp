#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "densmat.h"
#include "qxval/linkgen.h"
#include "qxval/noise.h"
#include "qxval/oracle.h"

using namespace qxval;
using oracle::expected_rounds;
using oracle::f_swap;
using oracle::f_swap_decoherence;
using oracle::f_swap_werner;

namespace {

Config validated_defaults() { return *validate_config(Config{}).config; }

// Table-style per-attempt success probability: 0.5 * 10^(-0.4).
const double kPSucc = success_probability(Config{}.geometry, Config{}.hardware);

}  // namespace

TEST_CASE("expected_rounds on the canonical settings") {
  CHECK(kPSucc == doctest::Approx(0.1990535852767486).epsilon(1e-15));
  CHECK(expected_rounds(1000, 1, kPSucc) == 5024);
  CHECK(expected_rounds(1000, 1000, 1.0) == 1);
  // 1000 / (16 * p) = 313.98...: the ceiling is 314. Cross-check against a
  // long-double evaluation with explicit neighbor tests.
  CHECK(expected_rounds(1000, 16, kPSucc) == 314);
  const long double exact = 1000.0L / (16.0L * static_cast<long double>(kPSucc));
  CHECK(static_cast<long double>(313) < exact);
  CHECK(exact <= static_cast<long double>(314));
}

TEST_CASE("expected_rounds uses exact rational ceilings") {
  // 0.25 is binary-exact: 1000/0.25 is an integer, no +1 from float fuzz.
  CHECK(expected_rounds(1000, 1, 0.25) == 4000);
  CHECK(expected_rounds(1000, 4, 0.25) == 1000);
  // double(1/3) is slightly below 1/3, so the exact quotient is just above
  // 3000 and must round up.
  CHECK(expected_rounds(1000, 1, 1.0 / 3.0) == 3001);
  CHECK_THROWS_AS(expected_rounds(1000, 1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(expected_rounds(1000, 1, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(expected_rounds(1000, 1, 1.5), std::invalid_argument);
}

TEST_CASE("round-train timing prediction on the canonical settings") {
  Config cfg = validated_defaults();
  const auto pred = oracle::quisp_expected_time(cfg);
  CHECK(pred.t_setup_s == doctest::Approx(2.5e-4).epsilon(1e-15));
  CHECK(pred.t_round_s == doctest::Approx(1.0001e-4).epsilon(1e-15));
  CHECK(pred.rounds == 5024);
  CHECK(pred.t_exp_s == doctest::Approx(0.50270024).epsilon(1e-12));
}

TEST_CASE("round-train round time degenerates to pure propagation as t_sep -> 0") {
  Config cfg = validated_defaults();
  cfg.hardware.repetition_rate_hz = 1e18;
  cfg.hardware.t_sep_s = 1e-18;
  const auto pred = oracle::quisp_expected_time(cfg);
  const double two_t0 = 2 * cfg.geometry.bsa_offset_km / cfg.geometry.light_speed_km_s;
  CHECK(pred.t_round_s == doctest::Approx(two_t0).epsilon(1e-8));
}

TEST_CASE("round-train round time is linear in d") {
  Config at_mid = validated_defaults();
  Config at_end = validated_defaults();
  at_end.geometry.bsa_offset_km = at_end.geometry.node_distance_km;
  const double delta = oracle::quisp_expected_time(at_end).t_round_s -
                       oracle::quisp_expected_time(at_mid).t_round_s;
  CHECK(delta == doctest::Approx(at_mid.geometry.node_distance_km /
                                 at_mid.geometry.light_speed_km_s)
                     .epsilon(1e-12));
}

TEST_CASE("per-pair-handshake prediction: k * 4L/c, no d dependence") {
  Config cfg = validated_defaults();
  const auto pred = oracle::sequence_expected_time(cfg);
  CHECK(pred.t_round_s == doctest::Approx(4e-4).epsilon(1e-15));
  CHECK(pred.rounds == 5024);
  CHECK(pred.t_exp_s == doctest::Approx(2.0096).epsilon(1e-12));

  cfg.hardware.n_memories = 1000;
  cfg.hardware.p_bsm = 1.0;
  cfg.geometry.attenuation_db_km = 0.0;
  const auto single_round = oracle::sequence_expected_time(*validate_config(cfg).config);
  CHECK(single_round.rounds == 1);
  CHECK(single_round.t_exp_s == doctest::Approx(4e-4).epsilon(1e-15));

  Config moved = validated_defaults();
  moved.geometry.bsa_offset_km = 17.0;
  CHECK(oracle::sequence_expected_time(moved).t_exp_s ==
        oracle::sequence_expected_time(validated_defaults()).t_exp_s);
}

TEST_CASE("timing monotonicity in d: round-train strictly increasing, per-pair constant") {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    Config cfg = validated_defaults();
    const double l = cfg.geometry.node_distance_km;
    double d1 = l / 2 + unit(gen) * l / 2;
    double d2 = l / 2 + unit(gen) * l / 2;
    if (d1 > d2) std::swap(d1, d2);
    if (d1 == d2) continue;
    Config a = cfg, b = cfg;
    a.geometry.bsa_offset_km = d1;
    b.geometry.bsa_offset_km = d2;
    CHECK(oracle::quisp_expected_time(a).t_exp_s < oracle::quisp_expected_time(b).t_exp_s);
    CHECK(oracle::sequence_expected_time(a).t_exp_s == oracle::sequence_expected_time(b).t_exp_s);
  }
}

TEST_CASE("doubling the memory count roughly halves both predictions") {
  Config one = validated_defaults();
  Config two = validated_defaults();
  two.hardware.n_memories = 2;
  CHECK(oracle::quisp_expected_time(two).t_exp_s / oracle::quisp_expected_time(one).t_exp_s ==
        doctest::Approx(0.5).epsilon(0.05));
  CHECK(oracle::sequence_expected_time(two).t_exp_s / oracle::sequence_expected_time(one).t_exp_s ==
        doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("oracle time ratio is constant in N_mem up to ceiling discretization") {
  Config cfg = validated_defaults();
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const int n_mem : {1, 2, 4, 8, 16}) {
    cfg.hardware.n_memories = n_mem;
    const double ratio = oracle::sequence_expected_time(cfg).t_exp_s /
                         oracle::quisp_expected_time(cfg).t_exp_s;
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  CHECK((hi - lo) / lo < 0.05);
  CHECK(lo > 3.9);
  CHECK(hi < 4.1);
}

TEST_CASE("swap fidelity with noiseless pairs: anchors and density-matrix agreement") {
  CHECK(f_swap(0.0, 0.0) == 1.0);
  CHECK(f_swap(1.0, 0.0) == doctest::Approx(0.2).epsilon(1e-15));
  // regenerated by term-by-term substitution: 0.7695 + 0.0081 + 0.0024 + 0.0001333...
  CHECK(f_swap(0.05, 0.1) == doctest::Approx(0.7801333333333333).epsilon(1e-14));

  const auto uniform = NoiseParams{}.pauli_weights;
  std::mt19937_64 gen(21);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 25; ++i) {
    const double pg = unit(gen), pm = unit(gen);
    const double dm = test::swap_fidelity_pauli_gate(1.0, 1.0, pg, pm, uniform);
    CHECK(f_swap(pg, pm) == doctest::Approx(dm).epsilon(1e-12));
  }
}

TEST_CASE("swap fidelity bounds and the p_g = 0 reduction") {
  std::mt19937_64 gen(22);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const double pg = unit(gen), pm = unit(gen);
    const double f = f_swap(pg, pm);
    CHECK(f >= 0.0);
    CHECK(f <= 1.0);
    CHECK(f_swap(0.0, pm) == doctest::Approx((1 - pm) * (1 - pm)).epsilon(1e-14));
  }
}

TEST_CASE("decoherence factorization of the swap fidelity") {
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(f_swap_decoherence(0.05, 0.1, 1.0, 2.0, 3.0, inf, 1e-6) == f_swap(0.05, 0.1));
  CHECK(f_swap_decoherence(0.05, 0.1, 0.0, 0.0, 0.0, 18e-3, 1e-6) == f_swap(0.05, 0.1));

  // exponent = 1 slice with the n=1 calibration: factor is exactly 1/e
  const double dt = 1.0;
  const double value = f_swap_decoherence(0.05, 0.1, 0.2, 0.1, 0.2, 1.0, dt);
  CHECK(value == doctest::Approx(f_swap(0.05, 0.1) * std::exp(-1.0)).epsilon(1e-12));

  // general factorization against the two components
  const double tau = 18e-3, dt2 = 1e-6;
  const double t1 = 7.5e-4, t2 = 6.1e-4, tm = 1e-4;
  const double p = calibrate_depolarizing(tau, dt2);
  const auto n = slice_count(2 * (t1 + t2 + tm), dt2);
  CHECK(f_swap_decoherence(0.02, 0.03, t1, t2, tm, tau, dt2) ==
        doctest::Approx(f_swap(0.02, 0.03) * depolarizing_q00(p, n)).epsilon(1e-14));
}

TEST_CASE("werner swap fidelity: anchors, symmetry, fixed point") {
  CHECK(f_swap_werner(1.0, 1.0, 0.0, 0.0) == 1.0);
  CHECK(f_swap_werner(1.0, 1.0, 0.05, 0.0) == doctest::Approx(0.9625).epsilon(1e-15));

  std::mt19937_64 gen(23);
  std::uniform_real_distribution<double> fid(0.25, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 300; ++i) {
    const double f1 = fid(gen), f2 = fid(gen), pg = unit(gen), pm = unit(gen);
    CHECK(f_swap_werner(f1, f2, pg, pm) == doctest::Approx(f_swap_werner(f2, f1, pg, pm)).epsilon(1e-14));
    // maximally mixed inputs are a fixed point for every error setting
    CHECK(f_swap_werner(0.25, 0.25, pg, pm) == doctest::Approx(0.25).epsilon(1e-14));
  }
}

TEST_CASE("noiseless werner swap composition matches the density matrix on a grid") {
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) {
      const double f1 = 0.25 + 0.75 * i / 9.0;
      const double f2 = 0.25 + 0.75 * j / 9.0;
      const double e1 = (1 - f1) / 3, e2 = (1 - f2) / 3;
      const double composed = f1 * f2 + 3 * e1 * e2;
      CHECK(std::abs(f_swap_werner(f1, f2, 0.0, 0.0) - composed) <= 1e-15);
      CHECK(std::abs(test::swap_fidelity_depolarizing_gate(f1, f2, 0.0, 0.0) - composed) <= 1e-12);
    }
  }
}

TEST_CASE("werner swap fidelity equals the 16x16 density-matrix oracle") {
  for (const double pg : {0.0, 0.05, 0.5}) {
    for (const double pm : {0.0, 0.05, 0.5}) {
      for (int i = 0; i < 10; ++i) {
        for (int j = 0; j < 10; ++j) {
          const double f1 = 0.25 + 0.75 * i / 9.0;
          const double f2 = 0.25 + 0.75 * j / 9.0;
          const double dm = test::swap_fidelity_depolarizing_gate(f1, f2, pg, pm);
          CHECK(std::abs(f_swap_werner(f1, f2, pg, pm) - dm) <= 1e-12);
        }
      }
    }
  }
}

TEST_CASE("density-matrix oracle also pins the high-p_m regime") {
  // The flipped-correction cross term enters with +p_m(2-p_m); at p_m = 1 and
  // one maximally mixed input the swap still yields 1/4, never a negative
  // value.
  CHECK(test::swap_fidelity_depolarizing_gate(1.0, 0.25, 0.0, 1.0) ==
        doctest::Approx(0.25).epsilon(1e-12));
  CHECK(f_swap_werner(1.0, 0.25, 0.0, 1.0) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(f_swap_werner(0.7, 1.0, 0.0, 1.0) == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(test::swap_fidelity_depolarizing_gate(0.7, 1.0, 0.0, 1.0) ==
        doctest::Approx(0.1).epsilon(1e-12));
}
