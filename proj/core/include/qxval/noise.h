#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>

#include "qxval/domain.h"
#include "qxval/rng.h"

namespace qxval {

// ---------------------------------------------------------------------------
// Error-vector / transition-matrix bookkeeping (round-train formalism)
// ---------------------------------------------------------------------------

inline constexpr int kErrorClasses = 7;  // I, X, Y, Z, relaxation, excitation, loss

/// Per-qubit probability distribution over the seven error classes.
struct ErrorVector {
  std::array<double, kErrorClasses> p{1, 0, 0, 0, 0, 0, 0};

  static ErrorVector pristine() { return ErrorVector{}; }
  double sum() const;
};

/// Row-stochastic 7x7 matrix evolving an ErrorVector by one slice of
/// duration slice_duration_s.
class TransitionMatrix {
 public:
  static TransitionMatrix identity(double slice_duration_s);
  /// Minimal depolarizing construction: within {I,X,Y,Z} every class keeps
  /// itself with 1-p and moves to each other class with p/3; the R/E/L rows
  /// are identity. Reproduces the closed-form (Q^n)_00.
  static TransitionMatrix depolarizing(double p, double slice_duration_s);
  /// Parses 49 whitespace-separated reals (row-major). Throws
  /// std::invalid_argument on wrong count or a non-stochastic row.
  static TransitionMatrix from_stream(std::istream& in, double slice_duration_s);
  static TransitionMatrix from_file(const std::string& path, double slice_duration_s);

  double at(int row, int col) const { return q_[row * kErrorClasses + col]; }
  double& at(int row, int col) { return q_[row * kErrorClasses + col]; }
  double slice_duration_s() const { return slice_duration_s_; }

  /// True iff every entry is >= -tol and every row sums to 1 within tol.
  bool row_stochastic(double tol = 1e-12) const;

  /// Q^n by exponentiation-by-squaring. Every power of a row-stochastic
  /// matrix is row-stochastic, so each intermediate product renormalizes its
  /// rows; this keeps the result within ~1 ulp of exact even for n ~ 1e6.
  TransitionMatrix power(std::uint64_t n) const;

 private:
  explicit TransitionMatrix(double slice_duration_s) : slice_duration_s_(slice_duration_s) {}
  std::array<double, kErrorClasses * kErrorClasses> q_{};
  double slice_duration_s_;
};

/// pi(0) * Q^n with n = ceil(t / slice_duration). Throws on negative t or a
/// non-stochastic Q.
ErrorVector evolve_error_vector(const ErrorVector& pi, const TransitionMatrix& q, double t_s);
ErrorVector evolve_error_vector_slices(const ErrorVector& pi, const TransitionMatrix& q, std::uint64_t n);

/// Number of slices covering time t: ceil(t/dt), with quotients within 1e-9
/// relative of an integer treated as exact slice counts.
std::uint64_t slice_count(double t_s, double slice_duration_s);

/// Closed form for the (0,0) entry of the depolarizing transition matrix
/// power: (1 + 3*((3-4p)/3)^n) / 4. Requires p in [0, 3/4].
double depolarizing_q00(double p, std::uint64_t n);

/// Per-slice depolarizing probability p such that
/// depolarizing_q00(p, round(tau/dt)) == 1/e. Infinite tau gives p = 0.
double calibrate_depolarizing(double coherence_time_s, double slice_duration_s);

// ---------------------------------------------------------------------------
// Pauli frames and sampled operation errors
// ---------------------------------------------------------------------------

/// Single-qubit Pauli modulo phase, symplectic encoding (x-bit + 2*z-bit) so
/// composition is XOR and (anti)commutation tests are single-bit probes.
enum class Pauli : std::uint8_t { I = 0, X = 1, Z = 2, Y = 3 };

constexpr Pauli mul(Pauli a, Pauli b) {
  return static_cast<Pauli>(static_cast<std::uint8_t>(a) ^ static_cast<std::uint8_t>(b));
}
constexpr bool anticommutes_with_x(Pauli p) { return (static_cast<std::uint8_t>(p) & 2) != 0; }
constexpr bool anticommutes_with_z(Pauli p) { return (static_cast<std::uint8_t>(p) & 1) != 0; }

/// Conventional display/weight order I, X, Y, Z.
inline constexpr std::array<Pauli, 4> kPauliOrder{Pauli::I, Pauli::X, Pauli::Y, Pauli::Z};

/// Accumulated two-qubit Pauli label plus measurement-flip flags.
struct PauliFrame {
  Pauli first = Pauli::I;
  Pauli second = Pauli::I;
  bool flip_first = false;
  bool flip_second = false;

  bool label_is_identity() const { return first == Pauli::I && second == Pauli::I; }
  void compose(const PauliFrame& other) {
    first = mul(first, other.first);
    second = mul(second, other.second);
    flip_first ^= other.flip_first;
    flip_second ^= other.flip_second;
  }
};

/// With probability 1-p_g returns the identity frame; otherwise samples one
/// of the 15 nontrivial two-qubit Paulis by `weights` (order: kPauliOrder x
/// kPauliOrder, row-major, I(x)I skipped).
PauliFrame sample_two_qubit_gate_error(Rng& rng, double p_g, std::span<const double> weights);

/// outcome XOR Bernoulli(p_m).
int flip_measurement(Rng& rng, double p_m, int outcome);

// ---------------------------------------------------------------------------
// Werner-state analytics (per-pair-handshake formalism)
// ---------------------------------------------------------------------------

/// Entangled-pair record in the Werner formalism.
struct WernerPair {
  double fidelity = 1.0;  // in [1/4, 1]
  SimTime created_at;
  double coherence_time_s = std::numeric_limits<double>::infinity();
};

/// F(t) = F_in e^{-2t/tau} + (1 - e^{-2t/tau})/4 for a pair held in two
/// memories with identical coherence time tau. Throws on tau <= 0.
double werner_decohere(double f_in, double t_s, double tau_s);

/// Gate-error model where the two involved qubits are completely depolarized
/// with probability p_g. Returns true iff the state survived untouched.
bool depolarize_pair(Rng& rng, double p_g);

}  // namespace qxval
