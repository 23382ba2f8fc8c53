#include "qxval/noise.h"

#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>

namespace qxval {

double ErrorVector::sum() const {
  double s = 0.0;
  for (double v : p) s += v;
  return s;
}

TransitionMatrix TransitionMatrix::identity(double slice_duration_s) {
  TransitionMatrix q(slice_duration_s);
  for (int i = 0; i < kErrorClasses; ++i) q.at(i, i) = 1.0;
  return q;
}

TransitionMatrix TransitionMatrix::depolarizing(double p, double slice_duration_s) {
  if (!(p >= 0.0 && p <= 0.75))
    throw std::invalid_argument("TransitionMatrix::depolarizing: p must lie in [0, 3/4]");
  TransitionMatrix q = identity(slice_duration_s);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) q.at(i, j) = (i == j) ? 1.0 - p : p / 3.0;
  return q;
}

TransitionMatrix TransitionMatrix::from_stream(std::istream& in, double slice_duration_s) {
  TransitionMatrix q(slice_duration_s);
  for (int i = 0; i < kErrorClasses * kErrorClasses; ++i) {
    if (!(in >> q.q_[i]))
      throw std::invalid_argument("TransitionMatrix: expected 49 whitespace-separated reals");
  }
  double extra;
  if (in >> extra) throw std::invalid_argument("TransitionMatrix: trailing data after 49 entries");
  if (!q.row_stochastic())
    throw std::invalid_argument("TransitionMatrix: matrix is not row-stochastic");
  return q;
}

TransitionMatrix TransitionMatrix::from_file(const std::string& path, double slice_duration_s) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("TransitionMatrix: cannot open " + path);
  return from_stream(in, slice_duration_s);
}

bool TransitionMatrix::row_stochastic(double tol) const {
  for (int i = 0; i < kErrorClasses; ++i) {
    double row_sum = 0.0;
    for (int j = 0; j < kErrorClasses; ++j) {
      if (at(i, j) < -tol) return false;
      row_sum += at(i, j);
    }
    if (std::abs(row_sum - 1.0) > tol) return false;
  }
  return true;
}

namespace {

using Mat = std::array<double, kErrorClasses * kErrorClasses>;

Mat multiply_renormalized(const Mat& a, const Mat& b) {
  Mat out{};
  for (int i = 0; i < kErrorClasses; ++i) {
    double row_sum = 0.0;
    for (int j = 0; j < kErrorClasses; ++j) {
      double acc = 0.0;
      for (int k = 0; k < kErrorClasses; ++k)
        acc += a[i * kErrorClasses + k] * b[k * kErrorClasses + j];
      out[i * kErrorClasses + j] = acc;
      row_sum += acc;
    }
    for (int j = 0; j < kErrorClasses; ++j) out[i * kErrorClasses + j] /= row_sum;
  }
  return out;
}

}  // namespace

TransitionMatrix TransitionMatrix::power(std::uint64_t n) const {
  TransitionMatrix result = identity(slice_duration_s_);
  TransitionMatrix base = *this;
  while (n != 0) {
    if (n & 1) result.q_ = multiply_renormalized(result.q_, base.q_);
    base.q_ = multiply_renormalized(base.q_, base.q_);
    n >>= 1;
  }
  return result;
}

std::uint64_t slice_count(double t_s, double slice_duration_s) {
  if (!(t_s >= 0.0)) throw std::invalid_argument("slice_count: negative time");
  if (!(slice_duration_s > 0.0)) throw std::invalid_argument("slice_count: nonpositive slice duration");
  const double q = t_s / slice_duration_s;
  const double nearest = std::nearbyint(q);
  // Quotients within 1e-9 relative of an integer are exact slice counts that
  // picked up representation error, e.g. 3e-6 / 1e-6.
  if (std::abs(q - nearest) <= 1e-9 * std::max(1.0, std::abs(q)))
    return static_cast<std::uint64_t>(nearest);
  return static_cast<std::uint64_t>(std::ceil(q));
}

ErrorVector evolve_error_vector_slices(const ErrorVector& pi, const TransitionMatrix& q, std::uint64_t n) {
  if (!q.row_stochastic())
    throw std::invalid_argument("evolve_error_vector: transition matrix is not row-stochastic");
  const TransitionMatrix qn = q.power(n);
  ErrorVector out;
  for (int j = 0; j < kErrorClasses; ++j) {
    double acc = 0.0;
    for (int i = 0; i < kErrorClasses; ++i) acc += pi.p[i] * qn.at(i, j);
    out.p[j] = acc;
  }
  return out;
}

ErrorVector evolve_error_vector(const ErrorVector& pi, const TransitionMatrix& q, double t_s) {
  return evolve_error_vector_slices(pi, q, slice_count(t_s, q.slice_duration_s()));
}

double depolarizing_q00(double p, std::uint64_t n) {
  if (!(p >= 0.0 && p <= 0.75))
    throw std::invalid_argument("depolarizing_q00: p must lie in [0, 3/4]");
  // (1 + 3^{1-n} (3-4p)^n) / 4 == (1 + 3 lambda^n) / 4 with lambda = 1 - 4p/3;
  // the latter form cannot overflow.
  const double lambda = 1.0 - 4.0 * p / 3.0;
  return (1.0 + 3.0 * std::pow(lambda, static_cast<double>(n))) / 4.0;
}

double calibrate_depolarizing(double coherence_time_s, double slice_duration_s) {
  if (!(slice_duration_s > 0.0))
    throw std::invalid_argument("calibrate_depolarizing: nonpositive slice duration");
  if (std::isinf(coherence_time_s)) return 0.0;
  if (!(coherence_time_s > 0.0))
    throw std::invalid_argument("calibrate_depolarizing: nonpositive coherence time");
  const double ratio = coherence_time_s / slice_duration_s;
  if (ratio < 0.5)
    throw std::invalid_argument("calibrate_depolarizing: coherence time shorter than one slice");
  const double n = std::nearbyint(ratio);
  // Invert (1 + 3^{1-n}(3-4p)^n)/4 = 1/e:
  //   p = (3 - 3^{(n-1)/n} (4/e - 1)^{1/n}) / 4, evaluated in log space.
  const double log_term = ((n - 1.0) * std::log(3.0) + std::log(4.0 / std::exp(1.0) - 1.0)) / n;
  return (3.0 - std::exp(log_term)) / 4.0;
}

PauliFrame sample_two_qubit_gate_error(Rng& rng, double p_g, std::span<const double> weights) {
  if (weights.size() != kPauliErrorCount)
    throw std::invalid_argument("sample_two_qubit_gate_error: need 15 weights");
  if (!rng.bernoulli(p_g)) return PauliFrame{};
  const std::size_t idx = rng.pick_weighted(weights);
  const std::size_t shifted = idx + 1;  // re-insert the skipped I(x)I slot
  PauliFrame frame;
  frame.first = kPauliOrder[shifted / 4];
  frame.second = kPauliOrder[shifted % 4];
  return frame;
}

int flip_measurement(Rng& rng, double p_m, int outcome) {
  return outcome ^ (rng.bernoulli(p_m) ? 1 : 0);
}

double werner_decohere(double f_in, double t_s, double tau_s) {
  if (!(tau_s > 0.0)) throw std::invalid_argument("werner_decohere: coherence time must be positive");
  if (!(f_in >= 0.25 && f_in <= 1.0))
    throw std::invalid_argument("werner_decohere: fidelity must lie in [1/4, 1]");
  if (!(t_s >= 0.0)) throw std::invalid_argument("werner_decohere: negative time");
  const double keep = std::exp(-2.0 * t_s / tau_s);
  return f_in * keep + (1.0 - keep) / 4.0;
}

bool depolarize_pair(Rng& rng, double p_g) {
  return !rng.bernoulli(p_g);
}

}  // namespace qxval
