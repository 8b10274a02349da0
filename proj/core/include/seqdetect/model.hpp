// Problem instances for the Gaussian sequence model
//
//     Y_j = b_j * theta_j + eps * xi_j,    j = 1..N,   xi_j iid N(0, 1),
//
// where (b_j) are known operator weights and the signal theta is constrained
// to the ellipsoid  E_a = { theta : sum_j a_j^2 theta_j^2 <= 1 }  built from
// a non-decreasing weight sequence (a_j).  The detection alternative is the
// ellipsoid shell  { theta in E_a : ||theta|| >= r }.
//
// This header defines sequence families, the ProblemSpec instance record,
// class membership, and forward simulation.
#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "seqdetect/math.hpp"

namespace seqdetect {

enum class SequenceKind : std::uint8_t {
  kDirect,             // identically 1
  kPolynomialDecay,    // j^{-exponent}
  kExponentialDecay,   // exp(-exponent * j)
  kPolynomialGrowth,   // j^{+exponent}
  kExponentialGrowth,  // exp(+exponent * j)
  kExplicit,           // user-provided positive values
};

const char* to_string(SequenceKind kind);

// A positive sequence j -> value(j), j >= 1.  Parametric kinds carry their
// exponent; explicit families carry the stored values (1-based access).
// All proportionality constants are fixed to 1 so results are reproducible
// without hidden tuning.
struct SequenceFamily final {
  SequenceKind kind = SequenceKind::kDirect;
  double exponent = 0.0;
  std::vector<double> values;  // kExplicit only

  static SequenceFamily direct();
  static SequenceFamily polynomial_decay(double t);
  static SequenceFamily exponential_decay(double t);
  static SequenceFamily polynomial_growth(double s);
  static SequenceFamily exponential_growth(double s);
  static SequenceFamily explicit_values(std::vector<double> v);

  void validate() const;  // throws std::invalid_argument
};

// value(j) for j >= 1.  Throws std::out_of_range past the end of an explicit
// family and std::invalid_argument for j = 0.
double sequence_value(const SequenceFamily& family, std::size_t j);

// One fully specified instance: ellipsoid weights a, operator weights b,
// noise level eps, and the working truncation N (all sums run over 1..N).
struct ProblemSpec final {
  SequenceFamily smoothness;        // a_j, non-decreasing, a_1 > 0
  SequenceFamily operator_weights;  // b_j, positive
  double noise = 1.0;               // eps > 0
  std::size_t truncation = 2;       // N >= 2

  void validate() const;  // throws std::invalid_argument

  double a(std::size_t j) const { return sequence_value(smoothness, j); }
  double b(std::size_t j) const { return sequence_value(operator_weights, j); }
};

// Signals are plain coefficient vectors theta_1..theta_k with k <= N;
// coordinates beyond the stored length are implicitly zero.
using Signal = std::vector<double>;

double signal_norm_sq(const Signal& theta);

// The ellipsoid shell at a given radius.
struct SignalClass final {
  ProblemSpec spec;
  double radius = 0.0;  // r >= 0

  void validate() const;
};

// Exact membership test (no tolerances): sum a_j^2 theta_j^2 <= 1 and
// ||theta||^2 >= radius^2, with sums over stored coordinates.
bool class_contains(const SignalClass& cls, const Signal& theta);

// Largest squared norm attainable on the ellipsoid: 1 / a_1^2.  The shell is
// nonempty exactly when radius^2 does not exceed this.
double max_class_norm_sq(const ProblemSpec& spec);

// Draw Y_j = b_j theta_j + eps xi_j for j = 1..N, consuming one normal per
// coordinate in index order.  theta may be shorter than N (zero padding);
// it must not be longer.
std::vector<double> simulate(const ProblemSpec& spec, const Signal& theta,
                             RngStream& rng);

// Truncation policy: the smallest N with a_N^{-2} <= tail_fraction * r^2
// (so the ellipsoid tail beyond N is negligible at working radius r),
// clamped to [min_n, cap].  Defaults follow the library-wide policy of a
// 1e-3 relative tail and a hard cap of 1e6 coordinates.
std::size_t default_truncation(const SequenceFamily& smoothness, double radius,
                               double tail_fraction = 1e-3,
                               std::size_t min_n = 16,
                               std::size_t cap = 1000000);

// Named instance presets used by the CLI and the asymptotic checks:
//   direct : a_j = j^s,        b_j = 1
//   mild   : a_j = j^s,        b_j = j^{-t}
//   severe : a_j = j^s,        b_j = exp(-t j)
enum class FamilyPreset : std::uint8_t { kDirect, kMild, kSevere };

const char* to_string(FamilyPreset preset);

ProblemSpec make_preset_spec(FamilyPreset preset, double s, double t,
                             double eps, std::size_t truncation);

}  // namespace seqdetect
