#include "seqdetect/model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace seqdetect {

const char* to_string(SequenceKind kind) {
  switch (kind) {
    case SequenceKind::kDirect: return "direct";
    case SequenceKind::kPolynomialDecay: return "polynomial-decay";
    case SequenceKind::kExponentialDecay: return "exponential-decay";
    case SequenceKind::kPolynomialGrowth: return "polynomial-growth";
    case SequenceKind::kExponentialGrowth: return "exponential-growth";
    case SequenceKind::kExplicit: return "explicit";
  }
  return "unknown";
}

SequenceFamily SequenceFamily::direct() { return {SequenceKind::kDirect, 0.0, {}}; }

SequenceFamily SequenceFamily::polynomial_decay(double t) {
  return {SequenceKind::kPolynomialDecay, t, {}};
}

SequenceFamily SequenceFamily::exponential_decay(double t) {
  return {SequenceKind::kExponentialDecay, t, {}};
}

SequenceFamily SequenceFamily::polynomial_growth(double s) {
  return {SequenceKind::kPolynomialGrowth, s, {}};
}

SequenceFamily SequenceFamily::exponential_growth(double s) {
  return {SequenceKind::kExponentialGrowth, s, {}};
}

SequenceFamily SequenceFamily::explicit_values(std::vector<double> v) {
  return {SequenceKind::kExplicit, 0.0, std::move(v)};
}

void SequenceFamily::validate() const {
  const bool parametric = kind != SequenceKind::kDirect && kind != SequenceKind::kExplicit;
  if (parametric && !(exponent > 0.0)) {
    throw std::invalid_argument("SequenceFamily: parametric exponent must be > 0");
  }
  if (kind == SequenceKind::kExplicit) {
    if (values.empty()) {
      throw std::invalid_argument("SequenceFamily: explicit family needs values");
    }
    for (double v : values) {
      if (!(v > 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument("SequenceFamily: explicit values must be positive finite");
      }
    }
  }
}

double sequence_value(const SequenceFamily& family, std::size_t j) {
  if (j == 0) {
    throw std::invalid_argument("sequence_value: indices are 1-based");
  }
  const double x = static_cast<double>(j);
  switch (family.kind) {
    case SequenceKind::kDirect:
      return 1.0;
    case SequenceKind::kPolynomialDecay:
      return std::pow(x, -family.exponent);
    case SequenceKind::kExponentialDecay:
      return std::exp(-family.exponent * x);
    case SequenceKind::kPolynomialGrowth:
      return std::pow(x, family.exponent);
    case SequenceKind::kExponentialGrowth:
      return std::exp(family.exponent * x);
    case SequenceKind::kExplicit:
      if (j > family.values.size()) {
        throw std::out_of_range("sequence_value: index past explicit family length");
      }
      return family.values[j - 1];
  }
  throw std::invalid_argument("sequence_value: unknown family kind");
}

void ProblemSpec::validate() const {
  smoothness.validate();
  operator_weights.validate();
  if (!(noise >= 0.0) || !std::isfinite(noise)) {
    throw std::invalid_argument("ProblemSpec: noise level must be finite and >= 0");
  }
  if (truncation < 2) {
    throw std::invalid_argument("ProblemSpec: truncation must be >= 2");
  }
  if (smoothness.kind == SequenceKind::kExplicit &&
      smoothness.values.size() < truncation) {
    throw std::invalid_argument("ProblemSpec: explicit smoothness family shorter than truncation");
  }
  if (operator_weights.kind == SequenceKind::kExplicit &&
      operator_weights.values.size() < truncation) {
    throw std::invalid_argument("ProblemSpec: explicit operator family shorter than truncation");
  }
  // The ellipsoid weights must be non-decreasing; explicit families are the
  // only kind that can violate this, but check uniformly (cheap for
  // parametric kinds, exact for explicit ones).
  if (smoothness.kind == SequenceKind::kPolynomialDecay ||
      smoothness.kind == SequenceKind::kExponentialDecay) {
    throw std::invalid_argument("ProblemSpec: smoothness weights must be non-decreasing");
  }
  if (smoothness.kind == SequenceKind::kExplicit) {
    for (std::size_t j = 2; j <= truncation; ++j) {
      if (smoothness.values[j - 1] < smoothness.values[j - 2]) {
        throw std::invalid_argument("ProblemSpec: smoothness weights must be non-decreasing");
      }
    }
  }
}

double signal_norm_sq(const Signal& theta) {
  double s = 0.0;
  for (double v : theta) s += v * v;
  return s;
}

void SignalClass::validate() const {
  spec.validate();
  if (!(radius >= 0.0) || !std::isfinite(radius)) {
    throw std::invalid_argument("SignalClass: radius must be finite and >= 0");
  }
}

bool class_contains(const SignalClass& cls, const Signal& theta) {
  if (theta.size() > cls.spec.truncation) {
    throw std::invalid_argument("class_contains: signal longer than truncation");
  }
  double ellipsoid = 0.0;
  double energy = 0.0;
  for (std::size_t j = 1; j <= theta.size(); ++j) {
    const double aj = cls.spec.a(j);
    const double tj = theta[j - 1];
    ellipsoid += aj * aj * tj * tj;
    energy += tj * tj;
  }
  return ellipsoid <= 1.0 && energy >= cls.radius * cls.radius;
}

double max_class_norm_sq(const ProblemSpec& spec) {
  const double a1 = spec.a(1);
  return 1.0 / (a1 * a1);
}

std::vector<double> simulate(const ProblemSpec& spec, const Signal& theta,
                             RngStream& rng) {
  if (theta.size() > spec.truncation) {
    throw std::invalid_argument("simulate: signal longer than truncation");
  }
  std::vector<double> y(spec.truncation);
  for (std::size_t j = 1; j <= spec.truncation; ++j) {
    const double tj = (j <= theta.size()) ? theta[j - 1] : 0.0;
    y[j - 1] = spec.b(j) * tj + spec.noise * rng.normal();
  }
  return y;
}

std::size_t default_truncation(const SequenceFamily& smoothness, double radius,
                               double tail_fraction, std::size_t min_n,
                               std::size_t cap) {
  if (!(radius > 0.0)) return cap;
  const double target = tail_fraction * radius * radius;  // need a_N^{-2} <= target

  std::size_t lo = 1, hi = cap;
  const auto small_enough = [&](std::size_t n) {
    const double a = sequence_value(smoothness, n);
    return 1.0 / (a * a) <= target;
  };
  if (!small_enough(cap)) return cap;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (small_enough(mid)) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return std::max(lo, min_n);
}

const char* to_string(FamilyPreset preset) {
  switch (preset) {
    case FamilyPreset::kDirect: return "direct";
    case FamilyPreset::kMild: return "mild";
    case FamilyPreset::kSevere: return "severe";
  }
  return "unknown";
}

ProblemSpec make_preset_spec(FamilyPreset preset, double s, double t,
                             double eps, std::size_t truncation) {
  ProblemSpec spec;
  spec.smoothness = SequenceFamily::polynomial_growth(s);
  switch (preset) {
    case FamilyPreset::kDirect:
      spec.operator_weights = SequenceFamily::direct();
      break;
    case FamilyPreset::kMild:
      spec.operator_weights = SequenceFamily::polynomial_decay(t);
      break;
    case FamilyPreset::kSevere:
      spec.operator_weights = SequenceFamily::exponential_decay(t);
      break;
  }
  spec.noise = eps;
  spec.truncation = truncation;
  spec.validate();
  return spec;
}

}  // namespace seqdetect
