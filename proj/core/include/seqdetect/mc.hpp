// Monte-Carlo verification: empirical size and power, adversarial priors,
// likelihood-ratio lower bounds, and the empirical separation radius.
//
// Every estimate is deterministic given (seed, stream): replicates consume
// exactly `observed_coordinates(test)` normals each, in coordinate order,
// and every routine that needs several independent streams derives them by
// fixed offsets from the base stream (documented per function).  Reported
// half-widths are 3 standard errors of the binomial estimate.
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "seqdetect/bounds.hpp"
#include "seqdetect/model.hpp"
#include "seqdetect/tests.hpp"

namespace seqdetect {

struct McOptions final {
  std::size_t samples = 100000;       // replicates per estimate, >= 100
  std::uint64_t seed = kDefaultSeed;
  std::uint64_t stream = 1;           // calibration conventionally owns stream 0

  void validate() const;
};

struct PowerEstimate final {
  double probability = 0.0;  // point estimate
  double half_width = 0.0;   // 3 * sqrt(p(1-p)/n)
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

// A candidate alternative signal together with its bookkeeping.  `in_class`
// checks ellipsoid membership and the energy floor at the declared radius
// with a one-sided relative slack of 1e-12 (to absorb construction
// rounding); genuine violations are orders of magnitude larger and are
// reported, never silently repaired.
struct PriorSpec final {
  Signal theta;
  double declared_radius = 0.0;
  std::string description;
  bool in_class = false;
};

PriorSpec make_prior(const ProblemSpec& spec, Signal theta,
                     double declared_radius, std::string description);

using AdversarySet = std::vector<PriorSpec>;

// Default adversaries at radius r:
//   1. the extremal shell signal theta_bar(r);
//   2. the flat profile theta_j proportional to b_j^{-2} (j <= D) scaled to
//      radius r, at the lower-bound bandwidth D0;
//   3. the same profile at the upper-bound bandwidth Dstar (when distinct);
//   4. the single-coordinate spike r e_m at the efficient dimension m,
//      included only when it lies in the ellipsoid (a_m r <= 1).
AdversarySet default_adversaries(const ProblemSpec& spec,
                                 const ErrorBudget& budget, double r);

// Empirical size: rejection rate over null replicates drawn on
// stream = options.stream.  Infinite thresholds short-circuit to the exact
// value (0 for +inf, 1 for -inf) without consuming randomness.
PowerEstimate estimate_size(const AnyTest& test, const McOptions& options);

struct BetaEstimate final {
  PowerEstimate worst;                      // largest acceptance probability
  std::size_t worst_index = 0;              // into per_candidate
  std::vector<PowerEstimate> per_candidate; // candidate i on stream + i
};

// Worst-case empirical type-II error over the adversary set; candidate i is
// evaluated on stream = options.stream + i.
BetaEstimate estimate_beta(const AnyTest& test, const AdversarySet& adversaries,
                           const McOptions& options);

// Flat two-point-per-coordinate prior at cut-off D: theta_j = r b_j^{-2} /
// sqrt(S_D) for j <= D with S_D = sum_{j<=D} b_j^{-4} and the radius chosen
// as r^2 = c(alpha,beta)^2 eps^2 sqrt(S_D).  This is the configuration whose
// likelihood second-moment bound equals 1 + 4(1-alpha-beta)^2 exactly.
PriorSpec build_flat_prior(const ProblemSpec& spec, std::size_t bandwidth,
                           const ErrorBudget& budget);

// Log second moment of the likelihood ratio under the random-sign prior on
// theta: log E_0[L^2] = sum_j log cosh(b_j^2 theta_j^2 / eps^2), and its
// closed-form upper bound u^2 = sum_j b_j^4 theta_j^4 / (2 eps^4).
struct SecondMoment final {
  double log_product = 0.0;
  double log_bound = 0.0;
};

SecondMoment likelihood_second_moment(const ProblemSpec& spec,
                                      const Signal& theta);

// Minimax type-II lower bound from the second moment: for any level-alpha
// test, beta >= 1 - alpha - 0.5 sqrt(E_0[L^2] - 1).  `use_exact_product`
// picks the exact product moment; the default uses the exp(u^2) bound,
// which is the closed-form the radius constructions are tuned to.
double lower_bound_beta(const ProblemSpec& spec, const PriorSpec& prior,
                        double alpha, bool use_exact_product = false);

// ---------------------------------------------------------------------------
// Empirical separation radius
// ---------------------------------------------------------------------------

using TestBuilder = std::function<AnyTest(double r)>;

struct RadiusProbe final {
  double radius = 0.0;
  double beta_hat = 0.0;
  double half_width = 0.0;
};

struct EmpiricalRadius final {
  double radius = 0.0;        // midpoint of the final bracket
  double lower = 0.0;         // bracket ends: beta_hat(lower) > beta target
  double upper = 0.0;         //               beta_hat(upper) <= beta target
  bool bracket_found = false; // false if a boundary capped the search
  std::vector<RadiusProbe> probes;
};

// Smallest radius at which the built test drives the worst-case empirical
// type-II error (over default_adversaries) to <= budget.beta.  Brackets from
// the analytic lower/upper radius bounds, expanding toward 0 or the class
// boundary when needed, then bisects to 2% relative width.  Probe k derives
// its evaluation streams from options.stream + 16 k.
EmpiricalRadius empirical_radius(const ProblemSpec& spec,
                                 const ErrorBudget& budget,
                                 const TestBuilder& builder,
                                 const McOptions& options = {},
                                 double relative_tolerance = 0.02);

}  // namespace seqdetect
