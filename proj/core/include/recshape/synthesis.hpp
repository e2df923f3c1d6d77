#pragma once

#include <cstdint>
#include <vector>

#include "recshape/closure.hpp"
#include "recshape/recurrence.hpp"

namespace recshape {

using TargetIntervals = std::vector<Interval>;

/// Blueprint for a recurrence whose value-set closure is a prescribed
/// interval collection: rho0 is the smallest positive width, each fat
/// interval [mu_k, nu_k] contributes the ladder values mu_k + i*rho0
/// (0 <= i < m_k, m_k = floor(width_k / rho0)) and nu_k - rho0, and the
/// periodic carrier w cycles through those values while an independent
/// cosine part sweeps [0, rho0]. Width-zero targets are kept aside and
/// interlaced in as a separate periodic sequence.
struct SynthesisPlan {
  double rho0 = 0.0;
  std::vector<double> widths;
  std::vector<std::int64_t> multipliers;   // m_k, one per fat interval
  std::vector<double> periodic_values;     // length sum(m_k) + s + 1
  std::vector<double> degenerate_points;

  bool has_fat() const { return !periodic_values.empty(); }
  std::int64_t period() const {
    return static_cast<std::int64_t>(periodic_values.size());
  }
};

/// Merge the targets, split off width-zero points, and lay out the
/// periodic value ladder. Throws std::invalid_argument on an empty list.
SynthesisPlan plan(const TargetIntervals& targets);

/// Closed intervals [v, v + rho0] over the plan's periodic values plus its
/// degenerate points, merged. Equals the merged targets by construction.
IntervalSet plan_cover(const SynthesisPlan& p);

/// x_n = rho0/2 * (cos n + 1), dense in [0, rho0]: the order-3 recurrence
/// with characteristic polynomial (z - 1)(z^2 - 2 cos(1) z + 1).
LinearRecurrence x_sequence(double rho0);

struct BuildConfig {
  bool reduce = true;
  double reduce_tol = 1e-9;
  // Fit-based reduction is an O(order^4) scan; skip it above this order.
  int reduce_order_cap = 24;
};

/// Realize the plan: carrier w (period P) plus x_sequence(rho0), built
/// directly on the product characteristic polynomial
/// (z^P - 1)(z^2 - 2 cos(1) z + 1); degenerate points are interlaced in as
/// their own periodic sequence.
LinearRecurrence build(const SynthesisPlan& p, const BuildConfig& cfg = {});

struct SynthesisConfig {
  BuildConfig build;
  EmpiricalConfig empirical;
  std::int64_t verify_terms = 512;
};

struct SynthesisResult {
  SynthesisPlan plan;
  LinearRecurrence recurrence;
  double residual = 0.0;   // verify_satisfies over independently built samples
  double hausdorff = 0.0;  // empirical closure vs merged targets
  std::int64_t samples = 0;
};

/// plan + build + verification (recurrence residual and empirical
/// round-trip distance) in one call; what the CLI's synthesize reports.
SynthesisResult synthesize(const TargetIntervals& targets,
                           const SynthesisConfig& cfg = {});

/// Deterministic random target collections: 1-5 intervals, widths in
/// [0.1, 10], gaps >= 0.2. Used by the round-trip fixtures.
TargetIntervals random_targets(std::uint64_t seed);

}  // namespace recshape
