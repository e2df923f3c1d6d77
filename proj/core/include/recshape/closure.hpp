#pragma once

#include <cstdint>
#include <vector>

#include "recshape/spectral.hpp"

namespace recshape {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool operator==(const Interval&) const = default;
};

/// Sorted, pairwise disjoint closed intervals.
using IntervalSet = std::vector<Interval>;

/// Minimal sorted disjoint cover of the union; touching intervals merge.
IntervalSet merge_intervals(std::vector<Interval> raw);

/// Hausdorff distance between two finite unions of closed intervals.
/// Empty vs nonempty is infinite; empty vs empty is zero.
double hausdorff_distance(const IntervalSet& a, const IntervalSet& b);

struct TrigRangeConfig {
  int grid_per_axis = 0;  // 0 = auto: 64 for m <= 2, 16 for m <= 4, else 8
  double tol = 1e-6;
  std::int64_t max_nodes = 4'000'000;
  int max_dim = 6;
};

struct Range {
  double lo = 0.0;
  double hi = 0.0;
  // Worst branch-and-bound gap at termination; <= tol unless the node
  // budget ran out.
  double certified_gap = 0.0;
};

/// Certified global min/max of F over the unit torus: uniform grid
/// seeding, damped-Newton refinement of incumbents, then Lipschitz
/// branch-and-bound (|F(x)-F(y)| <= 2pi sum |xi_i| |c_i|_1 * |x-y|_inf)
/// until the enclosure is within tol. Throws TorusBudgetError when the
/// dimension exceeds max_dim.
Range trig_range(const TrigPolySpec& spec, const TrigRangeConfig& cfg = {});

struct EmpiricalConfig {
  std::int64_t sample_count = 1'000'000;  // N; samples are burn_in <= n < N
  std::int64_t burn_in = 256;
  double gap_eps = 0.01;
  int min_run = 32;
  double overflow_guard = 1e15;
  int threads = 1;  // >1 splits the index range via companion jump-ahead
};

struct EmpiricalClosure {
  bool diverged = false;
  IntervalSet intervals;
  std::vector<double> points;
};

/// Independent sampling oracle: sort the samples, split at gaps wider than
/// gap_eps, and report runs of at least min_run samples with positive
/// spread as intervals and everything else as points. Divergence past the
/// overflow guard short-circuits.
EmpiricalClosure empirical_closure(const LinearRecurrence& rec,
                                   const EmpiricalConfig& cfg = {});

enum class Classification {
  DivergentCountable,
  ConvergentCountable,
  FiniteSet,
  Intervals,
};

enum class Method { Exact, Empirical };

const char* to_string(Classification c);
const char* to_string(Method m);

struct ClosureReport {
  Classification classification = Classification::FiniteSet;
  IntervalSet intervals;
  std::vector<double> points;  // countable extras: transients, limit values
  Method method = Method::Exact;
};

struct ClosureConfig {
  SpectralConfig spectral;
  TrigRangeConfig trig;
  EmpiricalConfig empirical;
  bool force_empirical = false;
  // Transient samples farther than this from the reported union are listed.
  double transient_eps = 1e-9;
  // Cap on reported transient/prefix points for the countable classes.
  std::int64_t prefix_limit = 32;
};

/// Closure of the value set {a_n}. Divergent and convergent sequences
/// report countable classes; bounded oscillatory sequences report one
/// closed interval [offset + min F_k, offset + max F_k] per section
/// (constant sections degenerate to points), merged. The exact path runs
/// only when frequency independence was verified; otherwise, and on
/// budget errors, the empirical oracle decides.
ClosureReport closure_of(const LinearRecurrence& rec,
                         const ClosureConfig& cfg = {});

}  // namespace recshape
