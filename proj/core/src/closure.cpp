#include "recshape/closure.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <stdexcept>
#include <thread>

#include "recshape/errors.hpp"

namespace recshape {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kMaxDimHard = 8;

double point_to_set(double x, const IntervalSet& s) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& iv : s) {
    if (x >= iv.lo && x <= iv.hi) return 0.0;
    best = std::min(best, std::min(std::abs(x - iv.lo), std::abs(x - iv.hi)));
  }
  return best;
}

double directed_hausdorff(const IntervalSet& a, const IntervalSet& b) {
  double worst = 0.0;
  for (const auto& iv : a) {
    worst = std::max(worst, point_to_set(iv.lo, b));
    worst = std::max(worst, point_to_set(iv.hi, b));
  }
  // Interior extrema of d(., b) over a sit at midpoints of b's gaps.
  for (std::size_t j = 0; j + 1 < b.size(); ++j) {
    double mid = 0.5 * (b[j].hi + b[j + 1].lo);
    for (const auto& iv : a) {
      if (mid > iv.lo && mid < iv.hi) {
        worst = std::max(worst, point_to_set(mid, b));
        break;
      }
    }
  }
  return worst;
}

}  // namespace

IntervalSet merge_intervals(std::vector<Interval> raw) {
  for (const auto& iv : raw) {
    if (!(iv.lo <= iv.hi)) {
      throw std::invalid_argument("merge_intervals: interval with lo > hi");
    }
    if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi)) {
      throw std::invalid_argument("merge_intervals: endpoints must be finite");
    }
  }
  std::sort(raw.begin(), raw.end(), [](const Interval& a, const Interval& b) {
    if (a.lo != b.lo) return a.lo < b.lo;
    return a.hi < b.hi;
  });
  IntervalSet out;
  for (const auto& iv : raw) {
    if (!out.empty() && iv.lo <= out.back().hi) {
      out.back().hi = std::max(out.back().hi, iv.hi);
    } else {
      out.push_back(iv);
    }
  }
  return out;
}

double hausdorff_distance(const IntervalSet& a, const IntervalSet& b) {
  if (a.empty() && b.empty()) return 0.0;
  if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
  return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

namespace {

struct TrigEval {
  const TrigPolySpec& spec;

  double value(std::span<const double> t) const { return eval_trig(spec, t); }

  void gradient(std::span<const double> t, std::span<double> g) const {
    std::fill(g.begin(), g.end(), 0.0);
    for (const auto& term : spec.terms) {
      double dot = 0.0;
      for (int j = 0; j < spec.dim; ++j) {
        dot += term.freq_coeffs[static_cast<std::size_t>(j)] * t[static_cast<std::size_t>(j)];
      }
      double s = std::sin(kTwoPi * dot + term.phase);
      for (int j = 0; j < spec.dim; ++j) {
        g[static_cast<std::size_t>(j)] -= kTwoPi * term.amplitude *
                                          term.freq_coeffs[static_cast<std::size_t>(j)] * s;
      }
    }
  }

  void hessian(std::span<const double> t, Eigen::MatrixXd& h) const {
    h.setZero();
    for (const auto& term : spec.terms) {
      double dot = 0.0;
      for (int j = 0; j < spec.dim; ++j) {
        dot += term.freq_coeffs[static_cast<std::size_t>(j)] * t[static_cast<std::size_t>(j)];
      }
      double c = std::cos(kTwoPi * dot + term.phase);
      for (int j = 0; j < spec.dim; ++j) {
        for (int l = 0; l < spec.dim; ++l) {
          h(j, l) -= kTwoPi * kTwoPi * term.amplitude *
                     term.freq_coeffs[static_cast<std::size_t>(j)] *
                     term.freq_coeffs[static_cast<std::size_t>(l)] * c;
        }
      }
    }
  }
};

using Point = std::array<double, kMaxDimHard>;

void wrap_point(Point& t, int m) {
  for (int j = 0; j < m; ++j) {
    t[static_cast<std::size_t>(j)] -= std::floor(t[static_cast<std::size_t>(j)]);
  }
}

// Damped Newton descent on the torus from a seed; returns the refined value.
double newton_refine(const TrigEval& f, Point& t, int m) {
  Eigen::MatrixXd hess(m, m);
  Eigen::VectorXd grad(m);
  std::vector<double> gbuf(static_cast<std::size_t>(m));
  double val = f.value({t.data(), static_cast<std::size_t>(m)});
  double lambda = 0.0;
  for (int iter = 0; iter < 50; ++iter) {
    f.gradient({t.data(), static_cast<std::size_t>(m)}, gbuf);
    for (int j = 0; j < m; ++j) grad(j) = gbuf[static_cast<std::size_t>(j)];
    if (grad.lpNorm<Eigen::Infinity>() < 1e-13) break;
    f.hessian({t.data(), static_cast<std::size_t>(m)}, hess);
    bool improved = false;
    for (int attempt = 0; attempt < 8 && !improved; ++attempt) {
      Eigen::MatrixXd damped = hess + lambda * Eigen::MatrixXd::Identity(m, m);
      Eigen::LDLT<Eigen::MatrixXd> ldlt(damped);
      Eigen::VectorXd step;
      if (ldlt.info() == Eigen::Success) {
        step = ldlt.solve(grad);
      } else {
        step = grad;  // gradient fallback
      }
      Point cand = t;
      for (int j = 0; j < m; ++j) cand[static_cast<std::size_t>(j)] -= step(j);
      wrap_point(cand, m);
      double cv = f.value({cand.data(), static_cast<std::size_t>(m)});
      if (cv < val) {
        t = cand;
        val = cv;
        lambda = lambda * 0.25;
        improved = true;
      } else {
        lambda = std::max(1e-2, lambda * 10.0);
      }
    }
    if (!improved) break;
  }
  return val;
}

struct Cell {
  double lower;
  double value;
  Point center;
  double half;
};

struct CellOrder {
  bool operator()(const Cell& a, const Cell& b) const { return a.lower > b.lower; }
};

struct MinResult {
  double value;
  double gap;
};

// Certified global minimum of F over [0,1]^m via Lipschitz branch-and-bound.
MinResult global_min(const TrigPolySpec& spec, const TrigRangeConfig& cfg) {
  const int m = spec.dim;
  TrigEval f{spec};
  if (m == 0 || spec.terms.empty()) {
    return {f.value({}), 0.0};
  }
  double lipschitz = 0.0;
  for (const auto& term : spec.terms) {
    double l1 = 0.0;
    for (int c : term.freq_coeffs) l1 += std::abs(c);
    lipschitz += kTwoPi * std::abs(term.amplitude) * l1;
  }
  if (lipschitz == 0.0) {
    return {f.value(std::vector<double>(static_cast<std::size_t>(m), 0.0)), 0.0};
  }

  int density = cfg.grid_per_axis;
  if (density <= 0) density = m <= 2 ? 64 : (m <= 4 ? 16 : 8);

  std::priority_queue<Cell, std::vector<Cell>, CellOrder> heap;
  double best = std::numeric_limits<double>::infinity();
  Point best_point{};

  const double half0 = 0.5 / density;
  std::vector<int> idx(static_cast<std::size_t>(m), 0);
  while (true) {
    Point center{};
    for (int j = 0; j < m; ++j) {
      center[static_cast<std::size_t>(j)] =
          (idx[static_cast<std::size_t>(j)] + 0.5) / density;
    }
    double v = f.value({center.data(), static_cast<std::size_t>(m)});
    if (v < best) {
      best = v;
      best_point = center;
    }
    heap.push({v - lipschitz * half0, v, center, half0});
    int j = 0;
    while (j < m && idx[static_cast<std::size_t>(j)] == density - 1) {
      idx[static_cast<std::size_t>(j)] = 0;
      ++j;
    }
    if (j == m) break;
    ++idx[static_cast<std::size_t>(j)];
  }
  {
    Point seed = best_point;
    best = std::min(best, newton_refine(f, seed, m));
  }

  std::int64_t budget = cfg.max_nodes;
  double gap = std::numeric_limits<double>::infinity();
  while (!heap.empty()) {
    Cell cell = heap.top();
    gap = best - cell.lower;
    if (gap <= cfg.tol) break;
    heap.pop();
    if (--budget < 0) break;

    double half = cell.half * 0.5;
    int corners = 1 << m;
    for (int mask = 0; mask < corners; ++mask) {
      Cell child;
      child.center = cell.center;
      for (int j = 0; j < m; ++j) {
        child.center[static_cast<std::size_t>(j)] +=
            (mask & (1 << j)) ? half : -half;
      }
      child.half = half;
      child.value = f.value({child.center.data(), static_cast<std::size_t>(m)});
      child.lower = child.value - lipschitz * half;
      if (child.value < best) {
        best = child.value;
        Point seed = child.center;
        best = std::min(best, newton_refine(f, seed, m));
      }
      if (child.lower < best - cfg.tol) heap.push(child);
    }
  }
  // A drained heap means everything else was pruned at best - tol.
  gap = heap.empty() ? cfg.tol : best - heap.top().lower;
  return {best, std::max(gap, 0.0)};
}

TrigPolySpec negated(const TrigPolySpec& spec) {
  TrigPolySpec out = spec;
  for (auto& term : out.terms) term.amplitude = -term.amplitude;
  return out;
}

}  // namespace

Range trig_range(const TrigPolySpec& spec, const TrigRangeConfig& cfg) {
  if (spec.dim > cfg.max_dim || spec.dim > kMaxDimHard) {
    throw TorusBudgetError("trig_range: torus dimension " +
                           std::to_string(spec.dim) +
                           " exceeds the grid budget; use the empirical path");
  }
  for (const auto& term : spec.terms) {
    if (static_cast<int>(term.freq_coeffs.size()) != spec.dim) {
      throw std::invalid_argument("trig_range: frequency row length mismatch");
    }
  }
  MinResult lo = global_min(spec, cfg);
  MinResult hi = global_min(negated(spec), cfg);
  return Range{lo.value, -hi.value, std::max(lo.gap, hi.gap)};
}

namespace {

// Fill samples[n - begin] = a_n for n in [begin, end) starting from the
// given state (a_begin, ..., a_{begin+h-1}); returns false on overflow.
bool iterate_block(const LinearRecurrence& rec, std::vector<double> state,
                   std::int64_t begin, std::int64_t end, double guard,
                   std::vector<double>& out, std::int64_t out_offset) {
  const int h = rec.order();
  for (std::int64_t n = begin; n < end; ++n) {
    double value = state.front();
    if (!std::isfinite(value) || std::abs(value) > guard) return false;
    out[static_cast<std::size_t>(out_offset + (n - begin))] = value;
    double next = 0.0;
    for (int i = 0; i < h; ++i) {
      next += rec.coefficients[static_cast<std::size_t>(i)] *
              state[static_cast<std::size_t>(h - 1 - i)];
    }
    state.erase(state.begin());
    state.push_back(next);
  }
  return true;
}

}  // namespace

EmpiricalClosure empirical_closure(const LinearRecurrence& rec,
                                   const EmpiricalConfig& cfg) {
  if (cfg.burn_in < 0 || cfg.sample_count <= cfg.burn_in) {
    throw std::invalid_argument("empirical_closure: need sample_count > burn_in >= 0");
  }
  if (!(cfg.gap_eps > 0.0)) {
    throw std::invalid_argument("empirical_closure: gap_eps must be positive");
  }
  const std::int64_t total = cfg.sample_count - cfg.burn_in;
  std::vector<double> samples(static_cast<std::size_t>(total));

  int threads = std::clamp(cfg.threads, 1, 64);
  bool ok = true;
  if (threads == 1) {
    std::vector<double> state;
    try {
      state = evaluate(rec, cfg.burn_in, cfg.burn_in + rec.order() - 1);
    } catch (const EvaluationOverflow&) {
      return {true, {}, {}};
    }
    ok = iterate_block(rec, std::move(state), cfg.burn_in, cfg.sample_count,
                       cfg.overflow_guard, samples, 0);
  } else {
    std::vector<std::thread> pool;
    std::vector<char> flags(static_cast<std::size_t>(threads), 1);
    std::int64_t chunk = (total + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      std::int64_t begin = cfg.burn_in + t * chunk;
      std::int64_t end = std::min(begin + chunk, cfg.sample_count);
      if (begin >= end) {
        break;
      }
      pool.emplace_back([&, t, begin, end] {
        try {
          std::vector<double> state = state_at(rec, begin);
          flags[static_cast<std::size_t>(t)] =
              iterate_block(rec, std::move(state), begin, end, cfg.overflow_guard,
                            samples, begin - cfg.burn_in)
                  ? 1
                  : 0;
        } catch (const EvaluationOverflow&) {
          flags[static_cast<std::size_t>(t)] = 0;
        }
      });
    }
    for (auto& th : pool) th.join();
    ok = std::all_of(flags.begin(), flags.end(), [](char f) { return f != 0; });
  }
  if (!ok) return {true, {}, {}};

  std::sort(samples.begin(), samples.end());

  EmpiricalClosure out;
  std::size_t run_start = 0;
  auto flush = [&](std::size_t end) {  // run is [run_start, end)
    double first = samples[run_start];
    double last = samples[end - 1];
    std::size_t len = end - run_start;
    if (len >= static_cast<std::size_t>(cfg.min_run) && last > first) {
      out.intervals.push_back({first, last});
    } else {
      out.points.push_back(0.5 * (first + last));
    }
    run_start = end;
  };
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (samples[i] - samples[i - 1] > cfg.gap_eps) flush(i);
  }
  flush(samples.size());
  return out;
}

const char* to_string(Classification c) {
  switch (c) {
    case Classification::DivergentCountable: return "DIVERGENT_COUNTABLE";
    case Classification::ConvergentCountable: return "CONVERGENT_COUNTABLE";
    case Classification::FiniteSet: return "FINITE_SET";
    case Classification::Intervals: return "INTERVALS";
  }
  return "?";
}

const char* to_string(Method m) {
  return m == Method::Exact ? "EXACT" : "EMPIRICAL";
}

namespace {

std::vector<double> guarded_prefix(const LinearRecurrence& rec,
                                   std::int64_t count) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  try {
    out = sample_prefix(rec, count);
  } catch (const EvaluationOverflow& e) {
    if (e.first_bad_index() > rec.order()) {
      out = sample_prefix(rec, e.first_bad_index() - 1);
    }
  }
  return out;
}

std::vector<double> sorted_unique(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  double scale = 1.0;
  for (double x : v) scale = std::max(scale, std::abs(x));
  v.erase(std::unique(v.begin(), v.end(),
                      [scale](double a, double b) {
                        return std::abs(a - b) <= 1e-12 * scale;
                      }),
          v.end());
  return v;
}

ClosureReport from_empirical(const LinearRecurrence& rec,
                             const ClosureConfig& cfg) {
  EmpiricalClosure emp = empirical_closure(rec, cfg.empirical);
  ClosureReport report;
  report.method = Method::Empirical;
  if (emp.diverged) {
    report.classification = Classification::DivergentCountable;
    report.points = sorted_unique(guarded_prefix(rec, cfg.prefix_limit));
    return report;
  }
  report.intervals = emp.intervals;
  report.points = sorted_unique(std::move(emp.points));
  report.classification = report.intervals.empty() ? Classification::FiniteSet
                                                   : Classification::Intervals;
  return report;
}

}  // namespace

ClosureReport closure_of(const LinearRecurrence& rec, const ClosureConfig& cfg) {
  if (cfg.force_empirical) return from_empirical(rec, cfg);

  Decomposition dec;
  try {
    dec = decompose(rec, cfg.spectral);
  } catch (const TorusBudgetError&) {
    return from_empirical(rec, cfg);
  }

  ClosureReport report;
  report.method = Method::Exact;
  switch (dec.growth) {
    case GrowthClass::Divergent: {
      report.classification = Classification::DivergentCountable;
      report.points = sorted_unique(guarded_prefix(rec, cfg.prefix_limit));
      return report;
    }
    case GrowthClass::ConvergentToZero:
    case GrowthClass::EventuallyZero: {
      report.classification = Classification::ConvergentCountable;
      std::vector<double> pts = guarded_prefix(rec, cfg.prefix_limit);
      pts.push_back(0.0);  // the accumulation point
      report.points = sorted_unique(std::move(pts));
      return report;
    }
    case GrowthClass::BoundedOscillatory:
      break;
  }

  if (!dec.independence_verified) return from_empirical(rec, cfg);

  std::vector<Interval> pieces;
  std::vector<double> limit_points;
  bool any_fat = false;
  try {
    for (const auto& sec : dec.sections) {
      if (sec.trig.terms.empty()) {
        limit_points.push_back(sec.offset);
      } else {
        Range r = trig_range(sec.trig, cfg.trig);
        pieces.push_back({sec.offset + r.lo, sec.offset + r.hi});
        any_fat = true;
      }
    }
  } catch (const TorusBudgetError&) {
    return from_empirical(rec, cfg);
  }

  if (!any_fat) {
    report.classification = Classification::FiniteSet;
    std::vector<double> pts = sorted_unique(std::move(limit_points));
    // Transients that settle nowhere near a limit value are part of the
    // closure too.
    std::vector<double> prefix = guarded_prefix(rec, cfg.empirical.burn_in);
    for (double x : prefix) {
      bool near = false;
      for (double p : pts) {
        if (std::abs(x - p) <= cfg.transient_eps * (1.0 + std::abs(p))) {
          near = true;
          break;
        }
      }
      if (!near) pts.push_back(x);
    }
    report.points = sorted_unique(std::move(pts));
    return report;
  }

  for (double p : limit_points) pieces.push_back({p, p});
  report.classification = Classification::Intervals;
  report.intervals = merge_intervals(std::move(pieces));

  std::vector<double> outside;
  for (double x : guarded_prefix(rec, cfg.empirical.burn_in)) {
    if (point_to_set(x, report.intervals) > cfg.transient_eps) outside.push_back(x);
  }
  report.points = sorted_unique(std::move(outside));
  return report;
}

}  // namespace recshape
