#include "recshape/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>

#include "recshape/errors.hpp"

namespace recshape {

namespace {

// Uniform double in [0,1) from the raw engine bits; keeps fixture
// generation byte-stable across standard libraries.
double unit_uniform(std::mt19937_64& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

double uniform(std::mt19937_64& eng, double lo, double hi) {
  return lo + (hi - lo) * unit_uniform(eng);
}

}  // namespace

SynthesisPlan plan(const TargetIntervals& targets) {
  if (targets.empty()) {
    throw std::invalid_argument("plan: target interval list is empty");
  }
  IntervalSet merged = merge_intervals(targets);

  SynthesisPlan out;
  std::vector<Interval> fat;
  for (const auto& iv : merged) {
    if (iv.hi > iv.lo) {
      fat.push_back(iv);
    } else {
      out.degenerate_points.push_back(iv.lo);
    }
  }
  if (fat.empty()) return out;

  double rho0 = std::numeric_limits<double>::infinity();
  for (const auto& iv : fat) rho0 = std::min(rho0, iv.hi - iv.lo);
  out.rho0 = rho0;
  for (const auto& iv : fat) {
    double width = iv.hi - iv.lo;
    out.widths.push_back(width);
    out.multipliers.push_back(
        std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(width / rho0))));
  }
  // Ladder values mu_k + i*rho0 for every fat interval, then the top
  // anchors nu_k - rho0.
  for (std::size_t k = 0; k < fat.size(); ++k) {
    for (std::int64_t i = 0; i < out.multipliers[k]; ++i) {
      out.periodic_values.push_back(fat[k].lo + static_cast<double>(i) * rho0);
    }
  }
  for (const auto& iv : fat) out.periodic_values.push_back(iv.hi - rho0);

  // mu_k <= nu_k - rho0 < mu_k + m_k rho0 <= nu_k, up to roundoff.
  for (std::size_t k = 0; k < fat.size(); ++k) {
    double mu = fat[k].lo, nu = fat[k].hi;
    double top = mu + static_cast<double>(out.multipliers[k]) * rho0;
    double slack = 1e-12 * std::max({1.0, std::abs(mu), std::abs(nu)});
    if (!(mu <= nu - rho0 + slack && nu - rho0 < top + slack && top <= nu + slack)) {
      throw ConstructionError("plan: ladder inequality violated");
    }
  }
  return out;
}

IntervalSet plan_cover(const SynthesisPlan& p) {
  std::vector<Interval> pieces;
  for (double v : p.periodic_values) pieces.push_back({v, v + p.rho0});
  for (double v : p.degenerate_points) pieces.push_back({v, v});
  return merge_intervals(std::move(pieces));
}

LinearRecurrence x_sequence(double rho0) {
  if (!(rho0 > 0.0)) {
    throw std::invalid_argument("x_sequence: rho0 must be positive");
  }
  const double c = 1.0 + 2.0 * std::cos(1.0);
  auto x = [rho0](std::int64_t n) {
    return 0.5 * rho0 * (std::cos(static_cast<double>(n)) + 1.0);
  };
  return LinearRecurrence({c, -c, 1.0}, {x(0), x(1), x(2)});
}

LinearRecurrence build(const SynthesisPlan& p, const BuildConfig& cfg) {
  if (!p.has_fat() && p.degenerate_points.empty()) {
    throw std::invalid_argument("build: plan is empty");
  }

  std::optional<LinearRecurrence> fat;
  if (p.has_fat()) {
    // w + x on the product characteristic polynomial
    // (z^P - 1)(z^2 - 2 cos(1) z + 1); the factors share no roots, so this
    // is already the lcm and no generic root-union pass is needed.
    const std::int64_t period = p.period();
    std::vector<double> circ(static_cast<std::size_t>(period) + 1, 0.0);
    circ[0] = -1.0;
    circ[static_cast<std::size_t>(period)] = 1.0;
    Polynomial cp = Polynomial(std::move(circ)) *
                    Polynomial({1.0, -2.0 * std::cos(1.0), 1.0});
    const int h = cp.degree();
    const auto& cc = cp.coefficients();
    std::vector<double> eta(static_cast<std::size_t>(h));
    for (int i = 1; i <= h; ++i) {
      eta[static_cast<std::size_t>(i - 1)] = -cc[static_cast<std::size_t>(h - i)];
    }
    std::vector<double> init(static_cast<std::size_t>(h));
    for (int n = 0; n < h; ++n) {
      double w = p.periodic_values[static_cast<std::size_t>(n % period)];
      double x = 0.5 * p.rho0 * (std::cos(static_cast<double>(n)) + 1.0);
      init[static_cast<std::size_t>(n)] = w + x;
    }
    fat = LinearRecurrence(std::move(eta), std::move(init));
  }

  std::optional<LinearRecurrence> result;
  if (fat && !p.degenerate_points.empty()) {
    result = interlace({*fat, periodic_from_values(p.degenerate_points)});
  } else if (fat) {
    result = *fat;
  } else {
    result = periodic_from_values(p.degenerate_points);
  }

  if (cfg.reduce && result->order() <= cfg.reduce_order_cap) {
    return reduce(*result, cfg.reduce_tol);
  }
  return *result;
}

SynthesisResult synthesize(const TargetIntervals& targets,
                           const SynthesisConfig& cfg) {
  SynthesisPlan p = plan(targets);
  SynthesisResult out{p, build(p, cfg.build), 0.0, 0.0,
                      cfg.empirical.sample_count};

  // Residual against an independently assembled sample stream.
  const std::int64_t terms =
      std::max<std::int64_t>(cfg.verify_terms, 4 * out.recurrence.order());
  std::vector<double> expected(static_cast<std::size_t>(terms));
  const std::int64_t period = out.plan.has_fat() ? out.plan.period() : 0;
  const std::int64_t stride = out.plan.degenerate_points.empty() ? 1 : 2;
  const auto npoints =
      static_cast<std::int64_t>(out.plan.degenerate_points.size());
  for (std::int64_t n = 0; n < terms; ++n) {
    if (stride == 2 && (n % 2) == 1) {
      expected[static_cast<std::size_t>(n)] = out.plan.degenerate_points[
          static_cast<std::size_t>((n / 2) % npoints)];
    } else if (out.plan.has_fat()) {
      std::int64_t m = n / stride;
      expected[static_cast<std::size_t>(n)] =
          out.plan.periodic_values[static_cast<std::size_t>(m % period)] +
          0.5 * out.plan.rho0 * (std::cos(static_cast<double>(m)) + 1.0);
    } else {
      expected[static_cast<std::size_t>(n)] = out.plan.degenerate_points[
          static_cast<std::size_t>(n % npoints)];
    }
  }
  out.residual = verify_satisfies(out.recurrence, expected);

  EmpiricalClosure emp = empirical_closure(out.recurrence, cfg.empirical);
  std::vector<Interval> observed;
  for (const auto& iv : emp.intervals) observed.push_back(iv);
  for (double pt : emp.points) observed.push_back({pt, pt});
  out.hausdorff = emp.diverged
                      ? std::numeric_limits<double>::infinity()
                      : hausdorff_distance(merge_intervals(targets),
                                           merge_intervals(std::move(observed)));
  return out;
}

TargetIntervals random_targets(std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  int count = 1 + static_cast<int>(eng() % 5);
  TargetIntervals out;
  double cursor = uniform(eng, -20.0, 20.0);
  for (int i = 0; i < count; ++i) {
    double width = uniform(eng, 0.1, 10.0);
    out.push_back({cursor, cursor + width});
    cursor += width + uniform(eng, 0.2, 2.0);
  }
  return out;
}

}  // namespace recshape
