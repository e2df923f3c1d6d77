#include "recshape/roots.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <vector>

#include "dd.hpp"
#include "recshape/errors.hpp"

namespace recshape {

namespace {

using std::complex;
constexpr double kEps = std::numeric_limits<double>::epsilon();

// p(z) together with a running bound on the evaluation error; a value
// below the bound is numerically zero at this precision.
struct EvalWithBound {
  complex<double> value;
  double bound;
};

EvalWithBound horner_bounded(const std::vector<double>& c, complex<double> z) {
  complex<double> acc = 0.0;
  double mag = 0.0;
  double az = std::abs(z);
  for (int k = static_cast<int>(c.size()) - 1; k >= 0; --k) {
    acc = acc * z + c[static_cast<std::size_t>(k)];
    mag = mag * az + std::abs(c[static_cast<std::size_t>(k)]);
  }
  double n = static_cast<double>(c.size());
  return {acc, kEps * (4.0 * n + 4.0) * mag};
}

complex<double> horner(const std::vector<double>& c, complex<double> z) {
  complex<double> acc = 0.0;
  for (int k = static_cast<int>(c.size()) - 1; k >= 0; --k) {
    acc = acc * z + c[static_cast<std::size_t>(k)];
  }
  return acc;
}

std::vector<double> derivative_coeffs(const std::vector<double>& c) {
  if (c.size() <= 1) return {0.0};
  std::vector<double> out(c.size() - 1);
  for (std::size_t k = 1; k < c.size(); ++k) out[k - 1] = c[k] * static_cast<double>(k);
  return out;
}

// Fujiwara bound on the root moduli of a monic polynomial.
double initial_radius(const std::vector<double>& c) {
  int n = static_cast<int>(c.size()) - 1;
  double r = 0.0;
  for (int k = 1; k <= n; ++k) {
    double mag = std::abs(c[static_cast<std::size_t>(n - k)]);
    if (k == n) mag *= 0.5;
    if (mag > 0.0) r = std::max(r, std::pow(mag, 1.0 / k));
  }
  return std::clamp(2.0 * r, 1e-3, 1e12);
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

// Newton polish on the (mult-1)-th derivative, where an mult-fold root of p
// is simple. Evaluations run in double-double so the iteration can settle
// on the correctly rounded double root.
complex<double> polish_root(const std::vector<std::vector<double>>& derivs,
                            complex<double> z, int mult) {
  const auto& q = derivs[static_cast<std::size_t>(mult - 1)];
  const auto& dq = derivs[static_cast<std::size_t>(mult)];
  for (int iter = 0; iter < 60; ++iter) {
    complex<double> qv = detail::to_complex(detail::horner_dd(q, z));
    complex<double> dqv = detail::to_complex(detail::horner_dd(dq, z));
    if (dqv == 0.0) break;
    complex<double> step = qv / dqv;
    complex<double> next = z - step;
    if (!std::isfinite(next.real()) || !std::isfinite(next.imag())) break;
    z = next;
    if (std::abs(step) <= 0.25 * kEps * (1.0 + std::abs(z))) break;
  }
  return z;
}

}  // namespace

int RootSet::degree() const {
  int d = 0;
  for (const auto& r : roots) d += r.multiplicity;
  return d;
}

RootSet find_roots(const Polynomial& p_in, double cluster_tol) {
  if (p_in.degree() < 1) {
    throw std::invalid_argument("find_roots: polynomial degree must be >= 1");
  }
  const double lead_scale = std::abs(p_in.leading());
  std::vector<double> c = p_in.monic().coefficients();

  // Exact zero roots deflate before iterating.
  int zero_mult = 0;
  while (c.size() > 1 && c.front() == 0.0) {
    c.erase(c.begin());
    ++zero_mult;
  }

  RootSet out;
  int n = static_cast<int>(c.size()) - 1;
  if (n == 0) {
    out.roots.push_back({complex<double>(0.0, 0.0), zero_mult});
    out.residual = 0.0;
    return out;
  }

  // Perturbed circular start; the angular offset breaks the symmetry of
  // real-axis-symmetric root configurations.
  std::vector<complex<double>> z(static_cast<std::size_t>(n));
  double radius = initial_radius(c);
  for (int i = 0; i < n; ++i) {
    double ang = 2.0 * std::numbers::pi * (i + 0.25) / n + 0.401;
    z[static_cast<std::size_t>(i)] = radius * std::polar(1.0, ang);
  }

  std::vector<double> dc = derivative_coeffs(c);
  std::vector<bool> locked(static_cast<std::size_t>(n), false);
  const int max_iter = 600;
  bool converged = false;
  for (int iter = 0; iter < max_iter && !converged; ++iter) {
    double max_step = 0.0;
    for (int i = 0; i < n; ++i) {
      auto& zi = z[static_cast<std::size_t>(i)];
      if (locked[static_cast<std::size_t>(i)]) continue;
      auto [pv, bound] = horner_bounded(c, zi);
      if (std::abs(pv) <= bound) {
        locked[static_cast<std::size_t>(i)] = true;
        continue;
      }
      complex<double> dv = horner(dc, zi);
      complex<double> ratio;
      if (dv == 0.0) {
        zi *= complex<double>(1.0 + 1e-6, 1e-6);  // nudge off the stationary point
        max_step = 1.0;
        continue;
      }
      ratio = pv / dv;
      complex<double> sum = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        complex<double> diff = zi - z[static_cast<std::size_t>(j)];
        if (diff == 0.0) {
          diff = complex<double>(kEps * (1.0 + std::abs(zi)), 0.0);
        }
        sum += 1.0 / diff;
      }
      complex<double> denom = 1.0 - ratio * sum;
      complex<double> step = std::abs(denom) < 1e-30 ? ratio : ratio / denom;
      zi -= step;
      if (!std::isfinite(zi.real()) || !std::isfinite(zi.imag())) {
        zi = radius * std::polar(1.0, 0.7 * (i + 1));
        max_step = 1.0;
        continue;
      }
      max_step = std::max(max_step, std::abs(step) / (1.0 + std::abs(zi)));
    }
    if (max_step <= 1e-14) converged = true;
    if (std::all_of(locked.begin(), locked.end(), [](bool b) { return b; })) {
      converged = true;
    }
  }
  if (!converged) {
    double res = 0.0;
    for (auto zi : z) res = std::max(res, detail::cdd_abs(detail::horner_dd(c, zi)));
    throw RootFindingError(res, "find_roots: Aberth iteration did not converge");
  }

  // Inclusion-disk clustering: each approximation owns a disk of radius
  // n |p(z_i)| / prod |z_i - z_j|; overlapping disks share a (multiple)
  // root. The user tolerance merges split representations of equal roots.
  std::vector<double> incl(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double pv = detail::cdd_abs(detail::horner_dd(c, z[static_cast<std::size_t>(i)]));
    double prod = 1.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      prod *= std::abs(z[static_cast<std::size_t>(i)] - z[static_cast<std::size_t>(j)]);
    }
    incl[static_cast<std::size_t>(i)] =
        prod > 0.0 ? n * pv / prod : std::numeric_limits<double>::infinity();
  }
  UnionFind uf(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double dist = std::abs(z[static_cast<std::size_t>(i)] - z[static_cast<std::size_t>(j)]);
      double merge_radius =
          3.0 * (incl[static_cast<std::size_t>(i)] + incl[static_cast<std::size_t>(j)]);
      double tol_radius =
          cluster_tol * std::max(1.0, std::abs(z[static_cast<std::size_t>(i)]));
      if (dist <= std::max(merge_radius, tol_radius)) uf.unite(i, j);
    }
  }
  std::vector<complex<double>> centers;
  std::vector<int> mults;
  {
    std::vector<int> rep_index(static_cast<std::size_t>(n), -1);
    for (int i = 0; i < n; ++i) {
      int r = uf.find(i);
      if (rep_index[static_cast<std::size_t>(r)] < 0) {
        rep_index[static_cast<std::size_t>(r)] = static_cast<int>(centers.size());
        centers.push_back({0.0, 0.0});
        mults.push_back(0);
      }
      int idx = rep_index[static_cast<std::size_t>(r)];
      centers[static_cast<std::size_t>(idx)] += z[static_cast<std::size_t>(i)];
      mults[static_cast<std::size_t>(idx)] += 1;
    }
    for (std::size_t i = 0; i < centers.size(); ++i) {
      centers[i] /= static_cast<double>(mults[i]);
    }
  }

  int max_mult = *std::max_element(mults.begin(), mults.end());
  std::vector<std::vector<double>> derivs;
  derivs.push_back(c);
  for (int m = 1; m <= max_mult; ++m) derivs.push_back(derivative_coeffs(derivs.back()));

  for (std::size_t i = 0; i < centers.size(); ++i) {
    complex<double> polished = polish_root(derivs, centers[i], mults[i]);
    if (detail::cdd_abs(detail::horner_dd(c, polished)) <=
        detail::cdd_abs(detail::horner_dd(c, centers[i]))) {
      centers[i] = polished;
    }
  }

  // Real polynomial: snap near-real roots and average conjugate partners.
  for (auto& zc : centers) {
    if (std::abs(zc.imag()) <= std::max(cluster_tol, 1e-12) * (1.0 + std::abs(zc))) {
      zc = complex<double>(zc.real(), 0.0);
    }
  }
  {
    std::vector<bool> used(centers.size(), false);
    for (std::size_t i = 0; i < centers.size(); ++i) {
      if (used[i] || centers[i].imag() <= 0.0) continue;
      std::size_t best = centers.size();
      double best_dist = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < centers.size(); ++j) {
        if (used[j] || j == i || centers[j].imag() >= 0.0) continue;
        double dist = std::abs(centers[i] - std::conj(centers[j]));
        if (dist < best_dist) {
          best_dist = dist;
          best = j;
        }
      }
      if (best < centers.size() && mults[best] == mults[i]) {
        complex<double> avg = 0.5 * (centers[i] + std::conj(centers[best]));
        centers[i] = avg;
        centers[best] = std::conj(avg);
        used[i] = used[best] = true;
      }
    }
  }

  for (std::size_t i = 0; i < centers.size(); ++i) {
    out.roots.push_back({centers[i], mults[i]});
  }
  if (zero_mult > 0) out.roots.push_back({complex<double>(0.0, 0.0), zero_mult});

  std::sort(out.roots.begin(), out.roots.end(), [](const auto& a, const auto& b) {
    if (a.value.real() != b.value.real()) return a.value.real() < b.value.real();
    return a.value.imag() < b.value.imag();
  });

  double res = 0.0;
  for (const auto& r : out.roots) {
    if (r.value == 0.0 && zero_mult > 0) continue;  // deflated exactly
    res = std::max(res, detail::cdd_abs(detail::horner_dd(c, r.value)));
  }
  out.residual = res * (lead_scale > 0.0 ? lead_scale : 1.0);
  return out;
}

}  // namespace recshape
