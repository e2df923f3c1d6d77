#include "recshape/recurrence.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "recshape/errors.hpp"
#include "recshape/roots.hpp"

namespace recshape {

namespace {

constexpr std::int64_t kMaxWindow = 100'000'000;

void check_finite(const std::vector<double>& v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw std::invalid_argument(std::string(what) + " must be finite");
    }
  }
}

// Union of two root multisets, multiplicity = max; roots within the
// relative tolerance identify.
std::vector<std::pair<std::complex<double>, int>> root_union(
    const RootSet& a, const RootSet& b, double tol) {
  std::vector<std::pair<std::complex<double>, int>> out;
  out.reserve(a.roots.size() + b.roots.size());
  for (const auto& r : a.roots) out.emplace_back(r.value, r.multiplicity);
  for (const auto& r : b.roots) {
    bool matched = false;
    for (auto& [z, m] : out) {
      if (std::abs(z - r.value) <= tol * std::max(1.0, std::abs(z))) {
        m = std::max(m, r.multiplicity);
        matched = true;
        break;
      }
    }
    if (!matched) out.emplace_back(r.value, r.multiplicity);
  }
  return out;
}

LinearRecurrence from_char_poly(const Polynomial& monic,
                                std::vector<double> initial) {
  const auto& c = monic.coefficients();
  int h = monic.degree();
  std::vector<double> eta(static_cast<std::size_t>(h));
  for (int i = 1; i <= h; ++i) {
    eta[static_cast<std::size_t>(i - 1)] = -c[static_cast<std::size_t>(h - i)];
  }
  return LinearRecurrence(std::move(eta), std::move(initial));
}

void check_construction(const LinearRecurrence& rec,
                        const std::vector<double>& expected, const char* op) {
  double res = verify_satisfies(rec, expected);
  if (!(res <= 1e-6)) {
    throw ConstructionError(std::string(op) +
                            ": constructed recurrence failed verification, residual " +
                            std::to_string(res));
  }
}

}  // namespace

LinearRecurrence::LinearRecurrence(std::vector<double> coeffs,
                                   std::vector<double> init)
    : coefficients(std::move(coeffs)), initial(std::move(init)) {
  if (coefficients.empty()) {
    throw std::invalid_argument("recurrence order must be >= 1");
  }
  if (coefficients.size() != initial.size()) {
    throw std::invalid_argument(
        "coefficients and initial values must both have length == order");
  }
  check_finite(coefficients, "recurrence coefficients");
  check_finite(initial, "recurrence initial values");
}

LinearRecurrence cosine_sequence() {
  return LinearRecurrence({2.0 * std::cos(1.0), -1.0}, {1.0, std::cos(1.0)});
}

std::vector<double> evaluate(const LinearRecurrence& rec, std::int64_t n_lo,
                             std::int64_t n_hi) {
  if (n_lo < 0 || n_hi < n_lo) {
    throw std::invalid_argument("evaluate: need 0 <= n_lo <= n_hi");
  }
  if (n_hi - n_lo + 1 > kMaxWindow || n_hi > kMaxWindow) {
    throw std::invalid_argument("evaluate: index window too large");
  }
  const int h = rec.order();
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n_hi - n_lo + 1));

  std::vector<double> window(rec.initial);  // a_n, ..., a_{n+h-1}
  auto push_if_in_range = [&](std::int64_t idx, double value) {
    if (idx >= n_lo && idx <= n_hi) out.push_back(value);
  };
  for (int i = 0; i < h; ++i) push_if_in_range(i, window[static_cast<std::size_t>(i)]);
  for (std::int64_t n = h; n <= n_hi; ++n) {
    double next = 0.0;
    for (int i = 0; i < h; ++i) {
      next += rec.coefficients[static_cast<std::size_t>(i)] *
              window[static_cast<std::size_t>(h - 1 - i)];
    }
    if (!std::isfinite(next)) {
      throw EvaluationOverflow(
          n, "evaluate: non-finite value at index " + std::to_string(n));
    }
    window.erase(window.begin());
    window.push_back(next);
    push_if_in_range(n, next);
  }
  return out;
}

std::vector<double> sample_prefix(const LinearRecurrence& rec,
                                  std::int64_t count) {
  if (count < 1) throw std::invalid_argument("sample_prefix: count must be >= 1");
  return evaluate(rec, 0, count - 1);
}

std::vector<double> state_at(const LinearRecurrence& rec, std::int64_t n) {
  if (n < 0) throw std::invalid_argument("state_at: index must be >= 0");
  const int h = rec.order();
  Eigen::MatrixXd step = Eigen::MatrixXd::Zero(h, h);
  for (int i = 0; i + 1 < h; ++i) step(i, i + 1) = 1.0;
  for (int i = 0; i < h; ++i) {
    step(h - 1, i) = rec.coefficients[static_cast<std::size_t>(h - 1 - i)];
  }
  Eigen::MatrixXd pow = Eigen::MatrixXd::Identity(h, h);
  std::int64_t e = n;
  while (e > 0) {
    if (e & 1) pow = pow * step;
    step = step * step;
    e >>= 1;
    if (!pow.allFinite() || (e > 0 && !step.allFinite())) {
      throw EvaluationOverflow(n, "state_at: companion power overflowed");
    }
  }
  Eigen::VectorXd s0 = Eigen::Map<const Eigen::VectorXd>(rec.initial.data(), h);
  Eigen::VectorXd sn = pow * s0;
  if (!sn.allFinite()) {
    throw EvaluationOverflow(n, "state_at: state overflowed");
  }
  return std::vector<double>(sn.data(), sn.data() + h);
}

Polynomial char_poly(const LinearRecurrence& rec) {
  const int h = rec.order();
  std::vector<double> c(static_cast<std::size_t>(h) + 1);
  c[static_cast<std::size_t>(h)] = 1.0;
  for (int i = 1; i <= h; ++i) {
    c[static_cast<std::size_t>(h - i)] = -rec.coefficients[static_cast<std::size_t>(i - 1)];
  }
  return Polynomial(std::move(c));
}

LinearRecurrence add(const LinearRecurrence& a, const LinearRecurrence& b) {
  RootSet ra = find_roots(char_poly(a));
  RootSet rb = find_roots(char_poly(b));
  auto united = root_union(ra, rb, 1e-8);
  Polynomial cp = poly_from_roots(united);
  int h = cp.degree();

  std::int64_t need = std::max<std::int64_t>(4 * h, h);
  std::vector<double> sa = sample_prefix(a, need);
  std::vector<double> sb = sample_prefix(b, need);
  std::vector<double> sums(sa.size());
  for (std::size_t i = 0; i < sa.size(); ++i) sums[i] = sa[i] + sb[i];

  LinearRecurrence out = from_char_poly(
      cp, std::vector<double>(sums.begin(), sums.begin() + h));
  check_construction(out, sums, "add");
  return out;
}

LinearRecurrence scale(const LinearRecurrence& rec, double c) {
  if (!std::isfinite(c)) throw std::invalid_argument("scale: factor must be finite");
  std::vector<double> init(rec.initial);
  for (double& x : init) x *= c;
  return LinearRecurrence(rec.coefficients, std::move(init));
}

LinearRecurrence multiply(const LinearRecurrence& a, const LinearRecurrence& b) {
  const int max_order = a.order() * b.order();
  const std::int64_t fit_len = 2 * static_cast<std::int64_t>(max_order) + 8;
  const std::int64_t verify_len = 4 * fit_len;
  std::vector<double> sa = sample_prefix(a, verify_len);
  std::vector<double> sb = sample_prefix(b, verify_len);
  std::vector<double> products(sa.size());
  for (std::size_t i = 0; i < sa.size(); ++i) products[i] = sa[i] * sb[i];

  LinearRecurrence out = [&] {
    try {
      return fit_minimal(
          std::span<const double>(products.data(), static_cast<std::size_t>(fit_len)),
          max_order, 1e-9);
    } catch (const FitError& e) {
      throw FitError(std::string("multiply: ") + e.what() +
                     " (a larger sample window or looser tolerance may help)");
    }
  }();
  check_construction(out, products, "multiply");
  return out;
}

LinearRecurrence interlace(const std::vector<LinearRecurrence>& parts) {
  if (parts.empty()) throw std::invalid_argument("interlace: need at least one part");
  const int g = static_cast<int>(parts.size());
  Polynomial cp({1.0});
  for (const auto& part : parts) cp = cp * stretch(char_poly(part), g);
  const int h = cp.degree();

  std::int64_t per_part = (h + g - 1) / g;
  std::vector<std::vector<double>> prefixes;
  prefixes.reserve(parts.size());
  for (const auto& part : parts) prefixes.push_back(sample_prefix(part, per_part));
  std::vector<double> init(static_cast<std::size_t>(h));
  for (int j = 0; j < h; ++j) {
    init[static_cast<std::size_t>(j)] =
        prefixes[static_cast<std::size_t>(j % g)][static_cast<std::size_t>(j / g)];
  }
  return from_char_poly(cp, std::move(init));
}

LinearRecurrence section(const LinearRecurrence& rec, int g, int k) {
  if (g < 1) throw std::invalid_argument("section: g must be >= 1");
  if (k < 0 || k >= g) throw std::invalid_argument("section: need 0 <= k < g");
  RootSet rs = find_roots(char_poly(rec));

  // Image roots alpha^g; colliding images keep the larger multiplicity
  // (a sum of polynomials in n of bounded degree stays that degree).
  std::vector<std::pair<std::complex<double>, int>> powered;
  for (const auto& r : rs.roots) {
    std::complex<double> zg = std::pow(r.value, g);
    bool matched = false;
    for (auto& [z, m] : powered) {
      if (std::abs(z - zg) <= 1e-8 * std::max(1.0, std::abs(z))) {
        m = std::max(m, r.multiplicity);
        matched = true;
        break;
      }
    }
    if (!matched) powered.emplace_back(zg, r.multiplicity);
  }
  // Re-symmetrize: averaging powered conjugate pairs keeps the expansion real.
  for (auto& [z, m] : powered) {
    if (std::abs(z.imag()) <= 1e-12 * (1.0 + std::abs(z))) z = {z.real(), 0.0};
  }
  Polynomial cp = poly_from_roots(powered);
  int h = cp.degree();

  std::vector<double> init(static_cast<std::size_t>(h));
  std::vector<double> vals =
      evaluate(rec, k, k + static_cast<std::int64_t>(g) * (h - 1));
  for (int j = 0; j < h; ++j) {
    init[static_cast<std::size_t>(j)] = vals[static_cast<std::size_t>(j) * g];
  }
  return from_char_poly(cp, std::move(init));
}

LinearRecurrence periodic_from_values(const std::vector<double>& values) {
  if (values.empty()) {
    throw std::invalid_argument("periodic_from_values: need at least one value");
  }
  std::vector<double> eta(values.size(), 0.0);
  eta.back() = 1.0;
  return LinearRecurrence(std::move(eta), values);
}

double verify_satisfies(const LinearRecurrence& rec,
                        std::span<const double> samples) {
  const int h = rec.order();
  if (static_cast<std::int64_t>(samples.size()) <= h) {
    throw std::invalid_argument("verify_satisfies: need more samples than the order");
  }
  double scale_mag = 0.0;
  for (double s : samples) scale_mag = std::max(scale_mag, std::abs(s));
  double worst = 0.0;
  for (std::size_t n = 0; n + static_cast<std::size_t>(h) < samples.size(); ++n) {
    double pred = 0.0;
    for (int i = 1; i <= h; ++i) {
      pred += rec.coefficients[static_cast<std::size_t>(i - 1)] *
              samples[n + static_cast<std::size_t>(h - i)];
    }
    worst = std::max(worst, std::abs(samples[n + static_cast<std::size_t>(h)] - pred));
  }
  return worst / (1.0 + scale_mag);
}

LinearRecurrence fit_minimal(std::span<const double> samples, int max_order,
                             double tol) {
  if (max_order < 1) throw std::invalid_argument("fit_minimal: max_order must be >= 1");
  const std::int64_t len = static_cast<std::int64_t>(samples.size());
  if (len < 2 * static_cast<std::int64_t>(max_order) + 2) {
    throw std::invalid_argument(
        "fit_minimal: need at least 2*max_order + 2 samples");
  }
  double scale_mag = 0.0;
  for (double s : samples) {
    if (!std::isfinite(s)) {
      throw std::invalid_argument("fit_minimal: samples must be finite");
    }
    scale_mag = std::max(scale_mag, std::abs(s));
  }

  // Iteration-reproduction residual of the best order-r least-squares fit.
  auto fit_at = [&](int r) -> std::pair<double, LinearRecurrence> {
    const std::int64_t rows = len - r;
    Eigen::MatrixXd A(rows, r);
    Eigen::VectorXd rhs(rows);
    for (std::int64_t n = 0; n < rows; ++n) {
      for (int j = 0; j < r; ++j) {
        A(n, j) = samples[static_cast<std::size_t>(n + r - 1 - j)];
      }
      rhs(n) = samples[static_cast<std::size_t>(n + r)];
    }
    Eigen::VectorXd eta = A.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(rhs);
    std::vector<double> coeffs(eta.data(), eta.data() + r);
    for (double& x : coeffs) {
      if (!std::isfinite(x)) x = 0.0;
    }
    LinearRecurrence cand(
        coeffs, std::vector<double>(samples.begin(), samples.begin() + r));
    double worst = 0.0;
    std::vector<double> window(cand.initial);
    for (std::int64_t n = r; n < len; ++n) {
      double next = 0.0;
      for (int i = 0; i < r; ++i) {
        next += cand.coefficients[static_cast<std::size_t>(i)] *
                window[static_cast<std::size_t>(r - 1 - i)];
      }
      if (!std::isfinite(next)) {
        return {std::numeric_limits<double>::infinity(), cand};
      }
      worst = std::max(worst, std::abs(next - samples[static_cast<std::size_t>(n)]));
      window.erase(window.begin());
      window.push_back(next);
    }
    return {worst / (1.0 + scale_mag), cand};
  };

  auto current = fit_at(1);
  for (int r = 1; r <= max_order; ++r) {
    if (current.first <= tol) {
      if (r == max_order) return current.second;
      auto next = fit_at(r + 1);
      if (next.first <= tol) return current.second;
      current = std::move(next);
    } else if (r < max_order) {
      current = fit_at(r + 1);
    }
  }
  throw FitError("fit_minimal: no recurrence of order <= " +
                 std::to_string(max_order) + " reproduces the samples; " +
                 "not C-finite at this order/tolerance");
}

LinearRecurrence reduce(const LinearRecurrence& rec, double tol) {
  const int h = rec.order();
  std::int64_t len = std::max<std::int64_t>(4 * h + 16, 2 * h + 2);
  std::vector<double> samples = sample_prefix(rec, len);
  return fit_minimal(samples, h, tol);
}

}  // namespace recshape
