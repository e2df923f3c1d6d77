#include "recshape/spectral.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "recshape/errors.hpp"

namespace recshape {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_unit(double x) {
  double f = x - std::floor(x);
  return f == 1.0 ? 0.0 : f;
}

std::int64_t lcm_checked(std::int64_t a, std::int64_t b, std::int64_t cap) {
  std::int64_t g = std::gcd(a, b);
  std::int64_t l = (a / g) * b;
  if (l > cap) {
    throw TorusBudgetError(
        "section count " + std::to_string(l) + " exceeds the exact-path cap");
  }
  return l;
}

struct Relation {
  std::vector<int> k;  // coefficients on tau_1..tau_m
  bool found = false;
};

// Exhaustive screen for sum k_j tau_j ~ integer with bounded coefficients.
// The bound shrinks with the dimension to keep the scan affordable.
Relation find_relation(const std::vector<double>& tau, int coeff_bound,
                       double tol) {
  Relation best;
  int m = static_cast<int>(tau.size());
  if (m == 0) return best;
  int bound = coeff_bound;
  double combos = std::pow(2.0 * bound + 1.0, m);
  while (combos > 4e6 && bound > 2) {
    bound /= 2;
    combos = std::pow(2.0 * bound + 1.0, m);
  }
  std::vector<int> k(static_cast<std::size_t>(m), -bound);
  long best_weight = 0;
  while (true) {
    double val = 0.0;
    long weight = 0;
    bool all_zero = true;
    for (int j = 0; j < m; ++j) {
      val += k[static_cast<std::size_t>(j)] * tau[static_cast<std::size_t>(j)];
      weight += std::abs(k[static_cast<std::size_t>(j)]);
      if (k[static_cast<std::size_t>(j)] != 0) all_zero = false;
    }
    if (!all_zero) {
      double dist = std::abs(val - std::round(val));
      if (dist <= tol * std::max<double>(1.0, static_cast<double>(weight))) {
        if (!best.found || weight < best_weight) {
          best.k.assign(k.begin(), k.end());
          best.found = true;
          best_weight = weight;
        }
      }
    }
    int j = 0;
    while (j < m && k[static_cast<std::size_t>(j)] == bound) {
      k[static_cast<std::size_t>(j)] = -bound;
      ++j;
    }
    if (j == m) break;
    ++k[static_cast<std::size_t>(j)];
  }
  return best;
}

}  // namespace

std::optional<RationalAngle> rational_angle(double theta, std::int64_t q_max,
                                            double tol) {
  if (q_max < 1) throw std::invalid_argument("rational_angle: q_max must be >= 1");
  if (!std::isfinite(theta)) return std::nullopt;
  double x = wrap_unit(theta / kTwoPi);

  // Convergents p_k/q_k of x; the first one inside the tolerance is the
  // smallest-denominator answer.
  std::int64_t p_prev = 1, q_prev = 0;
  std::int64_t p_cur = 0, q_cur = 1;  // a_0 = 0 since x in [0,1)
  double frac = x;
  for (int iter = 0; iter < 64; ++iter) {
    if (std::abs(x - static_cast<double>(p_cur) / static_cast<double>(q_cur)) <= tol) {
      return RationalAngle{p_cur, q_cur};
    }
    if (frac < 1e-18) break;
    double inv = 1.0 / frac;
    double a_floor = std::floor(inv);
    if (a_floor > 9.0e17) break;
    auto a = static_cast<std::int64_t>(a_floor);
    frac = inv - a_floor;
    std::int64_t p_next = a * p_cur + p_prev;
    std::int64_t q_next = a * q_cur + q_prev;
    if (q_next > q_max || q_next <= 0) break;
    p_prev = p_cur;
    q_prev = q_cur;
    p_cur = p_next;
    q_cur = q_next;
  }
  return std::nullopt;
}

SpectralData classify_dominant(const RootSet& roots, const SpectralConfig& cfg) {
  if (roots.roots.empty()) {
    throw std::invalid_argument("classify_dominant: empty root set");
  }
  SpectralData out;
  for (const auto& r : roots.roots) {
    out.dominant_modulus = std::max(out.dominant_modulus, std::abs(r.value));
  }
  std::int64_t g = 1;
  int max_mult = 1;
  for (const auto& r : roots.roots) {
    if (std::abs(r.value) < out.dominant_modulus * (1.0 - cfg.dominance_tol)) {
      continue;
    }
    DominantRoot dr;
    dr.value = r.value;
    dr.multiplicity = r.multiplicity;
    dr.angle = wrap_unit(std::arg(r.value) / kTwoPi) * kTwoPi;
    dr.rational = rational_angle(dr.angle, cfg.angle_q_max, cfg.angle_tol);
    if (dr.rational) g = lcm_checked(g, dr.rational->q, cfg.max_sections);
    max_mult = std::max(max_mult, r.multiplicity);
    out.dominant_roots.push_back(std::move(dr));
  }
  out.d = max_mult - 1;
  out.g = g;
  return out;
}

SpectralCoefficients solve_coefficients(const LinearRecurrence& rec,
                                        const RootSet& roots) {
  const int h = rec.order();
  if (roots.degree() != h) {
    throw std::invalid_argument(
        "solve_coefficients: root multiplicities must sum to the order");
  }

  SpectralCoefficients out;
  for (const auto& r : roots.roots) {
    for (int j = 0; j < r.multiplicity; ++j) {
      out.terms.push_back({r.value, j, 0.0});
    }
  }

  Eigen::MatrixXcd v(h, h);
  for (int n = 0; n < h; ++n) {
    for (int b = 0; b < h; ++b) {
      const auto& term = out.terms[static_cast<std::size_t>(b)];
      std::complex<double> entry;
      if (term.root == 0.0) {
        entry = (n == term.power) ? 1.0 : 0.0;  // impulse basis at a zero root
      } else {
        double npow = term.power == 0 ? 1.0 : std::pow(static_cast<double>(n), term.power);
        entry = npow * std::pow(term.root, n);
      }
      v(n, b) = entry;
    }
  }
  Eigen::VectorXcd rhs(h);
  for (int n = 0; n < h; ++n) rhs(n) = rec.initial[static_cast<std::size_t>(n)];

  Eigen::VectorXcd coeff;
  if (h <= 64) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(v,
                                           Eigen::ComputeThinU | Eigen::ComputeThinV);
    double smin = svd.singularValues()(h - 1);
    double smax = svd.singularValues()(0);
    out.condition = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
    coeff = svd.solve(rhs);
  } else {
    // Full SVD is too slow at large orders; LU with a reciprocal condition
    // estimate is enough to flag trouble.
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(v);
    double rcond = lu.rcond();
    out.condition = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
    coeff = lu.solve(rhs);
  }
  for (int b = 0; b < h; ++b) out.terms[static_cast<std::size_t>(b)].coefficient = coeff(b);

  const std::int64_t check_terms = 4 * static_cast<std::int64_t>(h);
  double worst = 0.0;
  double mag = 0.0;
  std::vector<double> actual;
  try {
    actual = sample_prefix(rec, check_terms);
  } catch (const EvaluationOverflow&) {
    actual = rec.initial;  // divergent too fast to check further out
  }
  for (std::size_t n = 0; n < actual.size(); ++n) {
    std::complex<double> recon = 0.0;
    for (const auto& term : out.terms) {
      if (term.root == 0.0) {
        if (static_cast<int>(n) == term.power) recon += term.coefficient;
      } else {
        double npow = term.power == 0
                          ? 1.0
                          : std::pow(static_cast<double>(n), term.power);
        recon += term.coefficient * npow * std::pow(term.root, static_cast<double>(n));
      }
    }
    mag = std::max(mag, std::abs(actual[n]));
    worst = std::max(worst, std::abs(recon.real() - actual[n]));
  }
  out.reconstruction_error = worst / (1.0 + mag);
  out.ill_conditioned = !(out.condition < 1e12);
  return out;
}

double eval_trig(const TrigPolySpec& spec, std::span<const double> t) {
  double acc = 0.0;
  for (const auto& term : spec.terms) {
    double dot = 0.0;
    for (int j = 0; j < spec.dim; ++j) {
      dot += term.freq_coeffs[static_cast<std::size_t>(j)] * t[static_cast<std::size_t>(j)];
    }
    acc += term.amplitude * std::cos(kTwoPi * dot + term.phase);
  }
  return acc;
}

Decomposition decompose(const LinearRecurrence& rec, const SpectralConfig& cfg) {
  Decomposition dec;
  dec.roots = find_roots(char_poly(rec), cfg.root_cluster_tol);
  dec.coefficients = solve_coefficients(rec, dec.roots);
  dec.spectral = classify_dominant(dec.roots, cfg);

  // Active basis terms: those actually excited by the initial values.
  double max_coeff = 0.0;
  for (const auto& term : dec.coefficients.terms) {
    max_coeff = std::max(max_coeff, std::abs(term.coefficient));
  }
  const bool prune = !dec.coefficients.ill_conditioned;
  std::vector<const BasisTerm*> active;
  for (const auto& term : dec.coefficients.terms) {
    if (prune && std::abs(term.coefficient) <= cfg.coeff_prune_tol * max_coeff) {
      continue;
    }
    active.push_back(&term);
  }

  double dom = 0.0;
  for (const auto* term : active) dom = std::max(dom, std::abs(term->root));
  dec.dominant_modulus = dom;
  if (active.empty() || dom == 0.0) {
    dec.growth = GrowthClass::EventuallyZero;
    dec.independence_verified = true;
    return dec;
  }

  int d = 0;
  double subdominant = 0.0;
  std::vector<const BasisTerm*> dominant;
  for (const auto* term : active) {
    double mod = std::abs(term->root);
    if (mod >= dom * (1.0 - cfg.dominance_tol)) {
      d = std::max(d, term->power);
      dominant.push_back(term);
    } else {
      subdominant = std::max(subdominant, mod);
    }
  }
  dec.d = d;
  dec.subdominant_modulus = subdominant;

  if (dom > 1.0 + cfg.unit_modulus_tol) {
    dec.growth = GrowthClass::Divergent;
    return dec;
  }
  if (dom < 1.0 - cfg.unit_modulus_tol) {
    dec.growth = GrowthClass::ConvergentToZero;
    return dec;
  }
  if (d >= 1) {
    dec.growth = GrowthClass::Divergent;
    return dec;
  }
  dec.growth = GrowthClass::BoundedOscillatory;

  // Split the dominant terms into commensurate (periodic) and
  // incommensurate (torus) parts. Conjugate pairs are carried by their
  // upper-half-plane member.
  struct Oscillator {
    double theta = 0.0;                 // arg in (0, pi)
    std::complex<double> coefficient;   // on e^{i theta n}
  };
  std::vector<const BasisTerm*> periodic;
  std::vector<Oscillator> oscillators;
  std::int64_t g = 1;
  for (const auto* term : dominant) {
    double theta = wrap_unit(std::arg(term->root) / kTwoPi) * kTwoPi;
    auto rat = rational_angle(theta, cfg.angle_q_max, cfg.angle_tol);
    if (rat) {
      periodic.push_back(term);
      g = lcm_checked(g, rat->q, cfg.max_sections);
    } else if (term->root.imag() > 0.0) {
      oscillators.push_back({theta, term->coefficient});
    }
  }

  // Shared per-section generators: frequencies g*theta/(2pi) mod 1,
  // identified up to reflection.
  struct TermSlot {
    std::size_t oscillator;
    int generator;
    int sign;  // +1: tau, -1: 1 - tau (phase flips)
  };
  std::vector<double> generators;
  std::vector<TermSlot> slots;
  const double gen_tol = 1e-9;
  for (std::size_t i = 0; i < oscillators.size(); ++i) {
    double sigma = wrap_unit(static_cast<double>(g) * oscillators[i].theta / kTwoPi);
    int found = -1;
    int sign = 1;
    for (std::size_t j = 0; j < generators.size(); ++j) {
      if (std::abs(sigma - generators[j]) <= gen_tol) {
        found = static_cast<int>(j);
        sign = 1;
        break;
      }
      if (std::abs((1.0 - sigma) - generators[j]) <= gen_tol) {
        found = static_cast<int>(j);
        sign = -1;
        break;
      }
    }
    if (found < 0) {
      generators.push_back(sigma);
      found = static_cast<int>(generators.size()) - 1;
      sign = 1;
    }
    slots.push_back({i, found, sign});
  }

  // Integer rows, initially unit vectors (a reflected match flips the
  // phase instead, cos being even); bounded relations with a unit
  // coefficient fold a generator away, anything else is flagged.
  std::vector<std::vector<int>> rows(slots.size());
  for (std::size_t i = 0; i < slots.size(); ++i) {
    rows[i].assign(generators.size(), 0);
    rows[i][static_cast<std::size_t>(slots[i].generator)] = 1;
  }
  dec.independence_verified = true;
  while (!generators.empty()) {
    Relation rel = find_relation(generators, cfg.relation_coeff_bound, cfg.relation_tol);
    if (!rel.found) break;
    int pivot = -1;
    for (std::size_t j = 0; j < rel.k.size(); ++j) {
      if (std::abs(rel.k[j]) == 1) {
        pivot = static_cast<int>(j);
        break;
      }
    }
    if (pivot < 0) {
      dec.independence_verified = false;
      break;
    }
    // tau_pivot = -s * sum_{j != pivot} k_j tau_j (mod 1), s = k_pivot.
    int s = rel.k[static_cast<std::size_t>(pivot)];
    for (auto& row : rows) {
      int cp = row[static_cast<std::size_t>(pivot)];
      if (cp != 0) {
        for (std::size_t j = 0; j < rel.k.size(); ++j) {
          if (static_cast<int>(j) == pivot) continue;
          row[j] -= cp * s * rel.k[j];
        }
      }
      row.erase(row.begin() + pivot);
    }
    generators.erase(generators.begin() + pivot);
  }

  // Assemble sections: along n = g*m + k commensurate roots contribute the
  // constant sum of c * root^k, each oscillator pair contributes
  // 2|c| cos(2pi m (c_i . tau) + theta k + arg c).
  dec.g = g;
  dec.sections.resize(static_cast<std::size_t>(g));
  for (std::int64_t k = 0; k < g; ++k) {
    Section& sec = dec.sections[static_cast<std::size_t>(k)];
    std::complex<double> offset = 0.0;
    for (const auto* term : periodic) {
      offset += term->coefficient * std::pow(term->root, static_cast<double>(k));
    }
    sec.offset = offset.real();
    sec.trig.dim = static_cast<int>(generators.size());
    sec.trig.frequencies = generators;
    for (std::size_t i = 0; i < slots.size(); ++i) {
      const auto& osc = oscillators[slots[i].oscillator];
      TrigPolySpec::Term term;
      term.amplitude = 2.0 * std::abs(osc.coefficient);
      term.phase = osc.theta * static_cast<double>(k) + std::arg(osc.coefficient);
      if (slots[i].sign < 0) term.phase = -term.phase;
      term.freq_coeffs = rows[i];
      bool zero_row = std::all_of(term.freq_coeffs.begin(), term.freq_coeffs.end(),
                                  [](int v) { return v == 0; });
      if (zero_row) {
        // Folded to a constant; absorb into the section offset.
        sec.offset += term.amplitude * std::cos(term.phase);
      } else {
        sec.trig.terms.push_back(std::move(term));
      }
    }
  }
  return dec;
}

double reconstruct(const Decomposition& dec, std::int64_t n) {
  if (dec.sections.empty()) {
    throw std::logic_error("reconstruct: decomposition has no sections");
  }
  std::int64_t k = n % dec.g;
  std::int64_t m = n / dec.g;
  const Section& sec = dec.sections[static_cast<std::size_t>(k)];
  std::vector<double> t(sec.trig.frequencies.size());
  for (std::size_t j = 0; j < t.size(); ++j) {
    double x = static_cast<double>(m) * sec.trig.frequencies[j];
    t[j] = x - std::floor(x);
  }
  return sec.offset + eval_trig(sec.trig, t);
}

}  // namespace recshape
