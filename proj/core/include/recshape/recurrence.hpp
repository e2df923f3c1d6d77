#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "recshape/polynomial.hpp"

namespace recshape {

/// Order-h real linear recurrence
///   a_{n+h} = coefficients[0] * a_{n+h-1} + ... + coefficients[h-1] * a_n
/// together with the initial values a_0, ..., a_{h-1}.
struct LinearRecurrence {
  std::vector<double> coefficients;
  std::vector<double> initial;

  LinearRecurrence(std::vector<double> coeffs, std::vector<double> init);

  int order() const { return static_cast<int>(coefficients.size()); }
};

/// a_n = cos n, the order-2 recurrence with coefficients (2 cos 1, -1).
LinearRecurrence cosine_sequence();

/// a_n for n in [n_lo, n_hi], by direct iteration. Indices below the order
/// read from the initial values. Throws EvaluationOverflow at the first
/// non-finite term.
std::vector<double> evaluate(const LinearRecurrence& rec, std::int64_t n_lo,
                             std::int64_t n_hi);

/// a_0, ..., a_{count-1}.
std::vector<double> sample_prefix(const LinearRecurrence& rec,
                                  std::int64_t count);

/// State vector (a_n, ..., a_{n+h-1}) by companion-matrix powering.
/// Agrees with sequential iteration up to floating-point reordering.
std::vector<double> state_at(const LinearRecurrence& rec, std::int64_t n);

/// Monic characteristic polynomial z^h - c_1 z^{h-1} - ... - c_h.
Polynomial char_poly(const LinearRecurrence& rec);

/// Recurrence for the termwise sum a_n + b_n. The characteristic
/// polynomial is the numeric lcm of the inputs' characteristic
/// polynomials (root multiset union, multiplicity = max).
LinearRecurrence add(const LinearRecurrence& a, const LinearRecurrence& b);

/// Recurrence for c * a_n: same coefficients, scaled initial values.
LinearRecurrence scale(const LinearRecurrence& rec, double c);

/// Recurrence for the termwise product a_n * b_n, recovered by sampling
/// 2*order(a)*order(b) + 8 product terms and fitting the minimal
/// recurrence through them.
LinearRecurrence multiply(const LinearRecurrence& a, const LinearRecurrence& b);

/// Recurrence for c_{g n + k} = (parts[k])_n with g = parts.size(). The
/// characteristic polynomial is the product of the parts' characteristic
/// polynomials evaluated at z^g.
LinearRecurrence interlace(const std::vector<LinearRecurrence>& parts);

/// Recurrence for the section (a_{g n + k})_{n >= 0}; characteristic roots
/// are the g-th powers of the input's roots.
LinearRecurrence section(const LinearRecurrence& rec, int g, int k);

/// Order-P recurrence with characteristic polynomial z^P - 1 and the given
/// period of initial values.
LinearRecurrence periodic_from_values(const std::vector<double>& values);

/// Minimal-order recurrence (order <= max_order) whose iteration from the
/// leading samples reproduces all samples within tol, relative to the
/// sample magnitude. Candidate coefficients come from increasing-order
/// Hankel least squares; an order is accepted once its reproduction
/// residual is below tol and stays below at the next order. Throws
/// FitError if nothing fits.
LinearRecurrence fit_minimal(std::span<const double> samples, int max_order,
                             double tol);

/// Max over n of |samples[n+h] - sum_i c_i samples[n+h-i]|, normalized by
/// (1 + max |sample|). Zero means the samples satisfy the recurrence.
double verify_satisfies(const LinearRecurrence& rec,
                        std::span<const double> samples);

/// Re-fit a recurrence at (at most) its own order to strip redundant
/// characteristic factors picked up by the algebra operations.
LinearRecurrence reduce(const LinearRecurrence& rec, double tol = 1e-9);

}  // namespace recshape
