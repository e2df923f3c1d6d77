#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include "recshape/recurrence.hpp"
#include "recshape/roots.hpp"

namespace recshape {

struct SpectralConfig {
  double root_cluster_tol = 1e-8;
  // Roots within this relative window of the max modulus count as dominant.
  double dominance_tol = 1e-9;
  // |dominant modulus - 1| window for the bounded-oscillatory class.
  double unit_modulus_tol = 1e-8;
  // Commensurability screen: accept theta/(2pi) ~ p/q with q <= angle_q_max
  // and error <= angle_tol. The defaults keep angle 1 rad incommensurate
  // (its best approximation with q <= 1024 errs by ~1.4e-8).
  std::int64_t angle_q_max = 1024;
  double angle_tol = 1e-9;
  // Integer-relation search bound among the torus frequencies.
  int relation_coeff_bound = 50;
  double relation_tol = 1e-9;
  // Basis terms with |coefficient| below this (relative to the largest)
  // are treated as not excited by the initial values.
  double coeff_prune_tol = 1e-10;
  // Vandermonde condition estimate above this flags the solve and
  // disables coefficient pruning.
  double condition_bound = 1e12;
  // Largest section count the exact path will expand.
  int max_sections = 4096;
};

struct RationalAngle {
  std::int64_t p = 0;
  std::int64_t q = 1;
};

/// Smallest-denominator continued-fraction convergent p/q of
/// theta/(2pi) mod 1 with q <= q_max and error <= tol, if any.
std::optional<RationalAngle> rational_angle(double theta, std::int64_t q_max,
                                            double tol);

struct DominantRoot {
  std::complex<double> value;
  double angle = 0.0;  // arg in [0, 2pi)
  int multiplicity = 1;
  std::optional<RationalAngle> rational;  // set iff commensurate with 2pi
};

/// Dominant-root summary: max modulus, polynomial growth degree
/// d = (max multiplicity among dominant roots) - 1, per-root angle
/// classification, and g = lcm of the commensurate denominators.
struct SpectralData {
  double dominant_modulus = 0.0;
  int d = 0;
  std::vector<DominantRoot> dominant_roots;
  std::int64_t g = 1;
};

SpectralData classify_dominant(const RootSet& roots,
                               const SpectralConfig& cfg = {});

/// One term of the explicit solution a_n = sum coefficient * n^power * root^n.
/// Roots at zero use the impulse basis [n == power] instead.
struct BasisTerm {
  std::complex<double> root;
  int power = 0;
  std::complex<double> coefficient;
};

struct SpectralCoefficients {
  std::vector<BasisTerm> terms;
  double condition = 0.0;
  double reconstruction_error = 0.0;  // relative, over 4h terms
  bool ill_conditioned = false;
};

/// Solve the confluent Vandermonde system against the initial values.
/// Requires sum of multiplicities == order. An ill-conditioned system is
/// flagged, not rejected.
SpectralCoefficients solve_coefficients(const LinearRecurrence& rec,
                                        const RootSet& roots);

enum class GrowthClass {
  Divergent,
  ConvergentToZero,
  BoundedOscillatory,
  EventuallyZero,
};

/// F(t) = sum_i amplitude_i * cos(2pi * (c_i . t) + phase_i) over the
/// m-torus, with shared generator frequencies tau_1..tau_m in (0,1).
struct TrigPolySpec {
  int dim = 0;
  struct Term {
    double amplitude = 0.0;
    std::vector<int> freq_coeffs;  // integer row c_i, length dim, nonzero
    double phase = 0.0;
  };
  std::vector<Term> terms;
  std::vector<double> frequencies;  // tau_j, pairwise distinct
};

double eval_trig(const TrigPolySpec& spec, std::span<const double> t);

/// Per-section data for bounded oscillatory sequences: along indices
/// n = g*m + k the sequence approaches offset + F_k(m tau_1, ..., m tau_m).
struct Section {
  double offset = 0.0;
  TrigPolySpec trig;
};

struct Decomposition {
  GrowthClass growth = GrowthClass::EventuallyZero;
  std::int64_t g = 1;
  std::vector<Section> sections;  // size g for bounded inputs, else empty
  bool independence_verified = false;
  double dominant_modulus = 0.0;
  int d = 0;
  // Largest modulus among active non-dominant roots; drives the o(1) decay.
  double subdominant_modulus = 0.0;
  SpectralData spectral;
  SpectralCoefficients coefficients;
  RootSet roots;
};

/// Classify growth from the active (initial-value-excited) characteristic
/// roots and, for bounded oscillatory sequences, split each of the g
/// sections into a constant offset plus a torus trig polynomial. Torus
/// frequencies are screened for bounded integer relations; relations with
/// a unit coefficient are folded into the integer rows, anything else
/// clears independence_verified.
Decomposition decompose(const LinearRecurrence& rec,
                        const SpectralConfig& cfg = {});

/// offset + trig value at sequence index n; the bounded part the sequence
/// converges to. Only meaningful for bounded oscillatory decompositions.
double reconstruct(const Decomposition& dec, std::int64_t n);

}  // namespace recshape
