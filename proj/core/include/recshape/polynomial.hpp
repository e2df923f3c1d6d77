#pragma once

#include <complex>
#include <span>
#include <utility>
#include <vector>

namespace recshape {

/// Real univariate polynomial with coefficients stored in ascending
/// degree order. The leading (highest-degree) coefficient is nonzero
/// except for the zero polynomial, which is stored as {0}.
class Polynomial {
public:
  Polynomial() : coeffs_{0.0} {}
  explicit Polynomial(std::vector<double> coeffs);

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<double>& coefficients() const { return coeffs_; }
  double leading() const { return coeffs_.back(); }

  /// Divide through by the leading coefficient.
  Polynomial monic() const;

  std::complex<double> operator()(std::complex<double> z) const;
  double operator()(double x) const;

  Polynomial derivative() const;

  bool operator==(const Polynomial&) const = default;

private:
  std::vector<double> coeffs_;
};

Polynomial operator*(const Polynomial& a, const Polynomial& b);

/// p(z^g): spreads coefficients g apart.
Polynomial stretch(const Polynomial& p, int g);

/// Monic polynomial with the given roots (with multiplicities). The root
/// multiset must be closed under conjugation; real parts are assembled
/// from real linear and conjugate-pair quadratic factors so the result
/// has exactly real coefficients.
Polynomial poly_from_roots(
    std::span<const std::pair<std::complex<double>, int>> roots);

}  // namespace recshape
