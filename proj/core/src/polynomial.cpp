#include "recshape/polynomial.hpp"

#include <cmath>
#include <stdexcept>

namespace recshape {

Polynomial::Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) {
    throw std::invalid_argument("polynomial needs at least one coefficient");
  }
  for (double c : coeffs_) {
    if (!std::isfinite(c)) {
      throw std::invalid_argument("polynomial coefficients must be finite");
    }
  }
  while (coeffs_.size() > 1 && coeffs_.back() == 0.0) {
    coeffs_.pop_back();
  }
}

Polynomial Polynomial::monic() const {
  double lead = coeffs_.back();
  if (lead == 0.0) {
    throw std::invalid_argument("zero polynomial has no monic form");
  }
  std::vector<double> out(coeffs_.size());
  for (std::size_t i = 0; i + 1 < coeffs_.size(); ++i) out[i] = coeffs_[i] / lead;
  out.back() = 1.0;
  return Polynomial(std::move(out));
}

std::complex<double> Polynomial::operator()(std::complex<double> z) const {
  std::complex<double> acc = 0.0;
  for (int k = degree(); k >= 0; --k) {
    acc = acc * z + coeffs_[static_cast<std::size_t>(k)];
  }
  return acc;
}

double Polynomial::operator()(double x) const {
  double acc = 0.0;
  for (int k = degree(); k >= 0; --k) {
    acc = acc * x + coeffs_[static_cast<std::size_t>(k)];
  }
  return acc;
}

Polynomial Polynomial::derivative() const {
  if (degree() == 0) return Polynomial({0.0});
  std::vector<double> out(coeffs_.size() - 1);
  for (std::size_t k = 1; k < coeffs_.size(); ++k) {
    out[k - 1] = coeffs_[k] * static_cast<double>(k);
  }
  return Polynomial(std::move(out));
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  const auto& ca = a.coefficients();
  const auto& cb = b.coefficients();
  std::vector<double> out(ca.size() + cb.size() - 1, 0.0);
  for (std::size_t i = 0; i < ca.size(); ++i) {
    for (std::size_t j = 0; j < cb.size(); ++j) {
      out[i + j] += ca[i] * cb[j];
    }
  }
  return Polynomial(std::move(out));
}

Polynomial stretch(const Polynomial& p, int g) {
  if (g < 1) throw std::invalid_argument("stretch factor must be positive");
  const auto& c = p.coefficients();
  std::vector<double> out(static_cast<std::size_t>(p.degree()) * g + 1, 0.0);
  for (std::size_t k = 0; k < c.size(); ++k) out[k * static_cast<std::size_t>(g)] = c[k];
  return Polynomial(std::move(out));
}

Polynomial poly_from_roots(
    std::span<const std::pair<std::complex<double>, int>> roots) {
  Polynomial acc({1.0});
  for (const auto& [z, mult] : roots) {
    if (mult < 1) throw std::invalid_argument("root multiplicity must be >= 1");
    if (z.imag() < 0.0) continue;  // conjugate partner handles the pair
    Polynomial factor =
        z.imag() == 0.0
            ? Polynomial({-z.real(), 1.0})
            : Polynomial({std::norm(z), -2.0 * z.real(), 1.0});
    for (int i = 0; i < mult; ++i) acc = acc * factor;
  }
  return acc;
}

}  // namespace recshape
