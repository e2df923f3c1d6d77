#pragma once

// Double-double helpers for compensated polynomial evaluation. Plain
// double Horner loses ~eps * sum |c_k| |z|^k absolutely, which swamps the
// residuals of well-converged roots of large-coefficient polynomials;
// evaluating in double-double keeps the reported residual meaningful.

#include <cmath>
#include <complex>
#include <span>

namespace recshape::detail {

struct dd {
  double hi = 0.0;
  double lo = 0.0;
};

inline dd two_sum(double a, double b) {
  double s = a + b;
  double bb = s - a;
  return {s, (a - (s - bb)) + (b - bb)};
}

inline dd quick_two_sum(double a, double b) {
  double s = a + b;
  return {s, b - (s - a)};
}

inline dd two_prod(double a, double b) {
  double p = a * b;
  return {p, std::fma(a, b, -p)};
}

inline dd dd_add(dd a, dd b) {
  dd s = two_sum(a.hi, b.hi);
  s.lo += a.lo + b.lo;
  return quick_two_sum(s.hi, s.lo);
}

inline dd dd_add(dd a, double b) {
  dd s = two_sum(a.hi, b);
  s.lo += a.lo;
  return quick_two_sum(s.hi, s.lo);
}

inline dd dd_neg(dd a) { return {-a.hi, -a.lo}; }

inline dd dd_sub(dd a, dd b) { return dd_add(a, dd_neg(b)); }

inline dd dd_mul(dd a, dd b) {
  dd p = two_prod(a.hi, b.hi);
  p.lo += a.hi * b.lo + a.lo * b.hi;
  return quick_two_sum(p.hi, p.lo);
}

inline double to_double(dd a) { return a.hi + a.lo; }

struct cdd {
  dd re;
  dd im;
};

inline cdd cdd_from(std::complex<double> z) {
  return {{z.real(), 0.0}, {z.imag(), 0.0}};
}

inline cdd cdd_add(cdd a, cdd b) {
  return {dd_add(a.re, b.re), dd_add(a.im, b.im)};
}

inline cdd cdd_add(cdd a, double b) { return {dd_add(a.re, b), a.im}; }

inline cdd cdd_mul(cdd a, cdd b) {
  return {dd_sub(dd_mul(a.re, b.re), dd_mul(a.im, b.im)),
          dd_add(dd_mul(a.re, b.im), dd_mul(a.im, b.re))};
}

inline std::complex<double> to_complex(cdd a) {
  return {to_double(a.re), to_double(a.im)};
}

inline double cdd_abs(cdd a) {
  return std::hypot(to_double(a.re), to_double(a.im));
}

/// Horner evaluation of a real-coefficient polynomial (ascending order)
/// at a complex point, carried in double-double.
inline cdd horner_dd(std::span<const double> coeffs, std::complex<double> z) {
  cdd acc{};
  cdd zz = cdd_from(z);
  for (int k = static_cast<int>(coeffs.size()) - 1; k >= 0; --k) {
    acc = cdd_add(cdd_mul(acc, zz), coeffs[static_cast<std::size_t>(k)]);
  }
  return acc;
}

}  // namespace recshape::detail
