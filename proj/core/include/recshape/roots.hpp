#pragma once

#include <complex>
#include <vector>

#include "recshape/polynomial.hpp"

namespace recshape {

/// All roots of a real polynomial, with multiplicities recovered by
/// cluster analysis. residual is max |p(root)| over the distinct roots,
/// evaluated in compensated (double-double) arithmetic.
struct RootSet {
  struct Root {
    std::complex<double> value;
    int multiplicity = 1;
  };
  std::vector<Root> roots;
  double residual = 0.0;

  int degree() const;
};

/// Simultaneous Aberth-Ehrlich iteration from a perturbed circular start,
/// followed by inclusion-disk clustering and a double-double Newton polish
/// of each cluster representative. Roots closer than
/// cluster_tol * max(1, |root|) are merged with summed multiplicity.
/// Conjugate symmetry of the result is enforced (real input polynomial).
RootSet find_roots(const Polynomial& p, double cluster_tol = 1e-8);

}  // namespace recshape
