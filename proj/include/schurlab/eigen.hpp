#pragma once

#include <vector>

#include "schurlab/complex_matrix.hpp"

namespace schurlab {

// Eigenvalue with a unit eigenvector and the residual |A v - lambda v|.
struct EigenPair {
  cplx value;
  std::vector<cplx> vector;
  double residual;
};

// All eigenvalues via Householder reduction to Hessenberg form followed by
// Wilkinson-shifted QR, sorted by descending modulus with a lexicographic
// (re, im) tie-break.  Throws NumericFailureError if QR stalls.
std::vector<cplx> eigenvalues(const ComplexMatrix& a);

// Eigenvalues plus vectors from shifted inverse iteration.  Repeated
// eigenvalues are handled by deflating against already-found vectors; when an
// eigenvalue is defective the extra copies share the single direction that
// exists.  tol < 0 selects the default 1e-9 * max(1, |A|).
std::vector<EigenPair> eigenpairs(const ComplexMatrix& a, double tol = -1.0);

// One run of shifted inverse iteration near mu, orthogonalized against the
// given vectors each step.  Returns the best unit iterate and its residual;
// the vector's largest entry is rotated to the positive real axis so results
// are reproducible.
struct InverseIterationResult {
  std::vector<cplx> v;
  double residual;
  // The iterate whose own Rayleigh quotient gives the smallest residual.
  // When the requested shift carries error of its own, the plain residual
  // flattens at that error and stops measuring vector quality; this view
  // keeps improving, so callers can fall back on it.
  std::vector<cplx> rq_v;
  cplx rq;
  double rq_residual;
};

InverseIterationResult inverse_iteration(const ComplexMatrix& a, cplx mu,
                                         const std::vector<std::vector<cplx>>& deflate_against);

// Single-linkage grouping of values with the given merge radius.  Groups are
// listed in order of their first member; members keep input order.
std::vector<std::vector<std::size_t>> cluster_values(const std::vector<cplx>& values,
                                                     double radius);

// Merge radius that absorbs the eigenvalue splitting a defective block of the
// given size suffers at working precision: floor * 3 (eps * scale)^(1/n).
double defective_cluster_radius(std::size_t n, double scale, double floor_radius);

}  // namespace schurlab
