#pragma once

#include <vector>

#include "schurlab/complex_matrix.hpp"

namespace schurlab {

// Full singular value decomposition m = left * diag(singular_values) * right^*.
// left is rows x rows, right is cols x cols, both unitary; singular_values has
// length min(rows, cols) and is sorted descending.
struct SvdResult {
  ComplexMatrix left;
  std::vector<double> singular_values;
  ComplexMatrix right;
};

// One-sided Jacobi SVD.  Accurate for the small dense matrices this library
// works with; throws NumericFailureError when the sweep cap (60) is hit.
SvdResult svd(const ComplexMatrix& m);

std::vector<double> singular_values(const ComplexMatrix& m);

// Spectral norm (largest singular value).
double operator_norm(const ComplexMatrix& m);

// Number of singular values above tol * max(1, sigma_max).
int rank_with_tol(const ComplexMatrix& m, double tol);

struct RankResult {
  int rank;
  // Set when some singular value lies within a factor of 10 of the threshold,
  // i.e. the rank decision is sensitive to the tolerance choice.
  bool ambiguous;
};

RankResult rank_with_tol_flagged(const ComplexMatrix& m, double tol);

// Completes a list of pairwise orthonormal vectors (possibly empty) to a full
// orthonormal basis of C^dim, returned as a dim x dim unitary whose leading
// columns are the inputs.  Candidates are the canonical basis vectors, taken
// in order through modified Gram-Schmidt; near-dependent candidates (residual
// below 1e-6) are skipped.
ComplexMatrix orthonormal_extend(const std::vector<std::vector<cplx>>& vectors, std::size_t dim);

}  // namespace schurlab
