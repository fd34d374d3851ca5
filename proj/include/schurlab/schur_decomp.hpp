#pragma once

#include <vector>

#include "schurlab/complex_matrix.hpp"
#include "schurlab/hessenberg.hpp"

namespace schurlab {

// Order in which eigenvalues are brought to the diagonal of T.
//   DescendingModulus - largest modulus first, (re, im) tie-break.
//   FirstDiagonal     - at each step, the eigenvalue nearest the current
//                       (1,1) entry of the active block; on an already
//                       triangular input this reproduces it exactly.
//   MatchTarget       - at step k, the remaining eigenvalue nearest
//                       target[k]; target must list n values.
enum class OrderingPolicy { DescendingModulus, FirstDiagonal, MatchTarget };

struct SchurForm {
  ComplexMatrix u;       // unitary
  ComplexMatrix t;       // upper triangular, exact zeros below the diagonal
  HessenbergChain chain; // the n-1 embedded factors whose product is u
  double residual;       // |u t u^* - A| at construction time
};

// Unitary triangularization by repeated first-column deflation: at each step
// an eigenvector of the active trailing block becomes the first column of a
// lower unitary Hessenberg factor, the block is conjugated by it, and the
// eliminated subcolumn is dropped.  Accepts n <= 64.
SchurForm schur_decompose(const ComplexMatrix& a,
                          OrderingPolicy policy = OrderingPolicy::DescendingModulus,
                          const std::vector<cplx>& target = {});

// max(|u t u^* - A|, |u^* u - I|, largest below-diagonal magnitude of t).
double verify_schur(const ComplexMatrix& a, const SchurForm& s);

}  // namespace schurlab
