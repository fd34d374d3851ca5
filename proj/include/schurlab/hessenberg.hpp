#pragma once

#include <vector>

#include "schurlab/complex_matrix.hpp"

namespace schurlab {

// Reflection-coefficient parameterization of a lower unitary Hessenberg
// matrix: rho_1..rho_n with |rho_j| <= 1 and |rho_n| = 1, plus the derived
// real superdiagonal mu_j = sqrt(1 - |rho_j|^2).
struct SchurParams {
  std::vector<cplx> rho;
  std::vector<double> mu;  // length n-1

  // Validates the coefficient bounds and fills in mu.
  static SchurParams from_rho(std::vector<cplx> rho);
};

// Ordered product of unitary factors, factor k of the form I_{k-1} (+) H_k
// with H_k lower unitary Hessenberg on the trailing block.  Factors are
// stored embedded at full dimension.
struct HessenbergChain {
  std::size_t dim = 0;
  std::vector<ComplexMatrix> factors;

  // factors[0] * factors[1] * ... ; identity for an empty chain.
  ComplexMatrix product() const;
};

// Builds the lower unitary Hessenberg matrix with entry pattern
//   (1,1) = -rho_1, (j, j+1) = mu_j,
//   (i,j) = -rho_i mu_{i-1}...mu_j conj(rho_{j-1}) for i >= j  (no trailing
//   conjugate factor in column 1), zero above the superdiagonal.
ComplexMatrix hessenberg_from_params(const SchurParams& p);

// Recovers the parameters of the unique lower unitary Hessenberg matrix with
// the given (unit) first column.  Where the recovery degenerates (a prefix of
// x exhausts the norm, so some mu vanishes), the remaining coefficients are
// chosen so the trailing block is the identity.
SchurParams params_from_first_column(const std::vector<cplx>& x);

ComplexMatrix hessenberg_from_first_column(const std::vector<cplx>& x);

// Factors a unitary U into n-1 embedded Hessenberg factors by repeated
// first-column deflation; the k-th factor's trailing block has the same first
// column as the k-th deflated unitary.  The final 2x2 block is absorbed
// whole, so the product reconstructs U.
HessenbergChain factor_unitary(const ComplexMatrix& u);

}  // namespace schurlab
