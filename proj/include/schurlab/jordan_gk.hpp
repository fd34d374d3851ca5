#pragma once

#include <cstddef>
#include <vector>

#include "schurlab/complex_matrix.hpp"

namespace schurlab {

// Kernel dimensions of successive powers of A - lambda I.  The list stops at
// the first stationary value (always reporting at least one entry), so a
// lambda that is not an eigenvalue yields {0}.
struct WeyrResult {
  std::vector<std::size_t> nullities;
  // Some rank decision had a singular value within a factor of 10 of its
  // threshold; the structure should not be trusted without a tolerance review.
  bool uncertain = false;
};

// max_nullity caps the search (pass the algebraic multiplicity when known);
// 0 means "up to the full dimension".
WeyrResult weyr_nullities(const ComplexMatrix& a, cplx lambda, double rank_tol,
                          std::size_t max_nullity = 0);

// Converts kernel dimensions d_k into Jordan block sizes, non-increasing.
// The increments d_k - d_{k-1} count blocks of size >= k, so they must be
// non-negative and non-increasing; anything else signals a bad tolerance.
std::vector<std::size_t> block_sizes_from_nullities(const std::vector<std::size_t>& d);

// k_i = max{ l : m_l >= i } (0 when the set is empty), same length as m.
// Applying it twice returns the original sequence.
std::vector<std::size_t> dual_sequence(const std::vector<std::size_t>& m);

// Per-eigenvalue Jordan block sizes with the aggregate size sequence and its
// dual.  eigenvalues holds one representative per cluster, sorted by (re, im).
struct GkProfile {
  std::vector<cplx> eigenvalues;
  std::vector<std::vector<std::size_t>> block_sizes;  // parallel to eigenvalues
  std::vector<std::size_t> aggregate_m;               // length dim
  std::vector<std::size_t> dual_k;                    // length dim
  bool uncertain = false;
  std::size_t dim = 0;
};

GkProfile gk_profile(const ComplexMatrix& a, double cluster_tol = 1e-6, double rank_tol = 1e-8);

// Block-size table after one deflation step that removes the eigenvector
// heading chain l (1-based, counting in non-increasing size order) of
// eigenvalue t (1-based row of the table): the last member of the run of
// sizes equal to that chain's shrinks by one, empty entries vanish.
std::vector<std::vector<std::size_t>> predict_deflation(
    const std::vector<std::vector<std::size_t>>& blocks, std::size_t eigenvalue_index,
    std::size_t chain_index);

// One Jordan chain inside a basis matrix: columns
// [first_column, first_column + length) hold f_0 .. f_{length-1} with
// (A - eigenvalue I) f_0 = 0 and (A - eigenvalue I) f_i = f_{i-1}.
struct ChainSpan {
  cplx eigenvalue;
  std::size_t length;
  std::size_t first_column;
};

// Invertible matrix whose columns split into Jordan chains of A.
class JordanBasis {
public:
  // Validates the chain layout, the chain relations against a, and
  // invertibility; throws InvalidInputError on any violation.
  static JordanBasis create(const ComplexMatrix& a, ComplexMatrix columns,
                            std::vector<ChainSpan> chains);

  const ComplexMatrix& matrix() const noexcept { return matrix_; }
  const std::vector<ChainSpan>& chains() const noexcept { return chains_; }

private:
  JordanBasis() = default;
  ComplexMatrix matrix_;
  std::vector<ChainSpan> chains_;
};

// Rebuilds the basis so that the unit eigenvector x heads one of its chains:
// x is expanded in the basis, the last chain of x's eigenvalue (in
// non-increasing length order) carrying a non-negligible head coefficient is
// replaced by the chain generated from x, and the result is re-validated.
JordanBasis jordan_basis_including(const ComplexMatrix& a, const JordanBasis& basis,
                                   const std::vector<cplx>& x);

}  // namespace schurlab
