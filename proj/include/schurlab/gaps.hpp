#pragma once

#include <cstddef>
#include <vector>

#include "schurlab/complex_matrix.hpp"

namespace schurlab {

// Subspace of C^ambient held as an orthonormal column basis.  The trivial
// subspace is a matrix with zero columns.
class Subspace {
public:
  // basis columns must already be orthonormal (checked to 1e-10).
  static Subspace from_orthonormal(std::size_t ambient, ComplexMatrix basis);
  // Orthonormalizes arbitrary spanning vectors, dropping dependent ones.
  static Subspace span(std::size_t ambient, const std::vector<std::vector<cplx>>& vectors);
  static Subspace zero(std::size_t ambient);

  std::size_t ambient() const noexcept { return ambient_; }
  std::size_t dim() const noexcept { return basis_.cols(); }
  const ComplexMatrix& basis() const noexcept { return basis_; }

private:
  std::size_t ambient_ = 0;
  ComplexMatrix basis_;
};

// Orthogonal projector onto the subspace, ambient x ambient.
ComplexMatrix projector(const Subspace& s);

// Operator-norm distance of the two projectors, clamped to [0, 1]; exactly 1
// when the dimensions differ.
double gap(const Subspace& m, const Subspace& n);

// Largest distance from a unit vector of m to n, i.e. the operator norm of
// (I - P_n) restricted to m.  Zero for trivial m, 1 whenever dim m > dim n.
double semigap(const Subspace& m, const Subspace& n);

Subspace orthocomplement(const Subspace& s);

// Kernel and image of a matrix at a relative rank tolerance.  The flagged
// variants report when a singular value sat within a factor of 10 of the
// rank threshold, making the dimension suspect.
Subspace kernel(const ComplexMatrix& a, double rank_tol);
Subspace image(const ComplexMatrix& a, double rank_tol);
Subspace kernel_flagged(const ComplexMatrix& a, double rank_tol, bool* uncertain);
Subspace image_flagged(const ComplexMatrix& a, double rank_tol, bool* uncertain);

// How far the kernel of a tilts when the matrix moves from a0 to a, per unit
// of movement.  ratio is 0 when a = a0 or the kernel of a is trivial.
struct KernelSemigapResult {
  double semigap = 0.0;
  double norm_diff = 0.0;
  double ratio = 0.0;
  bool uncertain = false;
};

KernelSemigapResult kernel_semigap_ratio(const ComplexMatrix& a0, const ComplexMatrix& a,
                                         double rank_tol = 1e-8);

}  // namespace schurlab
