#pragma once

#include <vector>

#include "schurlab/complex_matrix.hpp"

namespace schurlab {

// Dense complex LU with partial pivoting.  Exactly (or nearly) zero pivots
// are replaced by a tiny value so that solves against singular matrices
// return huge vectors along the kernel; inverse iteration relies on this.
class LuFactorization {
public:
  explicit LuFactorization(ComplexMatrix a);

  std::vector<cplx> solve(const std::vector<cplx>& b) const;

  // Smallest pivot magnitude seen before any replacement.
  double min_pivot() const noexcept { return min_pivot_; }
  bool pivot_replaced() const noexcept { return pivot_replaced_; }

private:
  ComplexMatrix lu_;
  std::vector<std::size_t> perm_;
  double min_pivot_ = 0.0;
  bool pivot_replaced_ = false;
};

// Matrix inverse by LU solves against the canonical basis.
ComplexMatrix invert(const ComplexMatrix& a);

}  // namespace schurlab
