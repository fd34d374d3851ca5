#include "schurlab/lu.hpp"

#include <cmath>
#include <limits>

#include "schurlab/errors.hpp"

namespace schurlab {

LuFactorization::LuFactorization(ComplexMatrix a) : lu_(std::move(a)) {
  lu_.require_square("lu");
  const std::size_t n = lu_.rows();
  perm_.resize(n);
  for (std::size_t i = 0; i < n; ++i) perm_[i] = i;

  const double scale = lu_.max_abs();
  const double tiny =
      std::max(scale, 1.0) * std::numeric_limits<double>::epsilon() * static_cast<double>(n);
  min_pivot_ = std::numeric_limits<double>::infinity();

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::abs(lu_(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double cand = std::abs(lu_(i, k));
      if (cand > best) {
        best = cand;
        piv = i;
      }
    }
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(piv, j));
      std::swap(perm_[k], perm_[piv]);
    }
    min_pivot_ = std::min(min_pivot_, std::abs(lu_(k, k)));
    if (std::abs(lu_(k, k)) < tiny) {
      lu_(k, k) = tiny;
      pivot_replaced_ = true;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const cplx m = lu_(i, k) / lu_(k, k);
      lu_(i, k) = m;
      for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= m * lu_(k, j);
    }
  }
}

std::vector<cplx> LuFactorization::solve(const std::vector<cplx>& b) const {
  const std::size_t n = lu_.rows();
  if (b.size() != n) throw InvalidInputError("lu solve: dimension mismatch");
  std::vector<cplx> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[perm_[i]];
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) x[i] -= lu_(i, j) * x[j];
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j = i + 1; j < n; ++j) x[i] -= lu_(i, j) * x[j];
    x[i] /= lu_(i, i);
  }
  return x;
}

ComplexMatrix invert(const ComplexMatrix& a) {
  a.require_square("invert");
  const std::size_t n = a.rows();
  LuFactorization lu(a);
  if (lu.pivot_replaced()) throw InvalidInputError("invert: matrix is numerically singular");
  ComplexMatrix inv(n, n);
  std::vector<cplx> e(n, cplx(0.0, 0.0));
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = 1.0;
    inv.set_column(j, lu.solve(e));
    e[j] = 0.0;
  }
  return inv;
}

}  // namespace schurlab
