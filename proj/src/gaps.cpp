#include "schurlab/gaps.hpp"

#include <algorithm>
#include <cmath>

#include "schurlab/errors.hpp"
#include "schurlab/svd.hpp"

namespace schurlab {

namespace {

void check_ambient(std::size_t ambient) {
  if (ambient == 0 || ambient > 64)
    throw InvalidInputError("Subspace: ambient dimension must be between 1 and 64");
}

void check_same_ambient(const Subspace& m, const Subspace& n) {
  if (m.ambient() != n.ambient())
    throw InvalidInputError("subspace comparison: ambient dimensions differ");
}

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

// Shared by kernel/image: singular values plus the rank decision and its
// sensitivity flag, mirroring rank_with_tol_flagged.
struct RankCut {
  std::size_t rank = 0;
  bool ambiguous = false;
};

RankCut rank_cut(const std::vector<double>& sigma, double rank_tol) {
  const double smax = sigma.empty() ? 0.0 : sigma.front();
  const double cut = rank_tol * std::max(1.0, smax);
  RankCut r;
  for (double x : sigma) {
    if (x > cut) ++r.rank;
    if (cut > 0.0 && x > cut / 10.0 && x < cut * 10.0) r.ambiguous = true;
  }
  return r;
}

}  // namespace

Subspace Subspace::from_orthonormal(std::size_t ambient, ComplexMatrix basis) {
  check_ambient(ambient);
  if (basis.rows() != ambient)
    throw InvalidInputError("Subspace: basis rows must equal the ambient dimension");
  if (basis.cols() > ambient)
    throw InvalidInputError("Subspace: more basis vectors than the ambient dimension");
  basis.require_finite("Subspace basis");
  if (basis.cols() > 0) {
    const ComplexMatrix gram = basis.adjoint() * basis;
    if (max_abs_diff(gram, ComplexMatrix::identity(basis.cols())) > 1e-10)
      throw InvalidInputError("Subspace: basis columns are not orthonormal");
  }
  Subspace s;
  s.ambient_ = ambient;
  s.basis_ = std::move(basis);
  return s;
}

Subspace Subspace::span(std::size_t ambient, const std::vector<std::vector<cplx>>& vectors) {
  check_ambient(ambient);
  std::vector<std::vector<cplx>> kept;
  for (const auto& v : vectors) {
    if (v.size() != ambient)
      throw InvalidInputError("Subspace::span: vector length must equal the ambient dimension");
    std::vector<cplx> w = v;
    // Two Gram-Schmidt passes keep the basis orthonormal to working precision
    // even when the input vectors are nearly dependent.
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : kept) vec_axpy(w, vec_dot(q, w), q);
    const double rem = vec_norm(w);
    if (rem <= 1e-10 * std::max(1.0, vec_norm(v))) continue;  // dependent, drop
    vec_scale(w, cplx(1.0 / rem));
    kept.push_back(std::move(w));
    if (kept.size() == ambient) break;
  }
  ComplexMatrix basis(ambient, kept.size());
  for (std::size_t j = 0; j < kept.size(); ++j) basis.set_column(j, kept[j]);
  return from_orthonormal(ambient, std::move(basis));
}

Subspace Subspace::zero(std::size_t ambient) {
  check_ambient(ambient);
  Subspace s;
  s.ambient_ = ambient;
  s.basis_ = ComplexMatrix(ambient, 0);
  return s;
}

ComplexMatrix projector(const Subspace& s) { return s.basis() * s.basis().adjoint(); }

double gap(const Subspace& m, const Subspace& n) {
  check_same_ambient(m, n);
  if (m.dim() != n.dim()) return 1.0;
  if (m.dim() == 0) return 0.0;
  return clamp01(operator_norm(projector(m) - projector(n)));
}

double semigap(const Subspace& m, const Subspace& n) {
  check_same_ambient(m, n);
  if (m.dim() == 0) return 0.0;
  if (m.dim() > n.dim()) return 1.0;
  ComplexMatrix rest = m.basis();
  if (n.dim() > 0) rest -= n.basis() * (n.basis().adjoint() * m.basis());
  return clamp01(operator_norm(rest));
}

Subspace orthocomplement(const Subspace& s) {
  std::vector<std::vector<cplx>> cols;
  for (std::size_t j = 0; j < s.dim(); ++j) cols.push_back(s.basis().column(j));
  const ComplexMatrix full = orthonormal_extend(cols, s.ambient());
  ComplexMatrix rest(s.ambient(), s.ambient() - s.dim());
  for (std::size_t j = s.dim(); j < s.ambient(); ++j)
    rest.set_column(j - s.dim(), full.column(j));
  return Subspace::from_orthonormal(s.ambient(), std::move(rest));
}

Subspace kernel_flagged(const ComplexMatrix& a, double rank_tol, bool* uncertain) {
  a.require_finite("kernel input");
  if (a.rows() == 0 || a.cols() == 0) throw InvalidInputError("kernel: empty matrix");
  if (!(rank_tol > 0.0)) throw InvalidInputError("kernel: rank_tol must be positive");
  const SvdResult r = svd(a);
  const RankCut cut = rank_cut(r.singular_values, rank_tol);
  if (uncertain) *uncertain = cut.ambiguous;
  ComplexMatrix basis(a.cols(), a.cols() - cut.rank);
  for (std::size_t j = cut.rank; j < a.cols(); ++j)
    basis.set_column(j - cut.rank, r.right.column(j));
  return Subspace::from_orthonormal(a.cols(), std::move(basis));
}

Subspace image_flagged(const ComplexMatrix& a, double rank_tol, bool* uncertain) {
  a.require_finite("image input");
  if (a.rows() == 0 || a.cols() == 0) throw InvalidInputError("image: empty matrix");
  if (!(rank_tol > 0.0)) throw InvalidInputError("image: rank_tol must be positive");
  const SvdResult r = svd(a);
  const RankCut cut = rank_cut(r.singular_values, rank_tol);
  if (uncertain) *uncertain = cut.ambiguous;
  ComplexMatrix basis(a.rows(), cut.rank);
  for (std::size_t j = 0; j < cut.rank; ++j) basis.set_column(j, r.left.column(j));
  return Subspace::from_orthonormal(a.rows(), std::move(basis));
}

Subspace kernel(const ComplexMatrix& a, double rank_tol) {
  return kernel_flagged(a, rank_tol, nullptr);
}

Subspace image(const ComplexMatrix& a, double rank_tol) {
  return image_flagged(a, rank_tol, nullptr);
}

KernelSemigapResult kernel_semigap_ratio(const ComplexMatrix& a0, const ComplexMatrix& a,
                                         double rank_tol) {
  if (!a0.same_shape(a))
    throw InvalidInputError("kernel_semigap_ratio: matrices must share a shape");
  a0.require_finite("kernel_semigap_ratio reference");
  a.require_finite("kernel_semigap_ratio perturbed");

  KernelSemigapResult out;
  out.norm_diff = operator_norm(a - a0);
  bool flag0 = false, flag1 = false;
  const Subspace ker0 = kernel_flagged(a0, rank_tol, &flag0);
  const Subspace ker1 = kernel_flagged(a, rank_tol, &flag1);
  out.uncertain = flag0 || flag1;
  if (ker1.dim() == 0) return out;  // nothing to tilt, ratio stays 0
  out.semigap = semigap(ker1, ker0);
  if (out.norm_diff > 0.0) out.ratio = out.semigap / out.norm_diff;
  return out;
}

}  // namespace schurlab
