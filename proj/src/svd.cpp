#include "schurlab/svd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "schurlab/errors.hpp"

namespace schurlab {

namespace {

constexpr int kMaxSweeps = 60;
constexpr double kRotationThreshold = 1e-13;  // relative off-diagonal target
constexpr double kCompletionSkip = 1e-6;      // Gram-Schmidt rejection threshold

// Core one-sided Jacobi for rows >= cols.  Columns of w are rotated until
// pairwise orthogonal; v accumulates the same right-side rotations.
SvdResult svd_tall(const ComplexMatrix& m) {
  const std::size_t rows = m.rows(), cols = m.cols();
  ComplexMatrix w = m;
  ComplexMatrix v = ComplexMatrix::identity(cols);

  auto col_dot = [&](const ComplexMatrix& x, std::size_t p, std::size_t q) {
    cplx s(0.0, 0.0);
    for (std::size_t i = 0; i < x.rows(); ++i) s += std::conj(x(i, p)) * x(i, q);
    return s;
  };

  bool converged = false;
  double worst = 0.0;
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    converged = true;
    worst = 0.0;
    for (std::size_t p = 0; p + 1 < cols; ++p) {
      for (std::size_t q = p + 1; q < cols; ++q) {
        const double a = std::real(col_dot(w, p, p));
        const double b = std::real(col_dot(w, q, q));
        if (a == 0.0 || b == 0.0) continue;
        const cplx beta = col_dot(w, p, q);
        const double ab = std::abs(beta);
        const double rel = ab / std::sqrt(a * b);
        worst = std::max(worst, rel);
        if (rel <= kRotationThreshold) continue;
        converged = false;

        // Phase that makes the pair inner product real, then a real Jacobi
        // rotation that zeroes it.
        const cplx phase = beta / ab;
        const double tau = (b - a) / (2.0 * ab);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double cs = 1.0 / std::sqrt(1.0 + t * t);
        const double sn = t * cs;

        for (std::size_t i = 0; i < rows; ++i) {
          const cplx wp = w(i, p), wq = w(i, q);
          w(i, p) = cs * wp - sn * std::conj(phase) * wq;
          w(i, q) = sn * phase * wp + cs * wq;
        }
        for (std::size_t i = 0; i < cols; ++i) {
          const cplx vp = v(i, p), vq = v(i, q);
          v(i, p) = cs * vp - sn * std::conj(phase) * vq;
          v(i, q) = sn * phase * vp + cs * vq;
        }
      }
    }
  }
  if (!converged)
    throw NumericFailureError("svd: Jacobi sweeps did not converge", worst);

  std::vector<double> sigma(cols);
  for (std::size_t j = 0; j < cols; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < rows; ++i) s += std::norm(w(i, j));
    sigma[j] = std::sqrt(s);
  }

  // Sort descending, carrying the columns of w and v along.
  std::vector<std::size_t> order(cols);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });

  SvdResult r;
  r.singular_values.resize(cols);
  r.right = ComplexMatrix(cols, cols);
  ComplexMatrix wsorted(rows, cols);
  for (std::size_t j = 0; j < cols; ++j) {
    r.singular_values[j] = sigma[order[j]];
    for (std::size_t i = 0; i < cols; ++i) r.right(i, j) = v(i, order[j]);
    for (std::size_t i = 0; i < rows; ++i) wsorted(i, j) = w(i, order[j]);
  }

  // Left factor: normalized nonzero columns, completed to a full unitary.
  const double smax = r.singular_values.empty() ? 0.0 : r.singular_values[0];
  const double zero_cut = smax * 1e-15 * static_cast<double>(std::max(rows, cols));
  std::vector<std::vector<cplx>> ucols;
  ucols.reserve(cols);
  for (std::size_t j = 0; j < cols; ++j) {
    if (r.singular_values[j] <= zero_cut) break;  // sorted, rest are zero-tier
    std::vector<cplx> u(rows);
    for (std::size_t i = 0; i < rows; ++i) u[i] = wsorted(i, j) / r.singular_values[j];
    ucols.push_back(std::move(u));
  }
  r.left = orthonormal_extend(ucols, rows);
  return r;
}

}  // namespace

SvdResult svd(const ComplexMatrix& m) {
  if (m.rows() == 0 || m.cols() == 0) throw InvalidInputError("svd: dimension 0 input");
  m.require_finite("svd");
  if (m.rows() >= m.cols()) return svd_tall(m);
  SvdResult t = svd_tall(m.adjoint());
  SvdResult r;
  r.left = std::move(t.right);
  r.right = std::move(t.left);
  r.singular_values = std::move(t.singular_values);
  return r;
}

std::vector<double> singular_values(const ComplexMatrix& m) { return svd(m).singular_values; }

double operator_norm(const ComplexMatrix& m) {
  if (m.rows() == 0 || m.cols() == 0) throw InvalidInputError("operator_norm: dimension 0 input");
  return svd(m).singular_values[0];
}

int rank_with_tol(const ComplexMatrix& m, double tol) {
  return rank_with_tol_flagged(m, tol).rank;
}

RankResult rank_with_tol_flagged(const ComplexMatrix& m, double tol) {
  if (tol < 0.0) throw InvalidInputError("rank_with_tol: negative tolerance");
  const std::vector<double> s = singular_values(m);
  const double smax = s.empty() ? 0.0 : s[0];
  const double cut = tol * std::max(1.0, smax);
  RankResult r{0, false};
  for (double x : s) {
    if (x > cut) ++r.rank;
    if (cut > 0.0 && x > cut / 10.0 && x < cut * 10.0) r.ambiguous = true;
  }
  return r;
}

ComplexMatrix orthonormal_extend(const std::vector<std::vector<cplx>>& vectors, std::size_t dim) {
  if (dim == 0) throw InvalidInputError("orthonormal_extend: dimension 0");
  if (vectors.size() > dim)
    throw InvalidInputError("orthonormal_extend: more vectors than the ambient dimension");
  for (std::size_t a = 0; a < vectors.size(); ++a) {
    if (vectors[a].size() != dim)
      throw InvalidInputError("orthonormal_extend: vector length does not match dimension");
    if (std::abs(vec_norm(vectors[a]) - 1.0) > 1e-10)
      throw InvalidInputError("orthonormal_extend: input vector is not unit length");
    for (std::size_t b = a + 1; b < vectors.size(); ++b)
      if (std::abs(vec_dot(vectors[a], vectors[b])) > 1e-10)
        throw InvalidInputError("orthonormal_extend: input vectors are not orthogonal");
  }

  std::vector<std::vector<cplx>> basis = vectors;
  for (std::size_t c = 0; c < dim && basis.size() < dim; ++c) {
    std::vector<cplx> cand(dim, cplx(0.0, 0.0));
    cand[c] = 1.0;
    // Two MGS passes keep the completion orthogonal to working precision.
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : basis) vec_axpy(cand, vec_dot(b, cand), b);
    const double rn = vec_norm(cand);
    if (rn <= kCompletionSkip) continue;  // nearly dependent candidate
    vec_scale(cand, 1.0 / rn);
    basis.push_back(std::move(cand));
  }
  if (basis.size() < dim)
    throw NumericFailureError("orthonormal_extend: could not complete a basis");

  ComplexMatrix q(dim, dim);
  for (std::size_t j = 0; j < dim; ++j) q.set_column(j, basis[j]);
  return q;
}

}  // namespace schurlab
