#include "schurlab/schur_decomp.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "schurlab/eigen.hpp"
#include "schurlab/errors.hpp"
#include "schurlab/svd.hpp"

namespace schurlab {

namespace {

// Index of the eigenpair the policy wants deflated next.  pairs is sorted
// descending by modulus already, so DescendingModulus takes the front.
std::size_t pick_pair(const std::vector<EigenPair>& pairs, OrderingPolicy policy,
                      const std::vector<cplx>& target, std::size_t step, cplx corner) {
  if (policy == OrderingPolicy::DescendingModulus) return 0;
  const cplx want = policy == OrderingPolicy::FirstDiagonal ? corner : target[step];
  std::size_t best = 0;
  double best_d = std::abs(pairs[0].value - want);
  for (std::size_t i = 1; i < pairs.size(); ++i) {
    const double d = std::abs(pairs[i].value - want);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

bool subcolumn_exactly_zero(const ComplexMatrix& m) {
  for (std::size_t i = 1; i < m.rows(); ++i)
    if (m(i, 0) != cplx(0.0, 0.0)) return false;
  return true;
}

}  // namespace

SchurForm schur_decompose(const ComplexMatrix& a, OrderingPolicy policy,
                          const std::vector<cplx>& target) {
  a.require_square("schur_decompose");
  a.require_finite("schur_decompose");
  const std::size_t n = a.rows();
  if (policy == OrderingPolicy::MatchTarget && target.size() != n)
    throw InvalidInputError("schur_decompose: target length must equal the dimension");

  SchurForm s;
  s.u = ComplexMatrix::identity(n);
  s.t = ComplexMatrix(n, n);
  s.chain.dim = n;

  ComplexMatrix work = a;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t m = n - k;
    if (m == 1) {
      s.t(k, k) = work(0, 0);
      break;
    }

    std::vector<cplx> v;
    if (subcolumn_exactly_zero(work) &&
        (policy != OrderingPolicy::MatchTarget || std::abs(target[k] - work(0, 0)) < 1e-8)) {
      // e_1 is an exact eigenvector and the policy is content with the
      // corner eigenvalue; deflating by the identity keeps triangular
      // inputs (and already-eliminated columns) bit-exact.
      v.assign(m, cplx(0.0, 0.0));
      v[0] = 1.0;
      if (policy == OrderingPolicy::DescendingModulus) {
        // The corner must also carry the largest remaining modulus, or the
        // requested ordering would be silently ignored.
        const std::vector<cplx> vals = eigenvalues(work);
        if (std::abs(vals[0]) > std::abs(work(0, 0)) + 1e-12) v.clear();
      }
    }
    if (v.empty()) {
      std::vector<EigenPair> pairs = eigenpairs(work);
      const std::size_t pick = pick_pair(pairs, policy, target, k, work(0, 0));
      v = std::move(pairs[pick].vector);
    }

    ComplexMatrix h = hessenberg_from_first_column(v);
    ComplexMatrix conj = h.adjoint() * work * h;

    // The factor rotates the trailing basis, so the tail segments of the rows
    // finished earlier have to follow it.
    for (std::size_t r = 0; r < k; ++r) {
      std::vector<cplx> seg(m);
      for (std::size_t j = 0; j < m; ++j) seg[j] = s.t(r, k + j);
      for (std::size_t j = 0; j < m; ++j) {
        cplx sum = 0.0;
        for (std::size_t i = 0; i < m; ++i) sum += seg[i] * h(i, j);
        s.t(r, k + j) = sum;
      }
    }
    for (std::size_t j = 0; j < m; ++j) s.t(k, k + j) = conj(0, j);

    ComplexMatrix embedded = ComplexMatrix::identity(n);
    embedded.set_block(k, k, h);
    s.u = s.u * embedded;
    s.chain.factors.push_back(std::move(embedded));

    work = conj.block(1, 1, m - 1, m - 1);
  }

  s.residual = operator_norm(s.u * s.t * s.u.adjoint() - a);
  return s;
}

double verify_schur(const ComplexMatrix& a, const SchurForm& s) {
  if (!a.is_square() || s.u.rows() != a.rows() || !s.u.is_square() || !s.t.same_shape(a))
    throw InvalidInputError("verify_schur: shape mismatch");
  const std::size_t n = a.rows();
  const double recon = operator_norm(s.u * s.t * s.u.adjoint() - a);
  const double unit = operator_norm(s.u.adjoint() * s.u - ComplexMatrix::identity(n));
  double below = 0.0;
  for (std::size_t i = 1; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) below = std::max(below, std::abs(s.t(i, j)));
  return std::max(recon, std::max(unit, below));
}

}  // namespace schurlab
