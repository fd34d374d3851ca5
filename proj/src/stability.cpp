#include "schurlab/stability.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "schurlab/eigen.hpp"
#include "schurlab/errors.hpp"
#include "schurlab/gaps.hpp"
#include "schurlab/hessenberg.hpp"
#include "schurlab/lu.hpp"
#include "schurlab/rng.hpp"
#include "schurlab/svd.hpp"

namespace schurlab {

namespace {

// Bipartite feasibility for the bottleneck assignment: can rows
// [first_free, n) be matched to unused columns using edges of cost <= thr?
// Kuhn's augmenting paths; n stays small, so no scaling tricks.
class BottleneckMatcher {
public:
  BottleneckMatcher(const std::vector<std::vector<double>>& cost) : cost_(cost), n_(cost.size()) {}

  bool feasible(double thr, const std::vector<bool>& col_taken, std::size_t first_free) {
    col_owner_.assign(n_, n_);
    for (std::size_t j = first_free; j < n_; ++j) {
      visited_.assign(n_, false);
      if (!augment(j, thr, col_taken)) return false;
    }
    return true;
  }

private:
  bool augment(std::size_t row, double thr, const std::vector<bool>& col_taken) {
    for (std::size_t i = 0; i < n_; ++i) {
      if (col_taken[i] || visited_[i] || cost_[row][i] > thr) continue;
      visited_[i] = true;
      if (col_owner_[i] == n_ || augment(col_owner_[i], thr, col_taken)) {
        col_owner_[i] = row;
        return true;
      }
    }
    return false;
  }

  const std::vector<std::vector<double>>& cost_;
  std::size_t n_;
  std::vector<std::size_t> col_owner_;
  std::vector<bool> visited_;
};

ComplexMatrix embed_factor(std::size_t n, std::size_t offset, const ComplexMatrix& h) {
  ComplexMatrix e = ComplexMatrix::identity(n);
  e.set_block(offset, offset, h);
  return e;
}

// t(row, col0..) <- t(row, col0..) * h, the tail-segment rotation every new
// deflation factor applies to rows finished before it.
void rotate_row_tail(ComplexMatrix& t, std::size_t row, std::size_t col0, const ComplexMatrix& h) {
  const std::size_t m = h.rows();
  std::vector<cplx> seg(m);
  for (std::size_t j = 0; j < m; ++j) seg[j] = t(row, col0 + j);
  for (std::size_t j = 0; j < m; ++j) {
    cplx sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) sum += seg[i] * h(i, j);
    t(row, col0 + j) = sum;
  }
}

}  // namespace

std::vector<std::size_t> match_eigenvalues(const std::vector<cplx>& spec0,
                                           const std::vector<cplx>& spec) {
  if (spec0.size() != spec.size())
    throw InvalidInputError("match_eigenvalues: spectra must have equal length");
  const std::size_t n = spec0.size();
  if (n == 0) return {};

  std::vector<std::vector<double>> cost(n, std::vector<double>(n));
  std::vector<double> candidates;
  candidates.reserve(n * n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      cost[j][i] = std::abs(spec[i] - spec0[j]);
      candidates.push_back(cost[j][i]);
    }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  BottleneckMatcher matcher(cost);
  const std::vector<bool> none(n, false);
  std::size_t lo = 0, hi = candidates.size() - 1;
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (matcher.feasible(candidates[mid], none, 0))
      hi = mid;
    else
      lo = mid + 1;
  }
  const double bottleneck = candidates[lo];

  // Fix assignments left to right, always taking the smallest column index
  // that still leaves the rest of the rows matchable at the bottleneck value.
  std::vector<std::size_t> perm(n);
  std::vector<bool> taken(n, false);
  for (std::size_t j = 0; j < n; ++j) {
    bool placed = false;
    for (std::size_t i = 0; i < n && !placed; ++i) {
      if (taken[i] || cost[j][i] > bottleneck) continue;
      taken[i] = true;
      if (matcher.feasible(bottleneck, taken, j + 1)) {
        perm[j] = i;
        placed = true;
      } else {
        taken[i] = false;
      }
    }
    if (!placed) throw NumericFailureError("match_eigenvalues: assignment search lost feasibility");
  }
  return perm;
}

HolderRatioResult holder_ratio(const ComplexMatrix& a0, const ComplexMatrix& a,
                               double cluster_tol) {
  a0.require_square("holder_ratio reference");
  a0.require_finite("holder_ratio reference");
  a.require_finite("holder_ratio perturbed");
  if (!a0.same_shape(a)) throw InvalidInputError("holder_ratio: matrices must share a shape");
  if (!(cluster_tol > 0.0)) throw InvalidInputError("holder_ratio: cluster_tol must be positive");
  const std::size_t n = a0.rows();

  HolderRatioResult out;
  out.norm_diff = operator_norm(a - a0);
  if (out.norm_diff == 0.0)
    throw InvalidInputError("holder_ratio: matrices are identical, no movement to measure");

  const std::vector<cplx> vals0 = eigenvalues(a0);
  const std::vector<cplx> vals = eigenvalues(a);
  const std::vector<std::size_t> perm = match_eigenvalues(vals0, vals);
  for (std::size_t j = 0; j < n; ++j)
    out.matched_dist = std::max(out.matched_dist, std::abs(vals[perm[j]] - vals0[j]));

  out.ratio_1n = out.matched_dist / std::pow(out.norm_diff, 1.0 / static_cast<double>(n));
  out.lipschitz_applicable =
      cluster_values(vals0, cluster_tol).size() == cluster_values(vals, cluster_tol).size();
  if (out.lipschitz_applicable) out.ratio_1 = out.matched_dist / out.norm_diff;
  return out;
}

std::pair<ComplexMatrix, ComplexMatrix> backward_reconstruct(const ComplexMatrix& a0,
                                                             const SchurForm& s,
                                                             double rank_tol) {
  a0.require_square("backward_reconstruct reference");
  a0.require_finite("backward_reconstruct reference");
  const std::size_t n = a0.rows();
  if (s.u.rows() != n || s.u.cols() != n || !s.t.same_shape(s.u))
    throw InvalidInputError("backward_reconstruct: Schur form dimension mismatch");
  if (s.chain.factors.size() + 1 != n && n > 0)
    throw InvalidInputError("backward_reconstruct: deflation chain is incomplete");
  if (!(rank_tol > 0.0)) throw InvalidInputError("backward_reconstruct: rank_tol must be positive");

  const double scale0 = std::max(1.0, operator_norm(a0));
  ComplexMatrix u0 = ComplexMatrix::identity(n);
  ComplexMatrix t0(n, n);
  ComplexMatrix work = a0;

  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t m = n - k;
    if (m == 1) {
      t0(k, k) = work(0, 0);
      break;
    }

    // Pair the recorded diagonal entry with an eigenvalue cluster of the
    // current block; the cluster mean cancels the splitting a defective
    // eigenvalue suffers in floating point.
    const cplx mu = s.t(k, k);
    const std::vector<cplx> vals = eigenvalues(work);
    const double radius = defective_cluster_radius(m, operator_norm(work), 1e-8);
    const std::vector<std::vector<std::size_t>> clusters = cluster_values(vals, radius);
    cplx lambda = 0.0;
    double best = -1.0;
    for (const auto& members : clusters) {
      cplx mean = 0.0;
      for (std::size_t idx : members) mean += vals[idx];
      mean /= static_cast<double>(members.size());
      const double d = std::abs(mean - mu);
      if (best < 0.0 || d < best) {
        best = d;
        lambda = mean;
      }
    }

    ComplexMatrix shifted = work;
    for (std::size_t i = 0; i < m; ++i) shifted(i, i) -= lambda;
    const Subspace ker = kernel(shifted, rank_tol);
    if (ker.dim() == 0)
      throw PairingFailureError("backward_reconstruct: paired eigenvalue has an empty kernel");

    const std::vector<cplx> v1 = s.chain.factors[k].block(k, k, m, m).column(0);
    const std::vector<cplx> coeff = ker.basis().adjoint() * v1;
    std::vector<cplx> proj = ker.basis() * coeff;
    const double pn = vec_norm(proj);
    if (pn < 1e-6)
      throw PairingFailureError("backward_reconstruct: deflation vector lost its kernel component");
    vec_scale(proj, cplx(1.0 / pn));

    ComplexMatrix h = hessenberg_from_first_column(proj);
    // Only the first column of the factor is pinned (it must sit exactly in
    // the kernel); the columns to its right are free up to a unitary mix among
    // themselves, and the canonical completion picks up an arbitrary phase
    // whenever a component of the recorded column vanishes.  Align the
    // completion with the recorded factor instead: project its trailing
    // columns onto the orthocomplement of the columns accepted so far and
    // re-orthonormalize.  If a projection collapses (the recorded column fell
    // almost entirely inside the accepted span), a canonical completion
    // column takes its place; at least one always survives because the
    // canonical columns span the whole orthocomplement of the first.
    {
      const ComplexMatrix rec = s.chain.factors[k].block(k, k, m, m);
      const ComplexMatrix canon = h;
      std::vector<std::vector<cplx>> basis{proj};
      for (std::size_t j = 1; j < m; ++j) {
        std::vector<cplx> w;
        double wn = 0.0;
        for (std::size_t cand = 0; cand < m && wn < 1e-3; ++cand) {
          w = cand == 0 ? rec.column(j) : canon.column(cand);
          for (int pass = 0; pass < 2; ++pass)
            for (const auto& b : basis) vec_axpy(w, vec_dot(b, w), b);
          wn = vec_norm(w);
        }
        vec_scale(w, cplx(1.0 / wn));
        for (std::size_t i = 0; i < m; ++i) h(i, j) = w[i];
        basis.push_back(std::move(w));
      }
    }
    const ComplexMatrix conj = h.adjoint() * work * h;
    for (std::size_t r = 0; r < k; ++r) rotate_row_tail(t0, r, k, h);
    for (std::size_t j = 0; j < m; ++j) t0(k, k + j) = conj(0, j);
    u0 = u0 * embed_factor(n, k, h);
    work = conj.block(1, 1, m - 1, m - 1);
  }

  const double res = operator_norm(u0 * t0 * u0.adjoint() - a0);
  if (res > 1e-8 * scale0)
    throw NumericFailureError("backward_reconstruct: rebuilt factorization misses the reference",
                              res);
  return {std::move(u0), std::move(t0)};
}

double pairing_safety_threshold(const ComplexMatrix& a0) {
  a0.require_square("pairing_safety_threshold");
  a0.require_finite("pairing_safety_threshold");
  const std::size_t n = a0.rows();
  const std::vector<cplx> vals = eigenvalues(a0);
  const double radius = defective_cluster_radius(n, operator_norm(a0), 1e-6);
  const std::vector<std::vector<std::size_t>> clusters = cluster_values(vals, radius);
  if (clusters.size() <= 1) return 0.5;

  std::vector<cplx> means;
  for (const auto& members : clusters) {
    cplx mean = 0.0;
    for (std::size_t idx : members) mean += vals[idx];
    means.push_back(mean / static_cast<double>(members.size()));
  }
  double g = std::abs(means[1] - means[0]);
  for (std::size_t i = 0; i < means.size(); ++i)
    for (std::size_t j = i + 1; j < means.size(); ++j)
      g = std::min(g, std::abs(means[i] - means[j]));
  return std::min(0.5, std::pow(g / 2.0, static_cast<double>(n)));
}

ExperimentReport measure_backward(const ComplexMatrix& a0, const std::vector<double>& eps_decades,
                                  std::size_t trials_per_decade, std::uint64_t seed,
                                  const std::string& matrix_id) {
  a0.require_square("measure_backward reference");
  a0.require_finite("measure_backward reference");
  if (eps_decades.empty()) throw InvalidInputError("measure_backward: no epsilon decades given");
  for (std::size_t i = 0; i < eps_decades.size(); ++i) {
    if (!(eps_decades[i] > 0.0))
      throw InvalidInputError("measure_backward: epsilon decades must be positive");
    if (i > 0 && eps_decades[i] >= eps_decades[i - 1])
      throw InvalidInputError("measure_backward: epsilon decades must decrease strictly");
  }

  ExperimentReport report;
  report.matrix_id = matrix_id;
  report.seed = seed;
  report.rank_tol = 1e-8;
  report.safety_threshold = pairing_safety_threshold(a0);
  if (eps_decades.front() >= report.safety_threshold)
    throw InvalidInputError(
        "measure_backward: largest epsilon reaches the eigenvalue pairing safety threshold");

  const std::size_t n = a0.rows();
  const std::vector<cplx> target = eigenvalues(a0);

  for (std::size_t d = 0; d < eps_decades.size(); ++d) {
    const double eps = eps_decades[d];
    DecadeSummary summary;
    summary.epsilon = eps;
    summary.trials = trials_per_decade;
    for (std::size_t i = 0; i < trials_per_decade; ++i) {
      const std::uint64_t trial_seed = Rng::mix(seed, d, i);
      Rng rng(trial_seed);
      const ComplexMatrix g = ginibre(n, rng);
      const double gn = operator_norm(g);
      if (gn == 0.0) {
        ++summary.failures;
        continue;
      }
      const ComplexMatrix a = a0 + cplx(eps / gn) * g;

      BackwardRecord rec;
      rec.trial.epsilon = eps;
      rec.trial.seed = trial_seed;
      rec.trial.a = a;
      rec.trial.norm_diff = operator_norm(a - a0);
      try {
        SchurForm s = schur_decompose(a, OrderingPolicy::MatchTarget, target);
        auto replay = backward_reconstruct(a0, s, report.rank_tol);
        rec.u = std::move(s.u);
        rec.t = std::move(s.t);
        rec.u0 = std::move(replay.first);
        rec.t0 = std::move(replay.second);
      } catch (const PairingFailureError&) {
        ++summary.failures;
        continue;
      } catch (const NumericFailureError&) {
        ++summary.failures;
        continue;
      }
      rec.u_dist = operator_norm(rec.u - rec.u0);
      rec.t_dist = operator_norm(rec.t - rec.t0);
      rec.holder_ratio = (rec.u_dist + rec.t_dist) /
                         std::pow(rec.trial.norm_diff, 1.0 / static_cast<double>(n));
      summary.max_ratio = std::max(summary.max_ratio, rec.holder_ratio);
      report.records.push_back(std::move(rec));
    }
    report.decades.push_back(summary);
  }
  return report;
}

ComplexMatrix forward_demo_perturb(const ComplexMatrix& p0, const ComplexMatrix& j0,
                                   std::size_t j_index, double epsilon) {
  p0.require_square("forward_demo_perturb transform");
  p0.require_finite("forward_demo_perturb transform");
  j0.require_square("forward_demo_perturb canonical form");
  j0.require_finite("forward_demo_perturb canonical form");
  if (!p0.same_shape(j0))
    throw InvalidInputError("forward_demo_perturb: matrices must share a dimension");
  if (!(epsilon >= 0.0)) throw InvalidInputError("forward_demo_perturb: epsilon must be >= 0");
  const std::size_t n = j0.rows();

  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const cplx e = j0(i, j);
      if (j == i + 1) {
        if (std::abs(e) > 1e-12 && std::abs(e - cplx(1.0)) > 1e-12)
          throw InvalidInputError("forward_demo_perturb: superdiagonal entries must be 0 or 1");
      } else if (std::abs(e) > 1e-12) {
        throw InvalidInputError("forward_demo_perturb: input is not in canonical block form");
      }
    }
  if (j_index < 1 || j_index >= n)
    throw InvalidInputError("forward_demo_perturb: bridge position out of range");
  if (std::abs(j0(j_index - 1, j_index)) > 1e-12)
    throw InvalidInputError("forward_demo_perturb: bridge position must sit between two blocks");
  if (std::abs(j0(j_index - 1, j_index - 1) - j0(j_index, j_index)) > 1e-12)
    throw InvalidInputError("forward_demo_perturb: bridged blocks must share their eigenvalue");

  const ComplexMatrix pinv = invert(p0);
  const double conditioning = operator_norm(p0) * operator_norm(pinv);
  ComplexMatrix jpert = j0;
  jpert(j_index - 1, j_index) += epsilon / conditioning;
  const ComplexMatrix a = p0 * jpert * pinv;

  if (epsilon > 0.0) {
    // The bridged eigenvector must actually have been disturbed, otherwise
    // the demonstration shows nothing.
    std::vector<cplx> u1 = p0.column(j_index);
    vec_scale(u1, cplx(1.0 / vec_norm(u1)));
    std::vector<cplx> r = a * u1;
    vec_axpy(r, j0(j_index, j_index), u1);
    if (!(vec_norm(r) > 0.0))
      throw NumericFailureError("forward_demo_perturb: perturbation underflowed to nothing");
  }
  return a;
}

double forward_gap_lower_bound(const ComplexMatrix& a0, const ComplexMatrix& u0,
                               const ComplexMatrix& t0, const ComplexMatrix& a,
                               std::size_t phase_samples, bool* uncertain) {
  (void)phase_samples;  // the phase minimum has a closed form, kept for the interface
  a0.require_square("forward_gap_lower_bound reference");
  a0.require_finite("forward_gap_lower_bound reference");
  a.require_finite("forward_gap_lower_bound perturbed");
  if (!a0.same_shape(a) || !a0.same_shape(u0) || !a0.same_shape(t0))
    throw InvalidInputError("forward_gap_lower_bound: all matrices must share a dimension");
  const std::size_t n = a0.rows();
  const double scale0 = std::max(1.0, operator_norm(a0));
  if (operator_norm(u0.adjoint() * u0 - ComplexMatrix::identity(n)) > 1e-8)
    throw InvalidInputError("forward_gap_lower_bound: u0 is not unitary");
  double below = 0.0;
  for (std::size_t i = 1; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) below = std::max(below, std::abs(t0(i, j)));
  if (below > 1e-8)
    throw InvalidInputError("forward_gap_lower_bound: t0 is not upper triangular");
  if (operator_norm(u0 * t0 * u0.adjoint() - a0) > 1e-8 * scale0)
    throw InvalidInputError("forward_gap_lower_bound: (u0, t0) do not factor the reference");

  const std::vector<EigenPair> pairs = eigenpairs(a);
  const std::vector<cplx> lead = u0.column(0);

  if (uncertain) {
    *uncertain = false;
    // Repeated directions mean some eigenvalue was defective and the vector
    // list is not a full candidate set; the bound is then advisory only.
    for (std::size_t i = 0; i < pairs.size() && !*uncertain; ++i)
      for (std::size_t j = i + 1; j < pairs.size(); ++j)
        if (std::abs(vec_dot(pairs[i].vector, pairs[j].vector)) > 1.0 - 1e-6) {
          *uncertain = true;
          break;
        }
  }

  double best = 2.0;  // any unit pair is at distance <= sqrt(2) after phasing
  for (const EigenPair& p : pairs) {
    const double overlap = std::abs(vec_dot(lead, p.vector));
    best = std::min(best, std::sqrt(std::max(0.0, 2.0 - 2.0 * overlap)));
  }
  return std::max(0.0, best - 1e-8);
}

SchurForm schur_with_leading_vector(const ComplexMatrix& a, const std::vector<cplx>& x) {
  a.require_square("schur_with_leading_vector");
  a.require_finite("schur_with_leading_vector");
  const std::size_t n = a.rows();
  if (x.size() != n)
    throw InvalidInputError("schur_with_leading_vector: vector length mismatch");
  if (std::abs(vec_norm(x) - 1.0) > 1e-8)
    throw InvalidInputError("schur_with_leading_vector: x must be a unit vector");
  const double scale = std::max(1.0, operator_norm(a));
  std::vector<cplx> r = a * x;
  const cplx lambda = vec_dot(x, r);
  vec_axpy(r, lambda, x);
  if (vec_norm(r) > 1e-8 * scale)
    throw InvalidInputError("schur_with_leading_vector: x is not an eigenvector of a");

  SchurForm s;
  s.chain.dim = n;
  if (n == 1) {
    s.u = ComplexMatrix(1, 1);
    s.u(0, 0) = x[0];
    s.t = ComplexMatrix(1, 1);
    s.t(0, 0) = std::conj(x[0]) * a(0, 0) * x[0];
    s.residual = operator_norm(s.u * s.t * s.u.adjoint() - a);
    return s;
  }

  const ComplexMatrix h = hessenberg_from_first_column(x);
  const ComplexMatrix conj0 = h.adjoint() * a * h;
  const SchurForm sub = schur_decompose(conj0.block(1, 1, n - 1, n - 1));

  s.u = h * embed_factor(n, 1, sub.u);
  s.t = ComplexMatrix(n, n);
  s.t(0, 0) = conj0(0, 0);
  for (std::size_t j = 1; j < n; ++j) s.t(0, j) = conj0(0, j);
  rotate_row_tail(s.t, 0, 1, sub.u);
  s.t.set_block(1, 1, sub.t);
  s.chain.factors.push_back(h);
  for (const ComplexMatrix& f : sub.chain.factors)
    s.chain.factors.push_back(embed_factor(n, 1, f));
  s.residual = operator_norm(s.u * s.t * s.u.adjoint() - a);
  return s;
}

}  // namespace schurlab
