#include "schurlab/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "schurlab/errors.hpp"
#include "schurlab/lu.hpp"
#include "schurlab/svd.hpp"

namespace schurlab {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

bool modulus_then_lex(const cplx& a, const cplx& b) {
  const double ma = std::abs(a), mb = std::abs(b);
  if (ma != mb) return ma > mb;
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

// In-place Householder reduction to upper Hessenberg form, values only.
void hessenberg_reduce(ComplexMatrix& h) {
  const std::size_t n = h.rows();
  if (n < 3) return;
  for (std::size_t k = 0; k + 2 < n; ++k) {
    double tail = 0.0;
    for (std::size_t i = k + 2; i < n; ++i) tail += std::norm(h(i, k));
    if (tail == 0.0) continue;
    const double xnorm = std::sqrt(tail + std::norm(h(k + 1, k)));

    std::vector<cplx> v(n - k - 1);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = h(k + 1 + i, k);
    const cplx lead = v[0];
    const cplx phase = (lead == cplx(0.0, 0.0)) ? cplx(1.0, 0.0) : lead / std::abs(lead);
    v[0] += phase * xnorm;  // no-cancellation sign choice
    const double vn = vec_norm(v);
    if (vn == 0.0) continue;
    vec_scale(v, 1.0 / vn);

    // Rows k+1..n-1: B <- B - 2 v (v^* B)
    for (std::size_t j = k; j < n; ++j) {
      cplx s(0.0, 0.0);
      for (std::size_t i = 0; i < v.size(); ++i) s += std::conj(v[i]) * h(k + 1 + i, j);
      s *= 2.0;
      for (std::size_t i = 0; i < v.size(); ++i) h(k + 1 + i, j) -= s * v[i];
    }
    // Columns k+1..n-1: B <- B - 2 (B v) v^*
    for (std::size_t i = 0; i < n; ++i) {
      cplx s(0.0, 0.0);
      for (std::size_t j = 0; j < v.size(); ++j) s += h(i, k + 1 + j) * v[j];
      s *= 2.0;
      for (std::size_t j = 0; j < v.size(); ++j) h(i, k + 1 + j) -= s * std::conj(v[j]);
    }
  }
}

// Both roots of the 2x2 block [[a, b], [c, d]], larger-magnitude root first.
// Vieta's step keeps the smaller root accurate under cancellation.
void eig2x2(cplx a, cplx b, cplx c, cplx d, cplx& l1, cplx& l2) {
  const cplx m = 0.5 * (a + d);
  const cplx det = a * d - b * c;
  const cplx disc = std::sqrt(m * m - det);
  const cplx r1 = m + disc, r2 = m - disc;
  l1 = (std::abs(r1) >= std::abs(r2)) ? r1 : r2;
  l2 = (l1 == cplx(0.0, 0.0)) ? m - disc : det / l1;
}

cplx wilkinson_shift(const ComplexMatrix& h, std::size_t hi) {
  cplx l1, l2;
  eig2x2(h(hi - 1, hi - 1), h(hi - 1, hi), h(hi, hi - 1), h(hi, hi), l1, l2);
  const cplx d = h(hi, hi);
  return (std::abs(l1 - d) <= std::abs(l2 - d)) ? l1 : l2;
}

// One shifted QR sweep on the active window [lo, hi] of an upper Hessenberg
// matrix, via a left pass of Givens rotations followed by the right pass.
void qr_step(ComplexMatrix& h, std::size_t lo, std::size_t hi, cplx shift) {
  const std::size_t n = h.cols();
  for (std::size_t i = lo; i <= hi; ++i) h(i, i) -= shift;

  struct Rot {
    cplx a, b;
    double r;
  };
  std::vector<Rot> rots;
  rots.reserve(hi - lo);
  for (std::size_t k = lo; k < hi; ++k) {
    const cplx a = h(k, k), b = h(k + 1, k);
    const double r = std::sqrt(std::norm(a) + std::norm(b));
    rots.push_back({a, b, r});
    if (r == 0.0) continue;
    for (std::size_t j = k; j < n; ++j) {
      const cplx t1 = h(k, j), t2 = h(k + 1, j);
      h(k, j) = (std::conj(a) * t1 + std::conj(b) * t2) / r;
      h(k + 1, j) = (-b * t1 + a * t2) / r;
    }
  }
  for (std::size_t k = lo; k < hi; ++k) {
    const Rot& g = rots[k - lo];
    if (g.r == 0.0) continue;
    const std::size_t top = std::min(k + 2, hi);
    for (std::size_t i = 0; i <= top; ++i) {
      const cplx t1 = h(i, k), t2 = h(i, k + 1);
      h(i, k) = (g.a * t1 + g.b * t2) / g.r;
      h(i, k + 1) = (-std::conj(g.b) * t1 + std::conj(g.a) * t2) / g.r;
    }
  }
  for (std::size_t i = lo; i <= hi; ++i) h(i, i) += shift;
}

std::vector<cplx> qr_eigenvalues(ComplexMatrix h) {
  const std::size_t n = h.rows();
  std::vector<cplx> vals(n);
  if (n == 1) {
    vals[0] = h(0, 0);
    return vals;
  }
  hessenberg_reduce(h);

  // Zeroing a subdiagonal entry below eps times the matrix scale is a
  // backward perturbation no larger than the rounding already committed by
  // every rotation; without that floor a cluster of near-zero diagonal
  // entries (a nilpotent block, say) makes the neighbour-relative test
  // unattainably strict and the sweep spins until the budget runs out.
  const double hscale = h.max_abs();
  auto negligible = [&](std::size_t i) {
    const double bound = kEps * (std::abs(h(i - 1, i - 1)) + std::abs(h(i, i)));
    return std::abs(h(i, i - 1)) <= std::max(bound, kEps * hscale);
  };

  std::size_t hi = n - 1;
  long total_iter = 0;
  const long budget = 40 * static_cast<long>(n);
  int since_deflation = 0;
  while (true) {
    // Clean converged subdiagonals, then find the active window.
    std::size_t lo = hi;
    while (lo > 0 && !negligible(lo)) --lo;
    if (lo > 0) h(lo, lo - 1) = 0.0;

    if (lo == hi) {
      vals[hi] = h(hi, hi);
      if (hi == 0) break;
      --hi;
      since_deflation = 0;
      continue;
    }
    if (lo + 1 == hi) {
      eig2x2(h(lo, lo), h(lo, hi), h(hi, lo), h(hi, hi), vals[lo], vals[hi]);
      if (lo == 0) break;
      hi = lo - 1;
      since_deflation = 0;
      continue;
    }

    if (++total_iter > budget)
      throw NumericFailureError("eigenvalues: QR iteration did not converge",
                                std::abs(h(hi, hi - 1)));
    ++since_deflation;
    cplx shift = wilkinson_shift(h, hi);
    if (since_deflation % 12 == 0) {
      // Exceptional shift to break rare symmetric stalls.
      shift = h(hi, hi) + cplx(1.5 * std::abs(h(hi, hi - 1)), 0.75 * std::abs(h(hi - 1, hi - 2)));
    }
    qr_step(h, lo, hi, shift);
  }
  return vals;
}

}  // namespace

std::vector<cplx> eigenvalues(const ComplexMatrix& a) {
  a.require_square("eigenvalues");
  a.require_finite("eigenvalues");
  std::vector<cplx> vals = qr_eigenvalues(a);
  std::stable_sort(vals.begin(), vals.end(), modulus_then_lex);
  return vals;
}

InverseIterationResult inverse_iteration(const ComplexMatrix& a, cplx mu,
                                         const std::vector<std::vector<cplx>>& deflate_against) {
  const std::size_t n = a.rows();
  ComplexMatrix m = a;
  for (std::size_t i = 0; i < n; ++i) m(i, i) -= mu;
  LuFactorization lu(std::move(m));

  auto deflate = [&](std::vector<cplx>& v) {
    for (const auto& d : deflate_against) vec_axpy(v, vec_dot(d, v), d);
  };
  // Residual against the requested shift and against the iterate's own
  // Rayleigh quotient, sharing the single matrix apply.
  auto measure = [&](const std::vector<cplx>& v, double& res_mu, cplx& rho) {
    std::vector<cplx> av = a * v;
    std::vector<cplx> r = av;
    vec_axpy(r, mu, v);
    res_mu = vec_norm(r);
    rho = vec_dot(v, av);
    vec_axpy(av, rho, v);
    return vec_norm(av);
  };

  // Deterministic start with a mild ramp so symmetric matrices cannot trap
  // the iteration in an invariant subspace we do not want.
  std::vector<cplx> v(n);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = cplx(1.0 + 0.25 * static_cast<double>(i + 1) / static_cast<double>(n),
                0.125 * static_cast<double>(i + 1) / static_cast<double>(n));
  deflate(v);
  double vn = vec_norm(v);
  if (vn < 1e-8) {
    // The ramp start lies in the deflated space; fall back to a canonical
    // vector that survives deflation.
    for (std::size_t c = 0; c < n; ++c) {
      std::fill(v.begin(), v.end(), cplx(0.0, 0.0));
      v[c] = 1.0;
      deflate(v);
      vn = vec_norm(v);
      if (vn > 1e-3) break;
    }
  }
  vec_scale(v, 1.0 / vn);

  InverseIterationResult out;
  out.v = v;
  out.rq_v = v;
  out.rq_residual = measure(v, out.residual, out.rq);
  for (int it = 0; it < 8; ++it) {
    std::vector<cplx> w = lu.solve(v);
    deflate(w);
    deflate(w);  // second pass controls cancellation against near-parallel sets
    const double wn = vec_norm(w);
    if (!(wn > 0.0) || !std::isfinite(wn)) break;
    vec_scale(w, 1.0 / wn);
    v = std::move(w);
    double res;
    cplx rho;
    const double rq_res = measure(v, res, rho);
    if (res < out.residual) {
      out.residual = res;
      out.v = v;
    }
    if (rq_res < out.rq_residual) {
      out.rq_residual = rq_res;
      out.rq = rho;
      out.rq_v = v;
    }
    if (res <= 1e-14 * std::max(1.0, a.max_abs())) break;
  }

  // When the requested shift itself carries error, the fixed-shift iteration
  // contracts by roughly the ratio of the distances from the shift to the two
  // nearest eigenvalues, which approaches 1 as the shift nears their
  // perpendicular bisector; the budget above can then end with the iterate
  // still contaminated.  A few steps shifted at the current Rayleigh quotient
  // converge quadratically and clean that up.  Callers that depend on the
  // quotient staying near the requested value must check that themselves.
  const double settled = 1e-14 * std::max(1.0, a.max_abs());
  v = out.rq_v;
  cplx shift = out.rq;
  for (int it = 0; it < 3 && out.rq_residual > settled; ++it) {
    ComplexMatrix ms = a;
    for (std::size_t i = 0; i < n; ++i) ms(i, i) -= shift;
    LuFactorization lus(std::move(ms));
    std::vector<cplx> w = lus.solve(v);
    deflate(w);
    deflate(w);
    const double wn = vec_norm(w);
    if (!(wn > 0.0) || !std::isfinite(wn)) break;
    vec_scale(w, 1.0 / wn);
    v = std::move(w);
    double res;
    cplx rho;
    const double rq_res = measure(v, res, rho);
    if (res < out.residual) {
      out.residual = res;
      out.v = v;
    }
    if (rq_res < out.rq_residual) {
      out.rq_residual = rq_res;
      out.rq = rho;
      out.rq_v = v;
    }
    shift = rho;
  }

  // Phase convention: rotate the largest entry onto the positive real axis.
  auto orient = [](std::vector<cplx>& b) {
    std::size_t imax = 0;
    double amax = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) {
      const double m2 = std::abs(b[i]);
      if (m2 > amax) {
        amax = m2;
        imax = i;
      }
    }
    if (amax > 0.0) vec_scale(b, std::conj(b[imax]) / amax);
  };
  orient(out.v);
  orient(out.rq_v);
  return out;
}

std::vector<std::vector<std::size_t>> cluster_values(const std::vector<cplx>& values,
                                                     double radius) {
  const std::size_t n = values.size();
  std::vector<std::size_t> parent(n);
  for (std::size_t i = 0; i < n; ++i) parent[i] = i;
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(values[i] - values[j]) <= radius) parent[find(i)] = find(j);

  std::vector<std::vector<std::size_t>> groups;
  std::vector<long> slot(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = find(i);
    if (slot[r] < 0) {
      slot[r] = static_cast<long>(groups.size());
      groups.emplace_back();
    }
    groups[static_cast<std::size_t>(slot[r])].push_back(i);
  }
  return groups;
}

double defective_cluster_radius(std::size_t n, double scale, double floor_radius) {
  const double base = kEps * std::max(1.0, scale);
  const double split = std::pow(base, 1.0 / static_cast<double>(std::max<std::size_t>(n, 1)));
  return std::max(floor_radius, 3.0 * split);
}

std::vector<EigenPair> eigenpairs(const ComplexMatrix& a, double tol) {
  a.require_square("eigenpairs");
  a.require_finite("eigenpairs");
  const std::size_t n = a.rows();
  const double scale = operator_norm(a);
  const double tol_eff = tol > 0.0 ? tol : 1e-9 * std::max(1.0, scale);

  std::vector<cplx> vals = eigenvalues(a);
  const double radius = defective_cluster_radius(n, scale, 1e-6);
  const auto groups = cluster_values(vals, radius);

  std::vector<EigenPair> pairs(n);
  for (const auto& g : groups) {
    cplx mean(0.0, 0.0);
    for (std::size_t idx : g) mean += vals[idx];
    mean /= static_cast<double>(g.size());

    std::vector<std::vector<cplx>> found;
    for (std::size_t idx : g) {
      EigenPair p;
      bool have = false;

      // Falling back on the Rayleigh-best iterate rescues a direction that
      // converged while the requested shift carried cancellation error from
      // the eigenvalue sweep.  The quotient must stay inside the cluster, or
      // a vector that drifted to a foreign eigenvalue would silently take
      // this slot.
      auto rescue = [&](InverseIterationResult& r, cplx near) {
        if (std::abs(r.rq - near) > radius) return;
        if (r.rq_residual > tol_eff) return;
        p = {r.rq, std::move(r.rq_v), r.rq_residual};
        have = true;
      };

      // Own value first, deflating against the directions already found so a
      // semisimple repeated eigenvalue yields one direction per copy.
      InverseIterationResult raw = inverse_iteration(a, vals[idx], found);
      if (raw.residual <= tol_eff) {
        p = {vals[idx], std::move(raw.v), raw.residual};
        have = true;
      } else {
        rescue(raw, vals[idx]);
      }

      // The deflation can defeat a legitimate direction: two close but simple
      // eigenvalues have independent, nearly parallel eigenvectors, and
      // projecting the earlier one out leaves a residual of the order of
      // their separation.  Retry without deflating.
      if (!have && !found.empty()) {
        InverseIterationResult solo = inverse_iteration(a, vals[idx], {});
        if (solo.residual <= tol_eff) {
          p = {vals[idx], std::move(solo.v), solo.residual};
          have = true;
        } else {
          rescue(solo, vals[idx]);
        }
      }

      // A defective cluster splits its eigenvalue symmetrically at working
      // precision, so the cluster mean is far more accurate than any member.
      if (!have) {
        InverseIterationResult avg = inverse_iteration(a, mean, found);
        if (avg.residual <= tol_eff) {
          p = {mean, std::move(avg.v), avg.residual};
          have = true;
        } else {
          rescue(avg, mean);
        }

        if (!have && !found.empty()) {
          // Defective direction: geometric multiplicity is exhausted, so the
          // remaining copies share the first direction found.
          std::vector<cplx> r = a * found[0];
          vec_axpy(r, mean, found[0]);
          const double res = vec_norm(r);
          if (res > tol_eff)
            throw NumericFailureError("eigenpairs: residual target unattained", res);
          p = {mean, found[0], res};
          have = true;
        }
        if (!have)
          throw NumericFailureError("eigenpairs: inverse iteration failed to converge",
                                    std::min(raw.residual, avg.residual));
      }

      found.push_back(p.vector);
      pairs[idx] = std::move(p);
    }
  }

  std::stable_sort(pairs.begin(), pairs.end(), [](const EigenPair& x, const EigenPair& y) {
    return modulus_then_lex(x.value, y.value);
  });
  return pairs;
}

}  // namespace schurlab
