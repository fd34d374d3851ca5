#include "schurlab/jordan_gk.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "schurlab/eigen.hpp"
#include "schurlab/errors.hpp"
#include "schurlab/lu.hpp"
#include "schurlab/svd.hpp"

namespace schurlab {

namespace {

ComplexMatrix shifted(const ComplexMatrix& a, cplx lambda) {
  ComplexMatrix b = a;
  for (std::size_t i = 0; i < a.rows(); ++i) b(i, i) -= lambda;
  return b;
}

bool lex_less(const cplx& x, const cplx& y) {
  if (x.real() != y.real()) return x.real() < y.real();
  return x.imag() < y.imag();
}

}  // namespace

WeyrResult weyr_nullities(const ComplexMatrix& a, cplx lambda, double rank_tol,
                          std::size_t max_nullity) {
  a.require_square("weyr_nullities input");
  a.require_finite("weyr_nullities input");
  if (!(rank_tol > 0.0)) throw InvalidInputError("weyr_nullities: rank_tol must be positive");
  const std::size_t n = a.rows();
  const std::size_t cap = (max_nullity == 0 || max_nullity > n) ? n : max_nullity;

  WeyrResult out;
  const ComplexMatrix b = shifted(a, lambda);
  ComplexMatrix power = b;
  std::size_t prev = 0;
  for (std::size_t k = 1; k <= n; ++k) {
    const RankResult r = rank_with_tol_flagged(power, rank_tol);
    out.uncertain = out.uncertain || r.ambiguous;
    const std::size_t d = n - static_cast<std::size_t>(r.rank);
    if (k > 1 && d <= prev) {
      // Stationary, or a tolerance glitch made the sequence dip; either way
      // later powers add nothing trustworthy.
      if (d < prev) out.uncertain = true;
      break;
    }
    out.nullities.push_back(d);
    prev = d;
    if (d >= cap) break;
    power = power * b;
  }
  return out;
}

std::vector<std::size_t> block_sizes_from_nullities(const std::vector<std::size_t>& d) {
  std::vector<std::size_t> counts;  // counts[k-1] = number of blocks of size >= k
  std::size_t prev = 0;
  for (std::size_t k = 0; k < d.size(); ++k) {
    if (d[k] < prev)
      throw InvalidInputError("block_sizes_from_nullities: nullities must be non-decreasing");
    const std::size_t inc = d[k] - prev;
    if (!counts.empty() && inc > counts.back())
      throw InvalidInputError("block_sizes_from_nullities: nullity increments must not grow");
    counts.push_back(inc);
    prev = d[k];
  }
  std::vector<std::size_t> sizes;
  const std::size_t total = counts.empty() ? 0 : counts.front();
  for (std::size_t j = 0; j < total; ++j) {
    std::size_t size = 0;
    while (size < counts.size() && counts[size] > j) ++size;
    sizes.push_back(size);
  }
  return sizes;
}

std::vector<std::size_t> dual_sequence(const std::vector<std::size_t>& m) {
  const std::size_t len = m.size();
  for (std::size_t i = 0; i < len; ++i) {
    if (i > 0 && m[i] > m[i - 1])
      throw InvalidInputError("dual_sequence: input must be non-increasing");
    if (m[i] > len)
      throw InvalidInputError("dual_sequence: entries must not exceed the sequence length");
  }
  std::vector<std::size_t> k(len, 0);
  for (std::size_t i = 1; i <= len; ++i) {
    std::size_t count = 0;
    while (count < len && m[count] >= i) ++count;
    k[i - 1] = count;
  }
  return k;
}

GkProfile gk_profile(const ComplexMatrix& a, double cluster_tol, double rank_tol) {
  a.require_square("gk_profile input");
  a.require_finite("gk_profile input");
  if (!(cluster_tol > 0.0) || !(rank_tol > 0.0))
    throw InvalidInputError("gk_profile: tolerances must be positive");
  const std::size_t n = a.rows();

  GkProfile out;
  out.dim = n;
  const std::vector<cplx> vals = eigenvalues(a);
  const std::vector<std::vector<std::size_t>> clusters = cluster_values(vals, cluster_tol);

  struct Cluster {
    cplx mean;
    std::size_t multiplicity;
  };
  std::vector<Cluster> reps;
  for (const auto& members : clusters) {
    cplx sum = 0.0;
    for (std::size_t idx : members) sum += vals[idx];
    reps.push_back({sum / static_cast<double>(members.size()), members.size()});
  }
  std::sort(reps.begin(), reps.end(),
            [](const Cluster& x, const Cluster& y) { return lex_less(x.mean, y.mean); });

  for (std::size_t i = 0; i < reps.size(); ++i)
    for (std::size_t j = i + 1; j < reps.size(); ++j)
      if (std::abs(reps[i].mean - reps[j].mean) < 2.0 * cluster_tol) out.uncertain = true;

  std::size_t covered = 0;
  for (const Cluster& c : reps) {
    WeyrResult w = weyr_nullities(a, c.mean, rank_tol, c.multiplicity);
    out.uncertain = out.uncertain || w.uncertain;
    std::vector<std::size_t> sizes = block_sizes_from_nullities(w.nullities);
    std::size_t sum = 0;
    for (std::size_t s : sizes) sum += s;
    if (sum != c.multiplicity) {
      char buf[160];
      std::snprintf(buf, sizeof(buf),
                    "gk_profile: blocks at eigenvalue (%.6g, %.6g) cover %zu of %zu dimensions",
                    c.mean.real(), c.mean.imag(), sum, c.multiplicity);
      throw NumericFailureError(buf);
    }
    covered += sum;
    out.eigenvalues.push_back(c.mean);
    out.block_sizes.push_back(std::move(sizes));
  }
  if (covered != n)
    throw NumericFailureError("gk_profile: block sizes do not add up to the dimension");

  out.aggregate_m.assign(n, 0);
  for (const auto& sizes : out.block_sizes)
    for (std::size_t i = 0; i < sizes.size() && i < n; ++i) out.aggregate_m[i] += sizes[i];
  out.dual_k = dual_sequence(out.aggregate_m);
  return out;
}

std::vector<std::vector<std::size_t>> predict_deflation(
    const std::vector<std::vector<std::size_t>>& blocks, std::size_t eigenvalue_index,
    std::size_t chain_index) {
  if (eigenvalue_index < 1 || eigenvalue_index > blocks.size())
    throw InvalidInputError("predict_deflation: eigenvalue index out of range");
  for (const auto& row : blocks) {
    if (row.empty()) throw InvalidInputError("predict_deflation: empty block list for an eigenvalue");
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (row[i] == 0) throw InvalidInputError("predict_deflation: block sizes must be positive");
      if (i > 0 && row[i] > row[i - 1])
        throw InvalidInputError("predict_deflation: block sizes must be non-increasing");
    }
  }
  std::vector<std::vector<std::size_t>> out = blocks;
  std::vector<std::size_t>& row = out[eigenvalue_index - 1];
  if (chain_index < 1 || chain_index > row.size())
    throw InvalidInputError("predict_deflation: chain index out of range");

  // Removing the eigenvector that heads chain l shortens the last chain tied
  // with it; shorter chains keep their vectors, longer ones are unaffected.
  const std::size_t len = row[chain_index - 1];
  std::size_t hit = chain_index - 1;
  while (hit + 1 < row.size() && row[hit + 1] == len) ++hit;
  row[hit] -= 1;
  if (row[hit] == 0) row.erase(row.begin() + static_cast<std::ptrdiff_t>(hit));
  if (row.empty()) out.erase(out.begin() + static_cast<std::ptrdiff_t>(eigenvalue_index - 1));
  return out;
}

JordanBasis JordanBasis::create(const ComplexMatrix& a, ComplexMatrix columns,
                                std::vector<ChainSpan> chains) {
  a.require_square("JordanBasis matrix");
  a.require_finite("JordanBasis matrix");
  const std::size_t n = a.rows();
  if (columns.rows() != n || columns.cols() != n)
    throw InvalidInputError("JordanBasis: column matrix must match the matrix dimension");
  columns.require_finite("JordanBasis columns");

  std::vector<ChainSpan> sorted = chains;
  std::sort(sorted.begin(), sorted.end(),
            [](const ChainSpan& x, const ChainSpan& y) { return x.first_column < y.first_column; });
  std::size_t expect = 0;
  for (const ChainSpan& c : sorted) {
    if (c.length == 0) throw InvalidInputError("JordanBasis: chain length must be positive");
    if (c.first_column != expect)
      throw InvalidInputError("JordanBasis: chains must tile the columns without gaps");
    expect += c.length;
  }
  if (expect != n) throw InvalidInputError("JordanBasis: chain lengths must add up to the dimension");

  const double tol = 1e-8 * std::max(1.0, a.max_abs());
  for (const ChainSpan& c : sorted) {
    std::vector<cplx> prev;
    for (std::size_t i = 0; i < c.length; ++i) {
      const std::vector<cplx> f = columns.column(c.first_column + i);
      std::vector<cplx> r = a * f;
      vec_axpy(r, c.eigenvalue, f);  // r = A f - lambda f
      if (i > 0) vec_axpy(r, cplx(1.0), prev);
      if (vec_norm(r) > tol)
        throw InvalidInputError("JordanBasis: columns do not satisfy the chain relations");
      prev = f;
    }
  }

  const std::vector<double> sigma = singular_values(columns);
  if (sigma.empty() || sigma.front() == 0.0 || sigma.back() <= 1e-8 * sigma.front())
    throw InvalidInputError("JordanBasis: column matrix is numerically singular");

  JordanBasis out;
  out.matrix_ = std::move(columns);
  out.chains_ = std::move(chains);
  return out;
}

JordanBasis jordan_basis_including(const ComplexMatrix& a, const JordanBasis& basis,
                                   const std::vector<cplx>& x) {
  a.require_square("jordan_basis_including matrix");
  const std::size_t n = a.rows();
  if (x.size() != n) throw InvalidInputError("jordan_basis_including: vector length mismatch");
  if (std::abs(vec_norm(x) - 1.0) > 1e-8)
    throw InvalidInputError("jordan_basis_including: x must be a unit vector");

  const double scale = std::max(1.0, a.max_abs());
  const std::vector<cplx> ax = a * x;
  const cplx rayleigh = vec_dot(x, ax);

  // Snap to the nearest eigenvalue represented in the basis, then insist x is
  // an eigenvector for that exact value.
  const std::vector<ChainSpan>& all = basis.chains();
  std::size_t nearest = all.size();
  double best = 0.0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    const double dist = std::abs(all[i].eigenvalue - rayleigh);
    if (nearest == all.size() || dist < best) {
      nearest = i;
      best = dist;
    }
  }
  if (nearest == all.size() || best > 1e-6 * scale)
    throw InvalidInputError("jordan_basis_including: x matches no eigenvalue of the basis");
  const cplx lambda = all[nearest].eigenvalue;
  {
    std::vector<cplx> resid = ax;
    vec_axpy(resid, lambda, x);
    if (vec_norm(resid) > 1e-8 * scale)
      throw InvalidInputError("jordan_basis_including: x is not an eigenvector within tolerance");
  }

  // Expand x in the basis and read off the coefficient on each chain head.
  LuFactorization lu(basis.matrix());
  const std::vector<cplx> coeff = lu.solve(x);
  double cmax = 0.0;
  for (const cplx& c : coeff) cmax = std::max(cmax, std::abs(c));

  struct Candidate {
    std::size_t chain;  // index into all
    cplx head;
  };
  std::vector<Candidate> same;
  for (std::size_t i = 0; i < all.size(); ++i)
    if (std::abs(all[i].eigenvalue - lambda) <= 1e-8 * (1.0 + std::abs(lambda)))
      same.push_back({i, coeff[all[i].first_column]});
  std::sort(same.begin(), same.end(), [&](const Candidate& p, const Candidate& q) {
    if (all[p.chain].length != all[q.chain].length)
      return all[p.chain].length > all[q.chain].length;
    return all[p.chain].first_column < all[q.chain].first_column;
  });

  const double head_cut = 1e-8 * (1.0 + cmax);
  std::size_t pick = same.size();
  for (std::size_t i = 0; i < same.size(); ++i)
    if (std::abs(same[i].head) > head_cut) pick = i;
  if (pick == same.size())
    throw InvalidInputError("jordan_basis_including: x has no component on any chain head");

  // The replacement chain starts at x itself; its later vectors combine the
  // same positions of every longer (or tied, earlier) chain.
  const ChainSpan& target = all[same[pick].chain];
  ComplexMatrix columns = basis.matrix();
  columns.set_column(target.first_column, x);
  for (std::size_t i = 1; i < target.length; ++i) {
    std::vector<cplx> g(n, cplx(0.0));
    for (std::size_t j = 0; j <= pick; ++j) {
      const ChainSpan& src = all[same[j].chain];
      vec_axpy(g, -same[j].head, basis.matrix().column(src.first_column + i));
    }
    columns.set_column(target.first_column + i, g);
  }
  return JordanBasis::create(a, std::move(columns), basis.chains());
}

}  // namespace schurlab
