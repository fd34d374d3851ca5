#include "schurlab/hessenberg.hpp"

#include <cmath>
#include <string>

#include "schurlab/errors.hpp"
#include "schurlab/svd.hpp"

namespace schurlab {

namespace {

// Unit-modulus copy of z, or fallback when z is numerically ambiguous.
cplx normalized_phase(cplx z, cplx fallback) {
  const double a = std::abs(z);
  if (a < 0.5) return fallback;
  return z / a;
}

}  // namespace

SchurParams SchurParams::from_rho(std::vector<cplx> rho_in) {
  if (rho_in.empty()) throw InvalidInputError("SchurParams: empty coefficient list");
  const std::size_t n = rho_in.size();
  for (std::size_t j = 0; j < n; ++j) {
    const double a = std::abs(rho_in[j]);
    if (a > 1.0 + 1e-10)
      throw InvalidInputError("SchurParams: |rho_" + std::to_string(j + 1) + "| exceeds 1");
    if (a > 1.0) rho_in[j] /= a;  // absorb rounding overshoot
  }
  const double last = std::abs(rho_in[n - 1]);
  if (std::abs(last - 1.0) > 1e-10)
    throw InvalidInputError("SchurParams: last coefficient must be unimodular");
  rho_in[n - 1] /= last;

  SchurParams p;
  p.rho = std::move(rho_in);
  p.mu.resize(n - 1);
  for (std::size_t j = 0; j + 1 < n; ++j) {
    const double a2 = std::norm(p.rho[j]);
    p.mu[j] = std::sqrt(std::max(0.0, 1.0 - a2));
  }
  return p;
}

ComplexMatrix HessenbergChain::product() const {
  ComplexMatrix p = ComplexMatrix::identity(dim);
  for (const auto& f : factors) p = p * f;
  return p;
}

ComplexMatrix hessenberg_from_params(const SchurParams& p) {
  const std::size_t n = p.rho.size();
  if (n == 0) throw InvalidInputError("hessenberg_from_params: empty parameters");
  if (p.mu.size() != n - 1)
    throw InvalidInputError("hessenberg_from_params: mu length does not match rho");
  if (std::abs(std::abs(p.rho[n - 1]) - 1.0) > 1e-10)
    throw InvalidInputError("hessenberg_from_params: last coefficient must be unimodular");

  ComplexMatrix h(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i + 1 < n) h(i, i + 1) = p.mu[i];
    // Walk column j from the diagonal leftwards, accumulating the mu product.
    double muprod = 1.0;
    for (std::size_t jj = i + 1; jj-- > 0;) {
      const cplx tail = (jj == 0) ? cplx(1.0, 0.0) : std::conj(p.rho[jj - 1]);
      h(i, jj) = -p.rho[i] * muprod * tail;
      if (jj > 0) muprod *= p.mu[jj - 1];
    }
  }
  return h;
}

SchurParams params_from_first_column(const std::vector<cplx>& x) {
  const std::size_t n = x.size();
  if (n == 0) throw InvalidInputError("params_from_first_column: empty vector");
  if (std::abs(vec_norm(x) - 1.0) > 1e-10)
    throw InvalidInputError("params_from_first_column: input is not a unit vector");

  // Tail sums of squares: tail[j] holds |x_j|^2 + ... + |x_{n-1}|^2.  Each
  // coefficient is a local quotient against its own tail norm, and mu comes
  // from the ratio of adjacent tails, so recovery errors stay a few ulps per
  // entry instead of compounding through an accumulated product.  This also
  // absorbs an input whose norm sits a few ulps off 1: the recovered column
  // is x divided by its own norm, not x snapped onto the sphere along the
  // last coordinates.
  std::vector<double> tail(n + 1, 0.0);
  for (std::size_t j = n; j-- > 0;) tail[j] = std::norm(x[j]) + tail[j + 1];

  SchurParams p;
  p.rho.resize(n);
  p.mu.assign(n - 1, 0.0);
  bool dead = false;  // the tail of x is exactly zero; identity completion
  for (std::size_t j = 0; j < n; ++j) {
    if (dead || tail[j] == 0.0) {
      dead = true;
      // Trailing identity block: -rho_j * conj(rho_{j-1}) = 1 with mu = 0.
      p.rho[j] = j == 0 ? cplx(-1.0, 0.0) : -p.rho[j - 1];
      continue;
    }
    cplx r = -x[j] / std::sqrt(tail[j]);
    const double a = std::abs(r);
    if (a > 1.0) r /= a;  // rounding overshoot of the unit disk
    if (j + 1 == n) {
      // Norm conservation forces |rho_n| = 1 here; snap the modulus, falling
      // back to the identity convention when the quotient is numerically
      // empty.
      p.rho[j] = normalized_phase(r, j == 0 ? cplx(-1.0, 0.0) : -p.rho[j - 1]);
    } else {
      p.rho[j] = r;
      p.mu[j] = std::sqrt(std::min(1.0, tail[j + 1] / tail[j]));
      if (p.mu[j] == 0.0) dead = true;
    }
  }
  return p;
}

ComplexMatrix hessenberg_from_first_column(const std::vector<cplx>& x) {
  return hessenberg_from_params(params_from_first_column(x));
}

HessenbergChain factor_unitary(const ComplexMatrix& u) {
  u.require_square("factor_unitary");
  u.require_finite("factor_unitary");
  const std::size_t n = u.rows();
  {
    const ComplexMatrix gram = u.adjoint() * u;
    const double dev = operator_norm(gram - ComplexMatrix::identity(n));
    if (dev > 1e-8)
      throw InvalidInputError("factor_unitary: input is not unitary (deviation " +
                              std::to_string(dev) + ")");
  }

  HessenbergChain chain;
  chain.dim = n;
  if (n == 1) {
    // Degenerate: a 1x1 unitary is its own (trivial) Hessenberg factor.
    chain.factors.push_back(u);
    return chain;
  }

  ComplexMatrix work = u;  // the k-th deflated unitary, shrinking
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const std::size_t m = n - k;
    ComplexMatrix h;
    if (m == 2) {
      // Any 2x2 unitary is lower Hessenberg; absorbing the whole block makes
      // the factor product reconstruct u exactly instead of up to a phase.
      h = work;
    } else {
      std::vector<cplx> x = work.column(0);
      const double nx = vec_norm(x);
      if (nx == 0.0) throw NumericFailureError("factor_unitary: zero deflated column");
      vec_scale(x, 1.0 / nx);
      h = hessenberg_from_first_column(x);
    }

    ComplexMatrix full = ComplexMatrix::identity(n);
    full.set_block(k, k, h);
    chain.factors.push_back(full);

    if (m > 2) work = (h.adjoint() * work).block(1, 1, m - 1, m - 1);
  }
  return chain;
}

}  // namespace schurlab
