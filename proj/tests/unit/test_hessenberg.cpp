#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "schurlab/complex_matrix.hpp"
#include "schurlab/errors.hpp"
#include "schurlab/hessenberg.hpp"
#include "schurlab/rng.hpp"
#include "schurlab/svd.hpp"
#include "test_support.hpp"

using namespace schurlab;
using testsup::random_unitary;

namespace {

double unitary_dev(const ComplexMatrix& q) {
  return max_abs_diff(q.adjoint() * q, ComplexMatrix::identity(q.cols()));
}

// Admissible random parameters: strictly inside the disk except the last.
SchurParams random_params(std::size_t n, Rng& rng, double margin) {
  std::vector<cplx> rho(n);
  for (std::size_t j = 0; j + 1 < n; ++j) {
    cplx z = rng.complex_gauss();
    double a = std::abs(z);
    double r = (1.0 - margin) * rng.uniform01();
    rho[j] = (a == 0.0) ? cplx(r, 0.0) : z / a * r;
  }
  cplx ph = rng.complex_gauss();
  rho[n - 1] = (std::abs(ph) == 0.0) ? cplx(1.0, 0.0) : ph / std::abs(ph);
  return SchurParams::from_rho(std::move(rho));
}

}  // namespace

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(SchurParams::from_rho({}), InvalidInputError);
  CHECK_THROWS_AS(SchurParams::from_rho({cplx(0.5, 0.0)}), InvalidInputError);   // not unimodular
  CHECK_THROWS_AS(SchurParams::from_rho({cplx(1.5, 0.0), cplx(1.0, 0.0)}), InvalidInputError);

  SchurParams p = SchurParams::from_rho({cplx(0.5, 0.0), cplx(0.0, 1.0)});
  CHECK(p.mu.size() == 1);
  CHECK(p.mu[0] == doctest::Approx(std::sqrt(0.75)).epsilon(1e-15));
}

TEST_CASE("generated matrices are unitary lower Hessenberg") {
  Rng rng(11);
  for (std::size_t n : {1u, 2u, 3u, 6u, 12u}) {
    SchurParams p = random_params(n, rng, 0.0);
    ComplexMatrix h = hessenberg_from_params(p);
    CHECK(unitary_dev(h) < 1e-13);
    // Zero above the first superdiagonal.
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 2; j < n; ++j) CHECK(h(i, j) == cplx(0.0));
    // Real nonnegative superdiagonal.
    for (std::size_t i = 0; i + 1 < n; ++i) {
      CHECK(h(i, i + 1).imag() == 0.0);
      CHECK(h(i, i + 1).real() >= 0.0);
    }
    CHECK(h(0, 0) == -p.rho[0]);
  }
}

TEST_CASE("exact small patterns") {
  // One-parameter case is the 1x1 matrix (-rho_1).
  ComplexMatrix h1 = hessenberg_from_params(SchurParams::from_rho({cplx(0, 1)}));
  CHECK(h1(0, 0) == cplx(0, -1));

  // rho = (0, -1) produces the exact swap.
  ComplexMatrix h2 = hessenberg_from_params(SchurParams::from_rho({0.0, cplx(-1.0, 0.0)}));
  CHECK(h2(0, 0) == cplx(0.0));
  CHECK(h2(0, 1) == cplx(1.0));
  CHECK(h2(1, 0) == cplx(1.0));
  CHECK(h2(1, 1) == cplx(0.0));

  // rho = (0, 0, -1) cycles the basis.
  ComplexMatrix h3 = hessenberg_from_params(
      SchurParams::from_rho({0.0, 0.0, cplx(-1.0, 0.0)}));
  ComplexMatrix want = ComplexMatrix::from_rows(
      {{0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}, {1.0, 0.0, 0.0}});
  CHECK(max_abs_diff(h3, want) == 0.0);
}

TEST_CASE("first column recovery") {
  Rng rng(23);
  for (std::size_t n : {1u, 2u, 4u, 9u}) {
    for (int rep = 0; rep < 4; ++rep) {
      std::vector<cplx> x(n);
      for (auto& z : x) z = rng.complex_gauss();
      double nx = vec_norm(x);
      for (auto& z : x) z /= nx;

      ComplexMatrix h = hessenberg_from_first_column(x);
      CHECK(unitary_dev(h) < 1e-12);
      for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(h(i, 0) - x[i]) < 1e-12);
    }
  }
  CHECK_THROWS_AS(hessenberg_from_first_column({}), InvalidInputError);
  CHECK_THROWS_AS(hessenberg_from_first_column({cplx(0.5, 0.0)}), InvalidInputError);
}

TEST_CASE("standard basis vectors give exact permutation-like factors") {
  // e_1 maps to the identity bit for bit.
  std::vector<cplx> e1{1.0, 0.0, 0.0, 0.0};
  ComplexMatrix h = hessenberg_from_first_column(e1);
  CHECK(max_abs_diff(h, ComplexMatrix::identity(4)) == 0.0);

  // e_2 in C^3: swap of the first two coordinates, identity after.
  std::vector<cplx> e2{0.0, 1.0, 0.0};
  ComplexMatrix h2 = hessenberg_from_first_column(e2);
  ComplexMatrix want = ComplexMatrix::from_rows(
      {{0.0, 1.0, 0.0}, {1.0, 0.0, 0.0}, {0.0, 0.0, 1.0}});
  CHECK(max_abs_diff(h2, want) == 0.0);

  // e_3 in C^3: the exact cycle.
  std::vector<cplx> e3{0.0, 0.0, 1.0};
  ComplexMatrix h3 = hessenberg_from_first_column(e3);
  ComplexMatrix cyc = ComplexMatrix::from_rows(
      {{0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}, {1.0, 0.0, 0.0}});
  CHECK(max_abs_diff(h3, cyc) == 0.0);
}

TEST_CASE("parameter round trip away from the boundary") {
  Rng rng(31);
  for (std::size_t n : {2u, 5u, 16u, 32u}) {
    SchurParams p = random_params(n, rng, 1e-3);
    ComplexMatrix h = hessenberg_from_params(p);
    SchurParams q = params_from_first_column(h.column(0));
    for (std::size_t j = 0; j < n; ++j) CHECK(std::abs(q.rho[j] - p.rho[j]) < 1e-9);
  }
}

TEST_CASE("factoring a unitary into embedded Hessenberg terms") {
  Rng rng(47);
  for (std::size_t n : {1u, 2u, 3u, 7u, 14u}) {
    ComplexMatrix u = random_unitary(n, rng);
    HessenbergChain chain = factor_unitary(u);
    CHECK(chain.dim == n);
    CHECK(chain.factors.size() == (n <= 1 ? 1u : n - 1));
    CHECK(max_abs_diff(chain.product(), u) < 1e-9);

    // Factor k is the identity on its leading k coordinates.
    for (std::size_t k = 0; k < chain.factors.size(); ++k) {
      const ComplexMatrix& f = chain.factors[k];
      CHECK(unitary_dev(f) < 1e-12);
      for (std::size_t i = 0; i < k && n > 1; ++i) {
        CHECK(f(i, i) == cplx(1.0));
        for (std::size_t j = 0; j < n; ++j)
          if (j != i) {
            CHECK(f(i, j) == cplx(0.0));
            CHECK(f(j, i) == cplx(0.0));
          }
      }
      // Trailing block is lower Hessenberg.
      for (std::size_t i = k; i < n; ++i)
        for (std::size_t j = i + 2; j < n; ++j) CHECK(f(i, j) == cplx(0.0));
    }
  }

  ComplexMatrix notu = ComplexMatrix::from_rows({{1.0, 1.0}, {0.0, 1.0}});
  CHECK_THROWS_AS(factor_unitary(notu), InvalidInputError);
}

TEST_CASE("chain product of embedded factors") {
  // Hand-built chain: a 3-cycle followed by an embedded swap.
  ComplexMatrix cyc = ComplexMatrix::from_rows(
      {{0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}, {1.0, 0.0, 0.0}});
  ComplexMatrix swap23 = ComplexMatrix::from_rows(
      {{1.0, 0.0, 0.0}, {0.0, 0.0, 1.0}, {0.0, 1.0, 0.0}});
  HessenbergChain chain;
  chain.dim = 3;
  chain.factors = {cyc, swap23};
  ComplexMatrix p = chain.product();
  CHECK(max_abs_diff(p, cyc * swap23) == 0.0);
}
