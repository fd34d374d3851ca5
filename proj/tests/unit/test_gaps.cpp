#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "schurlab/complex_matrix.hpp"
#include "schurlab/errors.hpp"
#include "schurlab/gaps.hpp"
#include "schurlab/rng.hpp"
#include "schurlab/svd.hpp"
#include "test_support.hpp"

using namespace schurlab;
using testsup::random_unitary;

namespace {

std::vector<cplx> e(std::size_t i, std::size_t n) {
  std::vector<cplx> v(n, cplx(0.0, 0.0));
  v[i] = 1.0;
  return v;
}

// Random subspace of the given dimension: leading columns of a random unitary.
Subspace random_subspace(std::size_t ambient, std::size_t dim, Rng& rng) {
  ComplexMatrix q = random_unitary(ambient, rng);
  return Subspace::from_orthonormal(ambient, q.block(0, 0, ambient, dim));
}

}  // namespace

TEST_CASE("subspace construction") {
  Subspace s = Subspace::span(3, {e(0, 3), {2.0, 0.0, 0.0}, e(1, 3)});
  CHECK(s.ambient() == 3);
  CHECK(s.dim() == 2);  // the duplicate direction collapses

  Subspace z = Subspace::zero(4);
  CHECK(z.dim() == 0);
  CHECK(projector(z).max_abs() == 0.0);

  CHECK_THROWS_AS(Subspace::span(0, {}), InvalidInputError);
  CHECK_THROWS_AS(Subspace::span(65, {}), InvalidInputError);
  CHECK_THROWS_AS(Subspace::span(3, {{1.0, 0.0}}), InvalidInputError);

  ComplexMatrix skew(2, 1);
  skew(0, 0) = 1.0;
  skew(1, 0) = 1.0;  // not unit length
  CHECK_THROWS_AS(Subspace::from_orthonormal(2, skew), InvalidInputError);
}

TEST_CASE("projector properties") {
  Rng rng(101);
  Subspace s = random_subspace(5, 2, rng);
  ComplexMatrix p = projector(s);
  CHECK(max_abs_diff(p * p, p) < 1e-13);
  CHECK(max_abs_diff(p.adjoint(), p) < 1e-13);
  CHECK(rank_with_tol(p, 1e-8) == 2);
}

TEST_CASE("gap golden values") {
  Subspace ex = Subspace::span(2, {e(0, 2)});
  Subspace ey = Subspace::span(2, {e(1, 2)});
  CHECK(gap(ex, ey) == doctest::Approx(1.0).epsilon(1e-12));

  const double rt2 = std::sqrt(2.0);
  Subspace diag = Subspace::span(2, {{1.0 / rt2, 1.0 / rt2}});
  CHECK(gap(ex, diag) == doctest::Approx(1.0 / rt2).epsilon(1e-12));

  CHECK(gap(ex, ex) < 1e-13);
  CHECK(gap(Subspace::zero(2), Subspace::zero(2)) == 0.0);

  // Different dimensions separate maximally, by convention exactly.
  CHECK(gap(ex, Subspace::span(2, {e(0, 2), e(1, 2)})) == 1.0);
  CHECK(gap(Subspace::zero(2), ex) == 1.0);
}

TEST_CASE("gap of tilted lines tracks the tilt") {
  for (double delta : {1e-2, 1e-4, 1e-6}) {
    const double nrm = std::sqrt(1.0 + delta * delta);
    Subspace m = Subspace::span(2, {e(0, 2)});
    Subspace n = Subspace::span(2, {{1.0 / nrm, delta / nrm}});
    const double want = delta / nrm;
    CHECK(gap(m, n) == doctest::Approx(want).epsilon(1e-9));
  }
}

TEST_CASE("semigap golden values") {
  Subspace ex = Subspace::span(3, {e(0, 3)});
  Subspace plane = Subspace::span(3, {e(0, 3), e(1, 3)});

  CHECK(semigap(Subspace::zero(3), ex) == 0.0);
  CHECK(semigap(ex, plane) < 1e-13);        // contained subspace
  CHECK(semigap(plane, ex) == 1.0);         // dimension excess, exact by convention
  CHECK(semigap(ex, Subspace::span(3, {e(1, 3)})) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("gap equals the larger one sided measure") {
  Rng rng(7);
  for (int rep = 0; rep < 20; ++rep) {
    Subspace m = random_subspace(6, 2, rng);
    Subspace n = random_subspace(6, 2, rng);
    const double g = gap(m, n);
    const double s1 = semigap(m, n);
    const double s2 = semigap(n, m);
    CHECK(g <= 1.0);
    CHECK(g >= 0.0);
    CHECK(std::abs(gap(n, m) - g) < 1e-11);
    CHECK(s1 <= g + 1e-11);
    CHECK(s2 <= g + 1e-11);
    CHECK(std::abs(std::max(s1, s2) - g) < 1e-10);
  }
}

TEST_CASE("one sided measure swaps under complements") {
  Rng rng(13);
  for (int rep = 0; rep < 10; ++rep) {
    Subspace m = random_subspace(5, 2, rng);
    Subspace n = random_subspace(5, 3, rng);
    const double lhs = semigap(m, n);
    const double rhs = semigap(orthocomplement(n), orthocomplement(m));
    CHECK(std::abs(lhs - rhs) < 1e-10);
  }
}

TEST_CASE("orthocomplement") {
  Subspace ex = Subspace::span(3, {e(0, 3)});
  Subspace perp = orthocomplement(ex);
  CHECK(perp.dim() == 2);
  CHECK(max_abs_diff(projector(ex) + projector(perp), ComplexMatrix::identity(3)) < 1e-13);

  Subspace all = orthocomplement(Subspace::zero(3));
  CHECK(all.dim() == 3);
  CHECK(orthocomplement(all).dim() == 0);
}

TEST_CASE("kernel and image") {
  ComplexMatrix j = ComplexMatrix::from_rows({{0.0, 1.0}, {0.0, 0.0}});
  Subspace k = kernel(j, 1e-8);
  REQUIRE(k.dim() == 1);
  CHECK(std::abs(std::abs(k.basis()(0, 0)) - 1.0) < 1e-12);

  Subspace im = image(j, 1e-8);
  REQUIRE(im.dim() == 1);
  CHECK(gap(k, im) < 1e-12);  // both are the first coordinate axis

  CHECK(kernel(ComplexMatrix::identity(3), 1e-8).dim() == 0);
  CHECK(image(ComplexMatrix(3, 3), 1e-8).dim() == 0);
  CHECK(kernel(ComplexMatrix(3, 3), 1e-8).dim() == 3);

  bool uncertain = false;
  kernel_flagged(ComplexMatrix::diagonal({1.0, 5e-8}), 1e-8, &uncertain);
  CHECK(uncertain);
  uncertain = false;
  kernel_flagged(ComplexMatrix::diagonal({1.0, 1.0}), 1e-8, &uncertain);
  CHECK_FALSE(uncertain);
}

TEST_CASE("kernel tilt per unit of matrix movement") {
  // Moving diag(0,1) to [[0,0],[-d,1]] rotates the kernel by about d.
  for (double d : {1e-2, 1e-3, 1e-4}) {
    ComplexMatrix a0 = ComplexMatrix::diagonal({0.0, 1.0});
    ComplexMatrix a = a0;
    a(1, 0) = -d;
    KernelSemigapResult r = kernel_semigap_ratio(a0, a);
    CHECK(r.norm_diff == doctest::Approx(d).epsilon(1e-12));
    CHECK(r.ratio == doctest::Approx(1.0 / std::sqrt(1.0 + d * d)).epsilon(1e-6));
    CHECK_FALSE(r.uncertain);
  }

  // Identical inputs and trivial kernels both report zero tilt.
  ComplexMatrix a0 = ComplexMatrix::diagonal({0.0, 1.0});
  KernelSemigapResult same = kernel_semigap_ratio(a0, a0);
  CHECK(same.ratio == 0.0);
  CHECK(same.norm_diff == 0.0);

  ComplexMatrix inv0 = ComplexMatrix::identity(2);
  ComplexMatrix inv1 = inv0;
  inv1(0, 1) = 1e-3;
  KernelSemigapResult triv = kernel_semigap_ratio(inv0, inv1);
  CHECK(triv.ratio == 0.0);
  CHECK(triv.semigap == 0.0);
}

TEST_CASE("ambient mismatch is rejected") {
  Subspace a = Subspace::span(2, {e(0, 2)});
  Subspace b = Subspace::span(3, {e(0, 3)});
  CHECK_THROWS_AS(gap(a, b), InvalidInputError);
  CHECK_THROWS_AS(semigap(a, b), InvalidInputError);
}
