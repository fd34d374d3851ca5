#include <cmath>
#include <vector>

#include "doctest.h"
#include "schurlab/complex_matrix.hpp"
#include "schurlab/errors.hpp"
#include "schurlab/rng.hpp"
#include "schurlab/svd.hpp"
#include "test_support.hpp"

using namespace schurlab;

namespace {

// |U diag(s) V^* - M|, the reconstruction error of an SVD.
double svd_residual(const ComplexMatrix& m, const SvdResult& r) {
  ComplexMatrix sigma(m.rows(), m.cols());
  for (std::size_t i = 0; i < r.singular_values.size(); ++i)
    sigma(i, i) = r.singular_values[i];
  return max_abs_diff(r.left * sigma * r.right.adjoint(), m);
}

double unitary_dev(const ComplexMatrix& q) {
  return max_abs_diff(q.adjoint() * q, ComplexMatrix::identity(q.cols()));
}

}  // namespace

TEST_CASE("svd reconstructs random matrices") {
  Rng rng(41);
  for (std::size_t n : {1u, 2u, 5u, 9u}) {
    ComplexMatrix m = ginibre(n, rng);
    SvdResult r = svd(m);
    CHECK(svd_residual(m, r) < 1e-12 * std::max(1.0, m.max_abs()));
    CHECK(unitary_dev(r.left) < 1e-13);
    CHECK(unitary_dev(r.right) < 1e-13);
    for (std::size_t i = 0; i + 1 < r.singular_values.size(); ++i)
      CHECK(r.singular_values[i] >= r.singular_values[i + 1]);
    for (double s : r.singular_values) CHECK(s >= 0.0);
  }
}

TEST_CASE("svd of rectangular shapes") {
  Rng rng(7);
  ComplexMatrix m(3, 5);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 5; ++j) m(i, j) = rng.complex_gauss();
  SvdResult r = svd(m);
  CHECK(r.left.rows() == 3);
  CHECK(r.right.rows() == 5);
  CHECK(r.singular_values.size() == 3);
  CHECK(svd_residual(m, r) < 1e-13 * std::max(1.0, m.max_abs()));

  ComplexMatrix t = m.adjoint();
  SvdResult rt = svd(t);
  CHECK(rt.singular_values.size() == 3);
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(rt.singular_values[i] == doctest::Approx(r.singular_values[i]).epsilon(1e-12));
}

TEST_CASE("svd rejects empty input") {
  ComplexMatrix e;
  CHECK_THROWS_AS(svd(e), InvalidInputError);
  ComplexMatrix col(3, 0);
  CHECK_THROWS_AS(svd(col), InvalidInputError);
}

TEST_CASE("singular values of diagonal matrices are exact") {
  ComplexMatrix d = ComplexMatrix::diagonal({cplx(0, -3), 1.0, cplx(2.0)});
  std::vector<double> s = singular_values(d);
  CHECK(s[0] == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(s[1] == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(s[2] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("operator norm") {
  CHECK(operator_norm(ComplexMatrix::identity(4)) == doctest::Approx(1.0).epsilon(1e-14));
  ComplexMatrix z(3, 3);
  CHECK(operator_norm(z) == 0.0);
  // Rank-one [[1,1],[1,1]] has norm 2.
  ComplexMatrix ones = ComplexMatrix::from_rows({{1.0, 1.0}, {1.0, 1.0}});
  CHECK(operator_norm(ones) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("rank with tolerance") {
  ComplexMatrix d = ComplexMatrix::diagonal({1.0, 1e-4, 1e-12});
  CHECK(rank_with_tol(d, 1e-8) == 2);
  CHECK(rank_with_tol(d, 1e-2) == 1);
  CHECK(rank_with_tol(ComplexMatrix(3, 3), 1e-8) == 0);

  // A value sitting within a decade of the cut is flagged.
  RankResult amb = rank_with_tol_flagged(ComplexMatrix::diagonal({1.0, 5e-8}), 1e-8);
  CHECK(amb.rank == 2);
  CHECK(amb.ambiguous);

  RankResult clear = rank_with_tol_flagged(ComplexMatrix::diagonal({1.0, 1e-3}), 1e-8);
  CHECK(clear.rank == 2);
  CHECK_FALSE(clear.ambiguous);

  RankResult zero = rank_with_tol_flagged(ComplexMatrix::diagonal({1.0, 1e-12}), 1e-8);
  CHECK(zero.rank == 1);
  CHECK_FALSE(zero.ambiguous);
}

TEST_CASE("orthonormal extension") {
  // Completing a single unit vector in C^3.
  std::vector<cplx> v{cplx(0, 1) / std::sqrt(2.0), 1.0 / std::sqrt(2.0), 0.0};
  ComplexMatrix q = orthonormal_extend({v}, 3);
  CHECK(q.rows() == 3);
  CHECK(q.cols() == 3);
  CHECK(unitary_dev(q) < 1e-13);
  for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(q(i, 0) - v[i]) < 1e-14);

  // Empty seed list gives the identity-sized unitary.
  ComplexMatrix full = orthonormal_extend({}, 4);
  CHECK(unitary_dev(full) < 1e-13);

  // Dependent seeds are rejected.
  std::vector<cplx> e1{1.0, 0.0};
  std::vector<cplx> e1b{1.0, 1e-9};
  CHECK_THROWS_AS(orthonormal_extend({e1, e1b}, 2), InvalidInputError);
}

TEST_CASE("svd handles tiny singular value splits") {
  // diag(1, eps) stays resolvable well below the tolerance scale.
  ComplexMatrix d = ComplexMatrix::diagonal({1.0, 1e-10});
  std::vector<double> s = singular_values(d);
  CHECK(s[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(s[1] == doctest::Approx(1e-10).epsilon(1e-10));
}
