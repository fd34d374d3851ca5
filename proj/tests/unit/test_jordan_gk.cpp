#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "schurlab/complex_matrix.hpp"
#include "schurlab/errors.hpp"
#include "schurlab/jordan_gk.hpp"
#include "schurlab/lu.hpp"
#include "schurlab/matrix_json.hpp"
#include "schurlab/rng.hpp"
#include "test_support.hpp"

using namespace schurlab;
using testsup::data_path;
using testsup::jordan_matrix;
using testsup::random_unitary;

namespace {

using SizeRows = std::vector<std::vector<std::size_t>>;

// Random similarity with a controlled condition number, built as Q1 D Q2
// with D diagonal in [1, 2].
ComplexMatrix mild_similarity(std::size_t n, Rng& rng) {
  ComplexMatrix q1 = random_unitary(n, rng);
  ComplexMatrix q2 = random_unitary(n, rng);
  std::vector<cplx> d(n);
  for (auto& x : d) x = 1.0 + rng.uniform01();
  return q1 * ComplexMatrix::diagonal(d) * q2;
}

}  // namespace

TEST_CASE("nullity sequences of nilpotent powers") {
  WeyrResult single = weyr_nullities(jordan_matrix({{cplx(0.0), 3}}), 0.0, 1e-8);
  CHECK(single.nullities == std::vector<std::size_t>{1, 2, 3});
  CHECK_FALSE(single.uncertain);

  ComplexMatrix nine = load_matrix(data_path("nine.json"));
  WeyrResult w = weyr_nullities(nine, 2.0, 1e-8);
  CHECK(w.nullities == std::vector<std::size_t>{3, 6, 8, 9});
  CHECK_FALSE(w.uncertain);

  WeyrResult inv = weyr_nullities(ComplexMatrix::identity(3), 0.0, 1e-8);
  CHECK(inv.nullities == std::vector<std::size_t>{0});

  // The cap cuts the sequence off at the cluster multiplicity.
  WeyrResult capped = weyr_nullities(jordan_matrix({{cplx(0.0), 3}}), 0.0, 1e-8, 2);
  CHECK(capped.nullities == std::vector<std::size_t>{1, 2});
}

TEST_CASE("block sizes from nullities") {
  CHECK(block_sizes_from_nullities({1, 2, 3}) == std::vector<std::size_t>{3});
  CHECK(block_sizes_from_nullities({3, 6, 8, 9}) == (std::vector<std::size_t>{4, 3, 2}));
  CHECK(block_sizes_from_nullities({2, 3}) == (std::vector<std::size_t>{2, 1}));
  CHECK(block_sizes_from_nullities({0}).empty());

  // Nullity increments must be nonnegative and non-increasing.
  CHECK_THROWS_AS(block_sizes_from_nullities({2, 1}), InvalidInputError);
  CHECK_THROWS_AS(block_sizes_from_nullities({2, 3, 5}), InvalidInputError);
}

TEST_CASE("dual sequence") {
  std::vector<std::size_t> m{4, 3, 2, 0, 0, 0, 0, 0, 0};
  std::vector<std::size_t> k{3, 3, 2, 1, 0, 0, 0, 0, 0};
  CHECK(dual_sequence(m) == k);
  CHECK(dual_sequence(k) == m);

  CHECK_THROWS_AS(dual_sequence({1, 2}), InvalidInputError);   // not non-increasing
  CHECK_THROWS_AS(dual_sequence({7, 1}), InvalidInputError);   // entry exceeds length
}

TEST_CASE("dual sequence is an involution on every shape") {
  for (std::size_t n = 1; n <= 6; ++n) {
    for (const auto& part : testsup::partitions(n)) {
      std::vector<std::size_t> m(part);
      m.resize(n, 0);
      CHECK(dual_sequence(dual_sequence(m)) == m);
    }
  }
}

TEST_CASE("structure profile of the nine dimensional example") {
  ComplexMatrix nine = load_matrix(data_path("nine.json"));
  GkProfile p = gk_profile(nine);
  REQUIRE(p.eigenvalues.size() == 1);
  CHECK(std::abs(p.eigenvalues[0] - cplx(2.0)) < 1e-9);
  CHECK(p.block_sizes[0] == (std::vector<std::size_t>{4, 3, 2}));
  CHECK(p.aggregate_m == (std::vector<std::size_t>{4, 3, 2, 0, 0, 0, 0, 0, 0}));
  CHECK(p.dual_k == (std::vector<std::size_t>{3, 3, 2, 1, 0, 0, 0, 0, 0}));
  CHECK_FALSE(p.uncertain);
  CHECK(p.dim == 9);
}

TEST_CASE("structure profile of simple matrices") {
  GkProfile id = gk_profile(ComplexMatrix::identity(4));
  REQUIRE(id.eigenvalues.size() == 1);
  CHECK(id.block_sizes[0] == (std::vector<std::size_t>{1, 1, 1, 1}));
  CHECK(id.aggregate_m == (std::vector<std::size_t>{1, 1, 1, 1}));
  CHECK(id.dual_k == (std::vector<std::size_t>{4, 0, 0, 0}));

  GkProfile d3 = gk_profile(load_matrix(data_path("diag3.json")));
  REQUIRE(d3.eigenvalues.size() == 3);
  // Eigenvalue clusters are reported in lexicographic order.
  CHECK(std::abs(d3.eigenvalues[0] - cplx(1.0)) < 1e-9);
  CHECK(std::abs(d3.eigenvalues[1] - cplx(2.0)) < 1e-9);
  CHECK(std::abs(d3.eigenvalues[2] - cplx(3.0)) < 1e-9);
  // Three separate eigenvalues each contribute their largest (only) block
  // to the first slot, so the aggregate profile is front-loaded.
  CHECK(d3.aggregate_m == (std::vector<std::size_t>{3, 0, 0}));
  CHECK(d3.dual_k == (std::vector<std::size_t>{1, 1, 1}));

  GkProfile one = gk_profile(ComplexMatrix::from_rows({{cplx(5.0)}}));
  CHECK(one.aggregate_m == std::vector<std::size_t>{1});
  CHECK(one.dual_k == std::vector<std::size_t>{1});
}

TEST_CASE("near coincident clusters raise the uncertain flag") {
  ComplexMatrix d = ComplexMatrix::diagonal({0.0, 1.5e-6});
  GkProfile p = gk_profile(d, 1e-6);
  CHECK(p.uncertain);

  ComplexMatrix far = ComplexMatrix::diagonal({0.0, 1.0});
  CHECK_FALSE(gk_profile(far).uncertain);
}

TEST_CASE("profile is similarity invariant") {
  Rng rng(83);
  std::vector<std::vector<std::pair<cplx, std::size_t>>> shapes =
      {{{cplx(0.0), 3}, {cplx(0.0), 1}, {cplx(1.0), 1}},
       {{cplx(0.0), 2}, {cplx(0.0), 2}, {cplx(2.0), 1}},
       {{cplx(0.0), 2}, {cplx(1.0), 2}, {cplx(2.0), 1}}};
  for (const auto& shape : shapes) {
    ComplexMatrix j = jordan_matrix(shape);
    ComplexMatrix p = mild_similarity(j.rows(), rng);
    ComplexMatrix a = p * j * invert(p);

    // The conjugated copies scatter a defective eigenvalue by roughly
    // eps^(1/m), far beyond the default clustering radius; the shapes here
    // keep distinct eigenvalues at least 1 apart, so a coarse radius is safe.
    GkProfile want = gk_profile(j, 0.05);
    GkProfile got = gk_profile(a, 0.05);
    REQUIRE(got.eigenvalues.size() == want.eigenvalues.size());
    for (std::size_t i = 0; i < want.eigenvalues.size(); ++i) {
      CHECK(std::abs(got.eigenvalues[i] - want.eigenvalues[i]) < 1e-6);
      CHECK(got.block_sizes[i] == want.block_sizes[i]);
    }
    CHECK(got.aggregate_m == want.aggregate_m);
    CHECK(got.dual_k == want.dual_k);
  }
}

TEST_CASE("deflation prediction on the block table") {
  CHECK(predict_deflation({{2, 1}}, 1, 1) == SizeRows{{1, 1}});
  CHECK(predict_deflation({{2, 2}}, 1, 1) == SizeRows{{2, 1}});
  CHECK(predict_deflation({{3}}, 1, 1) == SizeRows{{2}});
  CHECK(predict_deflation({{2, 1}}, 1, 2) == SizeRows{{2}});
  CHECK(predict_deflation({{2, 1}, {3}}, 2, 1) == (SizeRows{{2, 1}, {2}}));

  // A chain of length one disappears; an emptied row disappears with it.
  CHECK(predict_deflation({{1}}, 1, 1).empty());
  CHECK(predict_deflation({{1}, {2}}, 1, 1) == SizeRows{{2}});

  CHECK_THROWS_AS(predict_deflation({{2, 1}}, 2, 1), InvalidInputError);
  CHECK_THROWS_AS(predict_deflation({{2, 1}}, 1, 3), InvalidInputError);
  CHECK_THROWS_AS(predict_deflation({{1, 2}}, 1, 1), InvalidInputError);  // not sorted
  CHECK_THROWS_AS(predict_deflation({{2, 0}}, 1, 1), InvalidInputError);  // zero size
}

TEST_CASE("jordan basis validation") {
  ComplexMatrix a = jordan_matrix({{cplx(0.0), 2}, {cplx(0.0), 1}});
  JordanBasis jb = JordanBasis::create(a, ComplexMatrix::identity(3),
                                       {{cplx(0.0), 2, 0}, {cplx(0.0), 1, 2}});
  CHECK(jb.chains().size() == 2);
  CHECK(max_abs_diff(jb.matrix(), ComplexMatrix::identity(3)) == 0.0);

  // Chains must tile the columns.
  CHECK_THROWS_AS(JordanBasis::create(a, ComplexMatrix::identity(3), {{cplx(0.0), 2, 0}}),
                  InvalidInputError);
  // Chain relations must hold.
  CHECK_THROWS_AS(JordanBasis::create(ComplexMatrix::diagonal({1.0, 2.0}),
                                      ComplexMatrix::identity(2), {{cplx(1.0), 2, 0}}),
                  InvalidInputError);
  // Columns must be comfortably invertible.
  ComplexMatrix sing(2, 2);
  sing(0, 0) = 1.0;
  sing(0, 1) = 1.0;
  CHECK_THROWS_AS(JordanBasis::create(ComplexMatrix(2, 2), sing,
                                      {{cplx(0.0), 1, 0}, {cplx(0.0), 1, 1}}),
                  InvalidInputError);
}

TEST_CASE("rebuilding a basis around a chosen eigenvector") {
  const double rt2 = std::sqrt(2.0);

  // Zero matrix: every unit vector is an eigenvector and replaces the last
  // kernel chain it overlaps.
  ComplexMatrix z(2, 2);
  JordanBasis base = JordanBasis::create(z, ComplexMatrix::identity(2),
                                         {{cplx(0.0), 1, 0}, {cplx(0.0), 1, 1}});
  std::vector<cplx> x{1.0 / rt2, 1.0 / rt2};
  JordanBasis rebuilt = jordan_basis_including(z, base, x);
  REQUIRE(rebuilt.chains().size() == 2);
  CHECK(std::abs(rebuilt.matrix()(0, 0) - cplx(1.0)) < 1e-14);
  CHECK(std::abs(rebuilt.matrix()(1, 0)) < 1e-14);
  CHECK(std::abs(rebuilt.matrix()(0, 1) - x[0]) < 1e-14);
  CHECK(std::abs(rebuilt.matrix()(1, 1) - x[1]) < 1e-14);

  // x already heads the only chain: the basis survives unchanged.
  ComplexMatrix j2 = jordan_matrix({{cplx(0.0), 2}});
  JordanBasis jb2 = JordanBasis::create(j2, ComplexMatrix::identity(2), {{cplx(0.0), 2, 0}});
  JordanBasis same = jordan_basis_including(j2, jb2, {1.0, 0.0});
  CHECK(max_abs_diff(same.matrix(), ComplexMatrix::identity(2)) < 1e-12);

  // A rotated head propagates its phase down the regenerated chain.
  cplx c(0.6, 0.8);
  JordanBasis rot = jordan_basis_including(j2, jb2, {c, 0.0});
  CHECK(std::abs(rot.matrix()(0, 0) - c) < 1e-12);
  CHECK(std::abs(rot.matrix()(1, 1) - c) < 1e-12);
  CHECK(std::abs(rot.matrix()(1, 0)) < 1e-12);
  CHECK(std::abs(rot.matrix()(0, 1)) < 1e-12);

  // Non-eigenvector inputs are rejected.
  ComplexMatrix d = ComplexMatrix::diagonal({1.0, 2.0});
  JordanBasis dj = JordanBasis::create(d, ComplexMatrix::identity(2),
                                       {{cplx(1.0), 1, 0}, {cplx(2.0), 1, 1}});
  CHECK_THROWS_AS(jordan_basis_including(d, dj, {1.0 / rt2, 1.0 / rt2}), InvalidInputError);
  // Non-unit inputs too.
  CHECK_THROWS_AS(jordan_basis_including(d, dj, {2.0, 0.0}), InvalidInputError);
}

TEST_CASE("combination across two chains replaces the shorter one") {
  ComplexMatrix a = jordan_matrix({{cplx(0.0), 2}, {cplx(0.0), 1}});
  JordanBasis base = JordanBasis::create(a, ComplexMatrix::identity(3),
                                         {{cplx(0.0), 2, 0}, {cplx(0.0), 1, 2}});
  const double rt2 = std::sqrt(2.0);
  std::vector<cplx> x{1.0 / rt2, 0.0, 1.0 / rt2};
  JordanBasis rebuilt = jordan_basis_including(a, base, x);
  REQUIRE(rebuilt.chains().size() == 2);

  // The length-2 chain survives; the singleton now holds x.
  bool found_x = false;
  for (const auto& ch : rebuilt.chains()) {
    if (ch.length == 1) {
      std::vector<cplx> col = rebuilt.matrix().column(ch.first_column);
      double dist = 0.0;
      for (std::size_t i = 0; i < 3; ++i) dist = std::max(dist, std::abs(col[i] - x[i]));
      CHECK(dist < 1e-12);
      found_x = true;
    }
  }
  CHECK(found_x);
}
