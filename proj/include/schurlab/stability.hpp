#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "schurlab/complex_matrix.hpp"
#include "schurlab/schur_decomp.hpp"

namespace schurlab {

// Permutation pi minimizing the largest |spec[pi[j]] - spec0[j]|; among the
// minimizers, the lexicographically smallest pi.  Both lists must have equal
// length; the result holds 0-based indices into spec.
std::vector<std::size_t> match_eigenvalues(const std::vector<cplx>& spec0,
                                           const std::vector<cplx>& spec);

// Eigenvalue movement per unit of matrix movement, at the exponents relevant
// for an n x n matrix: ratio_1n uses the n-th root of the matrix distance,
// ratio_1 the plain distance.  ratio_1 only means anything when both matrices
// show the same number of distinct eigenvalues, hence the applicability flag.
struct HolderRatioResult {
  double matched_dist = 0.0;
  double norm_diff = 0.0;
  double ratio_1n = 0.0;
  bool lipschitz_applicable = false;
  double ratio_1 = 0.0;
};

HolderRatioResult holder_ratio(const ComplexMatrix& a0, const ComplexMatrix& a,
                               double cluster_tol = 1e-6);

// Replays the deflation sequence recorded in s (a Schur form of some nearby
// matrix) against a0: each step projects the recorded deflation vector onto
// the matching eigenvalue's kernel inside the current block, so the returned
// pair (u0, t0) is an exact-data Schur form of a0 built factor by factor in
// the same order.  Throws PairingFailureError when a projection collapses
// (norm below 1e-6) and NumericFailureError when the rebuilt factorization
// misses a0 by more than 1e-8 * max(1, |a0|).
std::pair<ComplexMatrix, ComplexMatrix> backward_reconstruct(const ComplexMatrix& a0,
                                                             const SchurForm& s,
                                                             double rank_tol = 1e-8);

// Largest perturbation size for which eigenvalue-to-cluster pairing against
// a0's spectrum stays unambiguous: min(1/2, (g/2)^n) with g the smallest
// distance between distinct eigenvalue clusters, or 1/2 when all eigenvalues
// coincide.
double pairing_safety_threshold(const ComplexMatrix& a0);

struct PerturbationTrial {
  double epsilon = 0.0;       // requested perturbation norm
  std::uint64_t seed = 0;     // per-trial stream seed
  ComplexMatrix a;            // perturbed matrix
  double norm_diff = 0.0;     // measured |a - a0|, equals epsilon up to roundoff
};

struct BackwardRecord {
  PerturbationTrial trial;
  ComplexMatrix u, t;    // Schur factors of the perturbed matrix
  ComplexMatrix u0, t0;  // replayed factors of a0
  double u_dist = 0.0;
  double t_dist = 0.0;
  double holder_ratio = 0.0;  // (u_dist + t_dist) / norm_diff^(1/n)
};

struct DecadeSummary {
  double epsilon = 0.0;
  std::size_t trials = 0;
  std::size_t failures = 0;
  double max_ratio = 0.0;  // over the successful trials of the decade
};

struct ExperimentReport {
  std::string matrix_id;
  std::uint64_t seed = 0;
  double safety_threshold = 0.0;
  double rank_tol = 0.0;
  std::vector<BackwardRecord> records;
  std::vector<DecadeSummary> decades;
};

// Random-perturbation sweep: for each epsilon decade, trials_per_decade
// Ginibre directions scaled to exactly epsilon, each decomposed and replayed
// against a0.  Pairing or convergence failures are counted per decade and
// excluded from the maxima.  Decades must be strictly decreasing and below
// pairing_safety_threshold(a0).
ExperimentReport measure_backward(const ComplexMatrix& a0, const std::vector<double>& eps_decades,
                                  std::size_t trials_per_decade, std::uint64_t seed,
                                  const std::string& matrix_id = "a0");

// A = p0 (j0 + E) p0^{-1} where E has the single entry
// epsilon / (|p0| |p0^{-1}|) at (j_index, j_index + 1), 1-based: the bridge
// position joining the block ending at j_index to the next one.  j0 must be a
// Jordan-form matrix and the two bridged blocks must share their eigenvalue;
// epsilon may be 0, returning p0 j0 p0^{-1} unchanged.
ComplexMatrix forward_demo_perturb(const ComplexMatrix& p0, const ComplexMatrix& j0,
                                   std::size_t j_index, double epsilon);

// Certified lower bound on how far the leading Schur vector of a0 (first
// column of u0) must move to serve any Schur form of a: the smallest
// phase-aligned distance from that column to an eigenvector direction of a,
// minus a 1e-8 slack, floored at 0.  (u0, t0) must factor a0.  phase_samples
// is accepted for interface stability; the phase minimum is computed in
// closed form.  *uncertain is set when a's eigenvector set had to reuse
// directions for a defective eigenvalue, making the bound advisory.
double forward_gap_lower_bound(const ComplexMatrix& a0, const ComplexMatrix& u0,
                               const ComplexMatrix& t0, const ComplexMatrix& a,
                               std::size_t phase_samples = 0, bool* uncertain = nullptr);

// Schur form of a whose first deflation vector is the prescribed unit
// eigenvector x; the remaining block is decomposed with the default ordering.
SchurForm schur_with_leading_vector(const ComplexMatrix& a, const std::vector<cplx>& x);

}  // namespace schurlab
