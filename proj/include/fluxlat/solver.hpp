#pragma once

#include <cstdint>
#include <vector>

#include "fluxlat/sparse.hpp"

namespace fluxlat {

/// Default start-vector seed; recorded in every result for reproducibility.
inline constexpr std::uint64_t kLanczosSeed = 0x2a60dcb91fUL;

struct EigenResult {
  std::vector<double> eigenvalues;                // ascending
  std::vector<std::vector<double>> eigenvectors;  // unit norm, mutually orthogonal
  std::vector<double> residual_norms;             // ||H x - lambda x|| per pair
  int iterations = 0;
  bool converged = false;
  std::uint64_t seed = kLanczosSeed;
};

/// k lowest eigenpairs via Lanczos with full reorthogonalization and
/// deflation of converged pairs. The start vector comes from a fixed-seed
/// generator, so identical inputs give bit-identical results. Exhausting
/// max_iter returns the best available pairs flagged unconverged.
EigenResult low_spectrum(const SparseOperator& H, int k, double tol = 1e-10, int max_iter = 5000,
                         std::uint64_t seed = kLanczosSeed);

/// Full spectrum through a dense symmetric eigendecomposition; refuses
/// dimensions above dense_cap. Residual norms are filled only for
/// dimensions small enough to verify cheaply.
EigenResult dense_spectrum(const SparseOperator& H, std::int64_t dense_cap = 4000,
                           bool compute_vectors = true);

/// Eigenvalues only, same cap.
std::vector<double> dense_eigenvalues(const SparseOperator& H, std::int64_t dense_cap = 4000);

/// The product contract: y = H x.
std::vector<double> matvec(const SparseOperator& H, const std::vector<double>& x);

}  // namespace fluxlat
