#include "fluxlat/solver.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "fluxlat/errors.hpp"

namespace fluxlat {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Deterministic uniform doubles in [-0.5, 0.5); avoids the
// implementation-defined std::uniform_real_distribution.
class DetRng {
 public:
  explicit DetRng(std::uint64_t seed) : gen_(seed) {}
  double next() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53 - 0.5; }
  void fill(std::vector<double>& v) {
    for (auto& x : v) x = next();
  }

 private:
  std::mt19937_64 gen_;
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  return Eigen::Map<const VectorXd>(a.data(), static_cast<Eigen::Index>(a.size()))
      .dot(Eigen::Map<const VectorXd>(b.data(), static_cast<Eigen::Index>(b.size())));
}

void axpy(std::vector<double>& y, double alpha, const std::vector<double>& x) {
  Eigen::Map<VectorXd>(y.data(), static_cast<Eigen::Index>(y.size())) +=
      alpha * Eigen::Map<const VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
}

double nrm2(const std::vector<double>& v) {
  return Eigen::Map<const VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())).norm();
}

void scale(std::vector<double>& v, double s) {
  Eigen::Map<VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())) *= s;
}

struct LockedPair {
  double value;
  std::vector<double> vector;
  double residual;
};

}  // namespace

EigenResult low_spectrum(const SparseOperator& H, int k, double tol, int max_iter,
                         std::uint64_t seed) {
  const std::int64_t n = H.dim();
  if (n == 0) throw ValidationError("low_spectrum: empty basis (dimension 0)");
  if (k < 1) throw std::invalid_argument("low_spectrum: k must be at least 1");
  if (k > n) throw std::invalid_argument("low_spectrum: k exceeds the operator dimension");
  if (!(tol > 0.0)) throw std::invalid_argument("low_spectrum: tolerance must be positive");

  const double hscale = std::max(1.0, H.inf_norm());
  const double break_tol = 1e-13 * hscale;
  const std::size_t un = static_cast<std::size_t>(n);

  DetRng rng(seed);
  std::vector<LockedPair> locked;
  int total_iters = 0;

  auto true_residual = [&](const std::vector<double>& x, double theta) {
    std::vector<double> r(un);
    H.matvec(x, r);
    axpy(r, -theta, x);
    return nrm2(r);
  };

  // Ritz vector from the Lanczos basis; kept orthogonal to locked pairs.
  auto ritz_vector = [&](const std::vector<std::vector<double>>& V, const MatrixXd& S, int idx) {
    std::vector<double> x(un, 0.0);
    for (std::size_t j = 0; j < V.size(); ++j)
      axpy(x, S(static_cast<Eigen::Index>(j), idx), V[j]);
    for (const auto& lp : locked) axpy(x, -dot(x, lp.vector), lp.vector);
    const double norm = nrm2(x);
    if (norm > 0.0) scale(x, 1.0 / norm);
    return x;
  };

  bool budget_left = true;
  std::vector<double> leftover_values;        // unconverged Ritz data from the last sub-run
  std::vector<std::vector<double>> leftover_vectors;

  while (static_cast<int>(locked.size()) < k && budget_left) {
    // fresh deflated start vector
    std::vector<double> v0(un);
    bool got_start = false;
    for (int attempt = 0; attempt < 8 && !got_start; ++attempt) {
      rng.fill(v0);
      for (const auto& lp : locked) axpy(v0, -dot(v0, lp.vector), lp.vector);
      for (const auto& lp : locked) axpy(v0, -dot(v0, lp.vector), lp.vector);
      const double norm = nrm2(v0);
      if (norm > 1e-8) {
        scale(v0, 1.0 / norm);
        got_start = true;
      }
    }
    if (!got_start) break;

    std::vector<std::vector<double>> V;
    V.push_back(std::move(v0));
    std::vector<double> alpha;
    std::vector<double> beta;
    std::vector<double> w(un);
    std::vector<double> prev_theta;
    const std::int64_t room = n - static_cast<std::int64_t>(locked.size());

    bool subrun_done = false;
    while (!subrun_done) {
      const std::size_t j = alpha.size();
      H.matvec(V[j], w);
      ++total_iters;
      if (j > 0) axpy(w, -beta[j - 1], V[j - 1]);
      const double a = dot(w, V[j]);
      alpha.push_back(a);
      axpy(w, -a, V[j]);
      // full reorthogonalization against the Krylov basis and locked pairs
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& lp : locked) axpy(w, -dot(w, lp.vector), lp.vector);
        for (const auto& v : V) axpy(w, -dot(w, v), v);
      }
      const double b = nrm2(w);
      const int m = static_cast<int>(alpha.size());

      const bool breakdown = b <= break_tol;
      const bool timeup = total_iters >= max_iter;
      const bool full = m >= room;
      const int period = m <= 200 ? 10 : (m <= 600 ? 25 : 50);
      const bool scheduled = m >= std::min<std::int64_t>(k, room) && m % period == 0;

      if (breakdown || timeup || full || scheduled) {
        Eigen::Map<const VectorXd> diag(alpha.data(), m);
        VectorXd sub = VectorXd::Zero(std::max(m - 1, 0));
        for (int i = 0; i + 1 < m; ++i) sub(i) = beta[static_cast<std::size_t>(i)];

        Eigen::SelfAdjointEigenSolver<MatrixXd> values_only;
        values_only.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
        const VectorXd theta = values_only.eigenvalues();

        // try to lock when the subspace is exact or the low values stagnated
        bool stagnant = breakdown || full;
        if (!stagnant && !prev_theta.empty()) {
          stagnant = true;
          const int probe = std::min<int>(k - static_cast<int>(locked.size()),
                                          std::min<int>(m, static_cast<int>(prev_theta.size())));
          for (int i = 0; i < probe; ++i)
            if (std::abs(theta(i) - prev_theta[static_cast<std::size_t>(i)]) >
                0.01 * tol * std::max(1.0, std::abs(theta(i))))
              stagnant = false;
        }
        prev_theta.assign(theta.data(), theta.data() + std::min<int>(m, k));

        if (stagnant || timeup) {
          Eigen::SelfAdjointEigenSolver<MatrixXd> with_vectors;
          with_vectors.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
          const MatrixXd& S = with_vectors.eigenvectors();
          // A Krylov space carries one copy of each degenerate eigenvalue, so
          // locking beyond the lowest pair is only safe once the basis spans
          // the whole deflated complement (T exact); otherwise lock one pair
          // and restart so missed multiplicity surfaces in the next sub-run.
          const bool exact_complement = m >= room;
          const int max_locks =
              exact_complement ? k - static_cast<int>(locked.size()) : 1;
          int newly = 0;
          for (int idx = 0; idx < m && newly < max_locks && static_cast<int>(locked.size()) < k;
               ++idx) {
            auto x = ritz_vector(V, S, idx);
            const double r = true_residual(x, theta(idx));
            if (r <= tol * std::max(1.0, std::abs(theta(idx)))) {
              locked.push_back({theta(idx), std::move(x), r});
              ++newly;
            } else {
              break;  // ascending order: later pairs are even less converged
            }
          }
          if (newly > 0 || breakdown || full || timeup) {
            // restart with a fresh deflated vector (or give up on budget)
            if (timeup && static_cast<int>(locked.size()) < k) {
              budget_left = false;
              leftover_values.clear();
              leftover_vectors.clear();
              for (int idx = newly; idx < m && static_cast<int>(leftover_values.size()) < k;
                   ++idx) {
                leftover_values.push_back(theta(idx));
                leftover_vectors.push_back(ritz_vector(V, S, idx));
              }
            }
            subrun_done = true;
            continue;
          }
        } else if (timeup) {
          budget_left = false;
          subrun_done = true;
          continue;
        }
      }

      if (b <= break_tol) {
        subrun_done = true;  // handled above; guard against zero division
        continue;
      }
      beta.push_back(b);
      std::vector<double> next(w);
      scale(next, 1.0 / b);
      V.push_back(std::move(next));
    }
  }

  std::sort(locked.begin(), locked.end(),
            [](const LockedPair& a, const LockedPair& b) { return a.value < b.value; });

  EigenResult res;
  res.seed = seed;
  res.iterations = total_iters;
  res.converged = static_cast<int>(locked.size()) >= k;
  for (auto& lp : locked) {
    res.eigenvalues.push_back(lp.value);
    res.eigenvectors.push_back(std::move(lp.vector));
    res.residual_norms.push_back(lp.residual);
  }
  // partial result: pad with the best unconverged Ritz data available
  for (std::size_t i = 0; i < leftover_values.size() && static_cast<int>(res.eigenvalues.size()) < k;
       ++i) {
    res.eigenvalues.push_back(leftover_values[i]);
    res.residual_norms.push_back(true_residual(leftover_vectors[i], leftover_values[i]));
    res.eigenvectors.push_back(std::move(leftover_vectors[i]));
  }
  return res;
}

EigenResult dense_spectrum(const SparseOperator& H, std::int64_t dense_cap, bool compute_vectors) {
  const std::int64_t n = H.dim();
  if (n == 0) throw ValidationError("dense_spectrum: empty basis (dimension 0)");
  if (n > dense_cap)
    throw CapacityError("dense_spectrum: dimension " + std::to_string(n) +
                        " exceeds the dense cap of " + std::to_string(dense_cap));

  MatrixXd A = MatrixXd::Zero(n, n);
  H.for_each_entry([&](std::int64_t r, std::int64_t c, double v) {
    A(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
  });

  Eigen::SelfAdjointEigenSolver<MatrixXd> solver(
      A, compute_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw ConvergenceError("dense_spectrum: eigendecomposition failed");

  EigenResult res;
  res.iterations = 0;
  res.converged = true;
  res.eigenvalues.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + n);
  if (compute_vectors) {
    res.eigenvectors.resize(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i)
      res.eigenvectors[static_cast<std::size_t>(i)].assign(
          solver.eigenvectors().col(i).data(), solver.eigenvectors().col(i).data() + n);
    if (n <= 1500) {
      const MatrixXd resid =
          A * solver.eigenvectors() - solver.eigenvectors() * solver.eigenvalues().asDiagonal();
      for (std::int64_t i = 0; i < n; ++i) res.residual_norms.push_back(resid.col(i).norm());
    }
  }
  return res;
}

std::vector<double> dense_eigenvalues(const SparseOperator& H, std::int64_t dense_cap) {
  return dense_spectrum(H, dense_cap, /*compute_vectors=*/false).eigenvalues;
}

std::vector<double> matvec(const SparseOperator& H, const std::vector<double>& x) {
  return H.matvec(std::span<const double>(x));
}

}  // namespace fluxlat
