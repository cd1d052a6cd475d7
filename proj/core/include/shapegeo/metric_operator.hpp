#pragma once

#include "shapegeo/geometry.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include <memory>
#include <mutex>
#include <optional>

namespace shapegeo {

struct OperatorParams {
  double A = 1.0;  // operator weight, A >= 0 (A = 0 degenerates P to the identity)
  int p = 1;       // Laplacian power, p >= 1

  void validate() const {
    if (A < 0) throw std::invalid_argument("OperatorParams: A must be >= 0");
    if (p < 1) throw std::invalid_argument("OperatorParams: p must be >= 1");
  }
};

struct SolverOptions {
  double tol_lin = 1e-10;
  int max_iter_factor = 10;        // max CG iterations = factor * unknowns
  int direct_threshold = 150000;   // unknowns above this use preconditioned CG
};

/// P = 1 + A Delta^p in the mass-weighted basis, with its factorization and
/// the tangential operator P^T assembled on demand.
///
/// The weighted matrix W_P = M + A K (M^{-1} K)^{p-1} is symmetric positive
/// definite by construction; solve_P inverts its restriction to the
/// Dirichlet-zero subspace (all nodes on periodic grids).  apply_P is the
/// matching free forward application h + A Delta^p h, so
/// apply_P(solve_P(rhs)) = rhs holds to solver tolerance on that subspace.
class AssembledOperator {
 public:
  AssembledOperator(std::shared_ptr<const GeometryCache> cache, OperatorParams params,
                    SolverOptions options = {});

  const GeometryCache& cache() const { return *cache_; }
  const OperatorParams& params() const { return params_; }
  std::uint64_t fingerprint() const { return cache_->fingerprint(); }

  VecField apply_P(const VecField& h) const;
  ScalarField apply_P(const ScalarField& h) const;

  /// h with ||apply_P(h) - rhs|| <= tol_lin * ||rhs|| on the solve subspace;
  /// Dirichlet grids return h vanishing on the boundary ring.
  VecField solve_P(const VecField& rhs) const;
  ScalarField solve_P(const ScalarField& rhs) const;

  /// G^P(h,k) = H^0(P h, k); symmetric to rounding by construction
  double gp_inner(const VecField& h, const VecField& k) const;

  /// P^T X = (P(Tf.X))^top
  TanField apply_P_top(const TanField& X) const;
  /// solves P^T xi = rhs (Dirichlet: xi = 0 on the boundary ring)
  TanField solve_P_top(const TanField& rhs) const;

  /// h = Tf.h_ver + h_hor with (P h_hor)^top = 0;
  /// h_ver = (P^T)^{-1}((P h)^top)
  std::pair<VecField, TanField> horizontal_projection(const VecField& h) const;

  /// Rayleigh-quotient estimate of the smallest eigenvalue of P on the solve
  /// subspace (inverse power iteration); > 0 certifies positive definiteness.
  double min_eigenvalue_estimate(int iterations = 30) const;
  /// power-iteration estimate of the largest eigenvalue of Delta
  double lambda_max_estimate(int iterations = 50) const;

  const SparseMat& weighted_matrix() const { return wp_; }

 private:
  ScalarField solve_weighted(const ScalarField& weighted_rhs) const;
  void ensure_top_system() const;

  std::shared_ptr<const GeometryCache> cache_;
  OperatorParams params_;
  SolverOptions options_;
  SparseMat wp_;        // full-grid weighted matrix
  SparseMat wp_solve_;  // restriction used by the solver
  bool use_direct_ = true;
  std::unique_ptr<Eigen::SimplicialLDLT<SparseMat>> ldlt_;
  std::unique_ptr<Eigen::ConjugateGradient<SparseMat, Eigen::Lower | Eigen::Upper>> cg_;

  // tangential system, built on first use
  mutable std::once_flag top_once_;
  mutable SparseMat tmap_;       // [X_u; X_v] -> stacked (h_x, h_y, h_z)
  mutable SparseMat top_solve_;  // (T E)^T W_P3 (T E)
  mutable std::unique_ptr<Eigen::SimplicialLDLT<SparseMat>> top_ldlt_;
  mutable std::unique_ptr<Eigen::ConjugateGradient<SparseMat, Eigen::Lower | Eigen::Upper>> top_cg_;
};

/// convenience wrappers mirroring the free-function operation names
inline VecField apply_P(const AssembledOperator& op, const VecField& h) { return op.apply_P(h); }
inline VecField solve_P(const AssembledOperator& op, const VecField& rhs) { return op.solve_P(rhs); }
inline double gp_inner(const AssembledOperator& op, const VecField& h, const VecField& k) {
  return op.gp_inner(h, k);
}

}  // namespace shapegeo
