#include "shapegeo/metric_operator.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace shapegeo {

namespace {

// selection matrix E: interior-compact -> full nodes
SparseMat expansion_matrix(const ParamGrid& grid) {
  const auto& nodes = grid.interior_nodes();
  SparseMat E(grid.nodes(), nodes.size());
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(nodes.size());
  for (int k = 0; k < nodes.size(); ++k) t.emplace_back(nodes[k], k, 1.0);
  E.setFromTriplets(t.begin(), t.end());
  return E;
}

}  // namespace

AssembledOperator::AssembledOperator(std::shared_ptr<const GeometryCache> cache,
                                     OperatorParams params, SolverOptions options)
    : cache_(std::move(cache)), params_(params), options_(options) {
  params_.validate();
  const GeometryCache& c = *cache_;
  const ScalarField& m = c.mass();
  const SparseMat& K = c.stiffness();

  SparseMat mass_diag(m.size(), m.size());
  mass_diag.setIdentity();
  mass_diag.diagonal() = m;

  if (params_.A == 0.0) {
    wp_ = mass_diag;
  } else {
    SparseMat power = K;  // K (M^{-1} K)^{p-1}
    for (int i = 1; i < params_.p; ++i) {
      SparseMat scaled = power;
      for (int k = 0; k < scaled.outerSize(); ++k)
        for (SparseMat::InnerIterator it(scaled, k); it; ++it) it.valueRef() /= m[it.row()];
      power = (K * scaled).eval();
    }
    wp_ = mass_diag + params_.A * power;
  }
  wp_.makeCompressed();

  const ParamGrid& grid = *c.grid();
  if (grid.periodic()) {
    wp_solve_ = wp_;
  } else {
    const SparseMat E = expansion_matrix(grid);
    wp_solve_ = SparseMat(E.transpose()) * wp_ * E;
  }
  wp_solve_.makeCompressed();

  use_direct_ = wp_solve_.rows() <= options_.direct_threshold;
  if (use_direct_) {
    ldlt_ = std::make_unique<Eigen::SimplicialLDLT<SparseMat>>();
    ldlt_->compute(wp_solve_);
    if (ldlt_->info() != Eigen::Success)
      throw SolveError("operator factorization failed (matrix not SPD?)");
  } else {
    cg_ = std::make_unique<Eigen::ConjugateGradient<SparseMat, Eigen::Lower | Eigen::Upper>>();
    cg_->setTolerance(options_.tol_lin);
    cg_->setMaxIterations(
        static_cast<Eigen::Index>(options_.max_iter_factor) * wp_solve_.rows());
    cg_->compute(wp_solve_);
  }
}

ScalarField AssembledOperator::apply_P(const ScalarField& h) const {
  if (params_.A == 0.0) return h;
  ScalarField t = h;
  for (int i = 0; i < params_.p; ++i) t = cache_->laplace(t);
  return h + params_.A * t;
}

VecField AssembledOperator::apply_P(const VecField& h) const {
  if (params_.A == 0.0) return h;
  VecField t = h;
  for (int i = 0; i < params_.p; ++i) t = cache_->laplace(t);
  return h + params_.A * t;
}

ScalarField AssembledOperator::solve_weighted(const ScalarField& weighted_rhs) const {
  ScalarField x;
  if (use_direct_) {
    x = ldlt_->solve(weighted_rhs);
  } else {
    x = cg_->solve(weighted_rhs);
    if (cg_->info() != Eigen::Success)
      throw SolveError("P-solve CG did not converge, residual = " + std::to_string(cg_->error()));
  }
  return x;
}

ScalarField AssembledOperator::solve_P(const ScalarField& rhs) const {
  const GeometryCache& c = *cache_;
  const ParamGrid& grid = *c.grid();
  const ScalarField weighted = c.mass().array() * rhs.array();
  if (grid.periodic()) return solve_weighted(weighted);
  const auto& nodes = grid.interior_nodes();
  ScalarField wr(nodes.size());
  for (int k = 0; k < nodes.size(); ++k) wr[k] = weighted[nodes[k]];
  const ScalarField xi = solve_weighted(wr);
  ScalarField x = ScalarField::Zero(grid.nodes());
  for (int k = 0; k < nodes.size(); ++k) x[nodes[k]] = xi[k];
  return x;
}

VecField AssembledOperator::solve_P(const VecField& rhs) const {
  VecField out(rhs.rows(), 3);
  for (int comp = 0; comp < 3; ++comp) out.col(comp) = solve_P(ScalarField(rhs.col(comp)));
  return out;
}

double AssembledOperator::gp_inner(const VecField& h, const VecField& k) const {
  return cache_->h0_inner(apply_P(h), k);
}

TanField AssembledOperator::apply_P_top(const TanField& X) const {
  return cache_->tangential_part(apply_P(cache_->tangent_map(X)));
}

void AssembledOperator::ensure_top_system() const {
  std::call_once(top_once_, [this]() {
    const GeometryCache& c = *cache_;
    const ParamGrid& grid = *c.grid();
    const int n = grid.nodes();

    SparseMat acc(2 * n, 2 * n);
    for (int comp = 0; comp < 3; ++comp) {
      SparseMat Tc(n, 2 * n);
      std::vector<Eigen::Triplet<double>> t;
      t.reserve(2 * static_cast<size_t>(n));
      for (int k = 0; k < n; ++k) {
        t.emplace_back(k, k, c.fu()(k, comp));
        t.emplace_back(k, n + k, c.fv()(k, comp));
      }
      Tc.setFromTriplets(t.begin(), t.end());
      acc += SparseMat(Tc.transpose()) * wp_ * Tc;
    }

    if (grid.periodic()) {
      top_solve_ = acc;
    } else {
      const SparseMat E = expansion_matrix(grid);
      SparseMat E2(2 * n, 2 * E.cols());
      std::vector<Eigen::Triplet<double>> t;
      const auto& nodes = grid.interior_nodes();
      for (int k = 0; k < nodes.size(); ++k) {
        t.emplace_back(nodes[k], k, 1.0);
        t.emplace_back(n + nodes[k], static_cast<int>(nodes.size()) + k, 1.0);
      }
      E2.setFromTriplets(t.begin(), t.end());
      top_solve_ = SparseMat(E2.transpose()) * acc * E2;
    }
    top_solve_.makeCompressed();

    if (top_solve_.rows() <= options_.direct_threshold) {
      top_ldlt_ = std::make_unique<Eigen::SimplicialLDLT<SparseMat>>();
      top_ldlt_->compute(top_solve_);
      if (top_ldlt_->info() != Eigen::Success)
        throw SolveError("P^T factorization failed");
    } else {
      top_cg_ =
          std::make_unique<Eigen::ConjugateGradient<SparseMat, Eigen::Lower | Eigen::Upper>>();
      top_cg_->setTolerance(options_.tol_lin);
      top_cg_->setMaxIterations(
          static_cast<Eigen::Index>(options_.max_iter_factor) * top_solve_.rows());
      top_cg_->compute(top_solve_);
    }
  });
}

TanField AssembledOperator::solve_P_top(const TanField& rhs) const {
  ensure_top_system();
  const GeometryCache& c = *cache_;
  const ParamGrid& grid = *c.grid();
  const int n = grid.nodes();
  // weighted right-hand side: per-node g-lowering times the mass
  const ScalarField bu =
      c.mass().array() * (c.g11().array() * rhs.col(0).array() + c.g12().array() * rhs.col(1).array());
  const ScalarField bv =
      c.mass().array() * (c.g12().array() * rhs.col(0).array() + c.g22().array() * rhs.col(1).array());

  ScalarField b;
  if (grid.periodic()) {
    b.resize(2 * n);
    b.head(n) = bu;
    b.tail(n) = bv;
  } else {
    const auto& nodes = grid.interior_nodes();
    b.resize(2 * nodes.size());
    for (int k = 0; k < nodes.size(); ++k) {
      b[k] = bu[nodes[k]];
      b[nodes.size() + k] = bv[nodes[k]];
    }
  }

  ScalarField x;
  if (top_ldlt_) {
    x = top_ldlt_->solve(b);
  } else {
    x = top_cg_->solve(b);
    if (top_cg_->info() != Eigen::Success)
      throw SolveError("P^T CG did not converge, residual = " + std::to_string(top_cg_->error()));
  }

  TanField xi = TanField::Zero(n, 2);
  if (grid.periodic()) {
    xi.col(0) = x.head(n);
    xi.col(1) = x.tail(n);
  } else {
    const auto& nodes = grid.interior_nodes();
    for (int k = 0; k < nodes.size(); ++k) {
      xi(nodes[k], 0) = x[k];
      xi(nodes[k], 1) = x[nodes.size() + k];
    }
  }
  return xi;
}

std::pair<VecField, TanField> AssembledOperator::horizontal_projection(const VecField& h) const {
  ensure_top_system();
  const GeometryCache& c = *cache_;
  const ParamGrid& grid = *c.grid();
  const int n = grid.nodes();

  // right-hand side (T^t W_P3 h): component-wise weighted application
  VecField wh(n, 3);
  for (int comp = 0; comp < 3; ++comp) wh.col(comp) = wp_ * h.col(comp);
  const ScalarField bu = (c.fu().array() * wh.array()).rowwise().sum();
  const ScalarField bv = (c.fv().array() * wh.array()).rowwise().sum();

  ScalarField b;
  if (grid.periodic()) {
    b.resize(2 * n);
    b.head(n) = bu;
    b.tail(n) = bv;
  } else {
    const auto& nodes = grid.interior_nodes();
    b.resize(2 * nodes.size());
    for (int k = 0; k < nodes.size(); ++k) {
      b[k] = bu[nodes[k]];
      b[nodes.size() + k] = bv[nodes[k]];
    }
  }

  ScalarField x;
  if (top_ldlt_) {
    x = top_ldlt_->solve(b);
  } else {
    x = top_cg_->solve(b);
    if (top_cg_->info() != Eigen::Success)
      throw SolveError("P^T CG did not converge, residual = " + std::to_string(top_cg_->error()));
  }

  TanField xi = TanField::Zero(n, 2);
  if (grid.periodic()) {
    xi.col(0) = x.head(n);
    xi.col(1) = x.tail(n);
  } else {
    const auto& nodes = grid.interior_nodes();
    for (int k = 0; k < nodes.size(); ++k) {
      xi(nodes[k], 0) = x[k];
      xi(nodes[k], 1) = x[nodes.size() + k];
    }
  }
  return {h - c.tangent_map(xi), xi};
}

double AssembledOperator::min_eigenvalue_estimate(int iterations) const {
  const int m = static_cast<int>(wp_solve_.rows());
  std::mt19937_64 rng(0x5eedu);
  std::normal_distribution<double> dist;
  ScalarField y(m);
  for (int i = 0; i < m; ++i) y[i] = dist(rng);
  y.normalize();

  const GeometryCache& c = *cache_;
  const ParamGrid& grid = *c.grid();
  ScalarField mi;
  if (grid.periodic()) {
    mi = c.mass();
  } else {
    const auto& nodes = grid.interior_nodes();
    mi.resize(nodes.size());
    for (int k = 0; k < nodes.size(); ++k) mi[k] = c.mass()[nodes[k]];
  }

  for (int it = 0; it < iterations; ++it) {
    ScalarField z = solve_weighted((mi.array() * y.array()).matrix());
    y = z / z.norm();
  }
  const double num = y.dot(wp_solve_ * y);
  const double den = (y.array().square() * mi.array()).sum();
  return num / den;
}

double AssembledOperator::lambda_max_estimate(int iterations) const {
  const GeometryCache& c = *cache_;
  const int n = c.grid()->nodes();
  std::mt19937_64 rng(0xabcdu);
  std::normal_distribution<double> dist;
  ScalarField y(n);
  for (int i = 0; i < n; ++i) y[i] = dist(rng);
  y.normalize();
  double lambda = 0;
  for (int it = 0; it < iterations; ++it) {
    ScalarField z = c.laplace(y);
    lambda = y.dot(z) / y.dot(y);
    const double nz = z.norm();
    if (nz == 0) return 0;
    y = z / nz;
  }
  return lambda;
}

}  // namespace shapegeo
