#include "shapegeo/grid.hpp"

#include <cmath>
#include <functional>
#include <vector>

namespace shapegeo {

namespace {

using Triplet = Eigen::Triplet<double>;

// first derivative along one axis; central interior, 2nd-order one-sided ends
void axis_d1(std::vector<Triplet>& t, int n, double h, bool periodic,
             const std::function<int(int)>& id) {
  if (periodic) {
    for (int i = 0; i < n; ++i) {
      t.emplace_back(id(i), id((i + n - 1) % n), -0.5 / h);
      t.emplace_back(id(i), id((i + 1) % n), 0.5 / h);
    }
    return;
  }
  for (int i = 1; i + 1 < n; ++i) {
    t.emplace_back(id(i), id(i - 1), -0.5 / h);
    t.emplace_back(id(i), id(i + 1), 0.5 / h);
  }
  t.emplace_back(id(0), id(0), -1.5 / h);
  t.emplace_back(id(0), id(1), 2.0 / h);
  t.emplace_back(id(0), id(2), -0.5 / h);
  t.emplace_back(id(n - 1), id(n - 1), 1.5 / h);
  t.emplace_back(id(n - 1), id(n - 2), -2.0 / h);
  t.emplace_back(id(n - 1), id(n - 3), 0.5 / h);
}

// second derivative along one axis; 3-point interior, 4-point one-sided ends
void axis_d2(std::vector<Triplet>& t, int n, double h, bool periodic,
             const std::function<int(int)>& id) {
  const double h2 = h * h;
  if (periodic) {
    for (int i = 0; i < n; ++i) {
      t.emplace_back(id(i), id((i + n - 1) % n), 1.0 / h2);
      t.emplace_back(id(i), id(i), -2.0 / h2);
      t.emplace_back(id(i), id((i + 1) % n), 1.0 / h2);
    }
    return;
  }
  for (int i = 1; i + 1 < n; ++i) {
    t.emplace_back(id(i), id(i - 1), 1.0 / h2);
    t.emplace_back(id(i), id(i), -2.0 / h2);
    t.emplace_back(id(i), id(i + 1), 1.0 / h2);
  }
  if (n >= 4) {
    t.emplace_back(id(0), id(0), 2.0 / h2);
    t.emplace_back(id(0), id(1), -5.0 / h2);
    t.emplace_back(id(0), id(2), 4.0 / h2);
    t.emplace_back(id(0), id(3), -1.0 / h2);
    t.emplace_back(id(n - 1), id(n - 1), 2.0 / h2);
    t.emplace_back(id(n - 1), id(n - 2), -5.0 / h2);
    t.emplace_back(id(n - 1), id(n - 3), 4.0 / h2);
    t.emplace_back(id(n - 1), id(n - 4), -1.0 / h2);
  } else {
    // nu==3: only the first-order 3-point stencil fits
    for (int i : {0, n - 1}) {
      t.emplace_back(id(i), id(0), 1.0 / h2);
      t.emplace_back(id(i), id(1), -2.0 / h2);
      t.emplace_back(id(i), id(2), 1.0 / h2);
    }
  }
}

}  // namespace

ParamGrid::ParamGrid(int nu, int nv, Boundary boundary, double extent_u, double extent_v)
    : nu_(nu), nv_(nv), extent_u_(extent_u), extent_v_(extent_v), boundary_(boundary) {
  if (nu < 3 || nv < 3) throw std::invalid_argument("ParamGrid: need nu,nv >= 3");
  if (extent_u <= 0 || extent_v <= 0) throw std::invalid_argument("ParamGrid: extents must be positive");
  const bool per = periodic();
  hu_ = per ? extent_u / nu : extent_u / (nu - 1);
  hv_ = per ? extent_v / nv : extent_v / (nv - 1);

  const int n = nodes();
  interior_.resize(n);
  interior_index_.resize(n);
  quad_w_.resize(n);
  std::vector<int> inodes;
  inodes.reserve(n);
  for (int i = 0; i < nu; ++i) {
    for (int j = 0; j < nv; ++j) {
      const int idx = node(i, j);
      const bool edge_u = !per && (i == 0 || i == nu - 1);
      const bool edge_v = !per && (j == 0 || j == nv - 1);
      interior_[idx] = !(edge_u || edge_v);
      quad_w_[idx] = (edge_u ? 0.5 : 1.0) * (edge_v ? 0.5 : 1.0);
      if (interior_[idx]) {
        interior_index_[idx] = static_cast<int>(inodes.size());
        inodes.push_back(idx);
      } else {
        interior_index_[idx] = -1;
      }
    }
  }
  n_interior_ = static_cast<int>(inodes.size());
  interior_nodes_ = Eigen::Map<Eigen::VectorXi>(inodes.data(), n_interior_);

  std::vector<Triplet> t;
  t.reserve(static_cast<size_t>(3) * n);
  for (int j = 0; j < nv; ++j)
    axis_d1(t, nu, hu_, per, [&](int i) { return node(i, j); });
  du_.resize(n, n);
  du_.setFromTriplets(t.begin(), t.end());

  t.clear();
  for (int i = 0; i < nu; ++i)
    axis_d1(t, nv, hv_, per, [&](int j) { return node(i, j); });
  dv_.resize(n, n);
  dv_.setFromTriplets(t.begin(), t.end());

  t.clear();
  for (int j = 0; j < nv; ++j)
    axis_d2(t, nu, hu_, per, [&](int i) { return node(i, j); });
  d2u_.resize(n, n);
  d2u_.setFromTriplets(t.begin(), t.end());

  t.clear();
  for (int i = 0; i < nu; ++i)
    axis_d2(t, nv, hv_, per, [&](int j) { return node(i, j); });
  d2v_.resize(n, n);
  d2v_.setFromTriplets(t.begin(), t.end());

  // forward differences / averages onto edge midpoints
  const int mu = per ? nu : nu - 1;
  const int mv = per ? nv : nv - 1;
  t.clear();
  std::vector<Triplet> ta;
  for (int i = 0; i < mu; ++i) {
    for (int j = 0; j < nv; ++j) {
      const int row = i * nv + j;
      t.emplace_back(row, node(i, j), -1.0 / hu_);
      t.emplace_back(row, node((i + 1) % nu, j), 1.0 / hu_);
      ta.emplace_back(row, node(i, j), 0.5);
      ta.emplace_back(row, node((i + 1) % nu, j), 0.5);
    }
  }
  fwd_u_.resize(mu * nv, n);
  fwd_u_.setFromTriplets(t.begin(), t.end());
  avg_u_.resize(mu * nv, n);
  avg_u_.setFromTriplets(ta.begin(), ta.end());

  t.clear();
  ta.clear();
  for (int i = 0; i < nu; ++i) {
    for (int j = 0; j < mv; ++j) {
      const int row = i * mv + j;
      t.emplace_back(row, node(i, j), -1.0 / hv_);
      t.emplace_back(row, node(i, (j + 1) % nv), 1.0 / hv_);
      ta.emplace_back(row, node(i, j), 0.5);
      ta.emplace_back(row, node(i, (j + 1) % nv), 0.5);
    }
  }
  fwd_v_.resize(nu * mv, n);
  fwd_v_.setFromTriplets(t.begin(), t.end());
  avg_v_.resize(nu * mv, n);
  avg_v_.setFromTriplets(ta.begin(), ta.end());
}

std::shared_ptr<const ParamGrid> ParamGrid::make(int nu, int nv, Boundary boundary,
                                                 double extent_u, double extent_v) {
  return std::make_shared<const ParamGrid>(nu, nv, boundary, extent_u, extent_v);
}

Immersion flat_square(int nu, int nv, double side) {
  auto grid = ParamGrid::make(nu, nv, Boundary::DirichletZero, side, side);
  VecField f(grid->nodes(), 3);
  for (int i = 0; i < nu; ++i)
    for (int j = 0; j < nv; ++j)
      f.row(grid->node(i, j)) << grid->u_of(i), grid->v_of(j), 0.0;
  return {grid, std::move(f)};
}

Immersion graph_surface(int nu, int nv, const std::function<double(double, double)>& height,
                        double side) {
  auto grid = ParamGrid::make(nu, nv, Boundary::DirichletZero, side, side);
  VecField f(grid->nodes(), 3);
  for (int i = 0; i < nu; ++i)
    for (int j = 0; j < nv; ++j) {
      const double u = grid->u_of(i), v = grid->v_of(j);
      f.row(grid->node(i, j)) << u, v, height(u, v);
    }
  return {grid, std::move(f)};
}

Immersion torus_surface(int nu, int nv, double major_radius, double minor_radius) {
  const double two_pi = 2.0 * ParamGrid::kPi;
  auto grid = ParamGrid::make(nu, nv, Boundary::Periodic, two_pi, two_pi);
  VecField f(grid->nodes(), 3);
  for (int i = 0; i < nu; ++i)
    for (int j = 0; j < nv; ++j) {
      const double u = grid->u_of(i), v = grid->v_of(j);
      const double w = major_radius + minor_radius * std::cos(v);
      f.row(grid->node(i, j)) << w * std::cos(u), w * std::sin(u), minor_radius * std::sin(v);
    }
  return {grid, std::move(f)};
}

Immersion sphere_patch(int nu, int nv, double radius, double theta0, double theta1, double phi0,
                       double phi1) {
  auto grid = ParamGrid::make(nu, nv, Boundary::DirichletZero);
  VecField f(grid->nodes(), 3);
  for (int i = 0; i < nu; ++i)
    for (int j = 0; j < nv; ++j) {
      const double th = theta0 + (theta1 - theta0) * grid->u_of(i) / grid->extent_u();
      const double ph = phi0 + (phi1 - phi0) * grid->v_of(j) / grid->extent_v();
      f.row(grid->node(i, j)) << radius * std::sin(th) * std::cos(ph),
          radius * std::sin(th) * std::sin(ph), radius * std::cos(th);
    }
  return {grid, std::move(f)};
}

}  // namespace shapegeo
