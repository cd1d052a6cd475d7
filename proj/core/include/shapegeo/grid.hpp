#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>

namespace shapegeo {

using ScalarField = Eigen::VectorXd;                          // one value per node
using VecField = Eigen::Matrix<double, Eigen::Dynamic, 3>;    // R^3 field along f
using TanField = Eigen::Matrix<double, Eigen::Dynamic, 2>;    // tangential 2-vector field
using SparseMat = Eigen::SparseMatrix<double>;

struct DegenerateImmersionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SolveError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Boundary { DirichletZero, Periodic };

/// Rectangular parameter grid for the chart (u,v) of M.
///
/// Nodes are indexed u-major: node(i,j) = i*nv + j.  Dirichlet grids span
/// the closed extents with (nu-1)x(nv-1) cells; periodic grids identify
/// u=extent_u with u=0 (flat torus, no duplicated seam nodes).
///
/// The grid owns every immersion-independent finite-difference matrix:
///   du, dv     nodal first derivatives (central; 2nd-order one-sided at
///              Dirichlet boundaries)
///   d2u, d2v   nodal second derivatives (3-point; 4-point one-sided)
///   fwd_u/v    forward differences onto cell-edge midpoints, used by the
///              flux-form Laplace-Beltrami assembly
///   avg_u/v    the matching midpoint averages
class ParamGrid {
 public:
  ParamGrid(int nu, int nv, Boundary boundary, double extent_u, double extent_v);

  static std::shared_ptr<const ParamGrid> make(int nu, int nv, Boundary boundary,
                                               double extent_u = kPi, double extent_v = kPi);

  int nu() const { return nu_; }
  int nv() const { return nv_; }
  int nodes() const { return nu_ * nv_; }
  double hu() const { return hu_; }
  double hv() const { return hv_; }
  double extent_u() const { return extent_u_; }
  double extent_v() const { return extent_v_; }
  Boundary boundary() const { return boundary_; }
  bool periodic() const { return boundary_ == Boundary::Periodic; }

  int node(int i, int j) const { return i * nv_ + j; }
  double u_of(int i) const { return i * hu_; }
  double v_of(int j) const { return j * hv_; }

  bool is_boundary_node(int idx) const { return !interior_[idx]; }
  /// mask over nodes; all-true for periodic grids
  const Eigen::Array<bool, Eigen::Dynamic, 1>& interior_mask() const { return interior_; }
  int interior_count() const { return n_interior_; }
  /// interior node -> compact index, -1 on the Dirichlet boundary
  const Eigen::VectorXi& interior_index() const { return interior_index_; }
  const Eigen::VectorXi& interior_nodes() const { return interior_nodes_; }

  /// trapezoid quadrature weight per node (1 everywhere on periodic grids)
  const ScalarField& quad_weight() const { return quad_w_; }
  double cell_area() const { return hu_ * hv_; }

  const SparseMat& du() const { return du_; }
  const SparseMat& dv() const { return dv_; }
  const SparseMat& d2u() const { return d2u_; }
  const SparseMat& d2v() const { return d2v_; }
  const SparseMat& fwd_u() const { return fwd_u_; }
  const SparseMat& fwd_v() const { return fwd_v_; }
  const SparseMat& avg_u() const { return avg_u_; }
  const SparseMat& avg_v() const { return avg_v_; }

  static constexpr double kPi = 3.14159265358979323846;

 private:
  int nu_, nv_;
  double extent_u_, extent_v_;
  double hu_, hv_;
  Boundary boundary_;
  Eigen::Array<bool, Eigen::Dynamic, 1> interior_;
  Eigen::VectorXi interior_index_;
  Eigen::VectorXi interior_nodes_;
  int n_interior_ = 0;
  ScalarField quad_w_;
  SparseMat du_, dv_, d2u_, d2v_, fwd_u_, fwd_v_, avg_u_, avg_v_;
};

using GridPtr = std::shared_ptr<const ParamGrid>;

/// The surface: an R^3-valued field f on grid nodes.
struct Immersion {
  GridPtr grid;
  VecField f;

  Immersion() = default;
  Immersion(GridPtr g, VecField values) : grid(std::move(g)), f(std::move(values)) {
    if (f.rows() != grid->nodes()) throw std::invalid_argument("Immersion: node count mismatch");
  }
};

/// Canonical test surfaces.
Immersion flat_square(int nu, int nv, double side = ParamGrid::kPi);
Immersion graph_surface(int nu, int nv, const std::function<double(double, double)>& height,
                        double side = ParamGrid::kPi);
Immersion torus_surface(int nu, int nv, double major_radius, double minor_radius);
/// Sphere patch away from the poles: theta in [theta0,theta1], phi in [phi0,phi1].
Immersion sphere_patch(int nu, int nv, double radius, double theta0, double theta1, double phi0,
                       double phi1);

}  // namespace shapegeo
