#include "shapegeo/geometry.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <vector>

namespace shapegeo {

namespace {

std::uint64_t fnv1a(const double* data, std::size_t count) {
  std::uint64_t h = 1469598103934665603ull;
  const auto* bytes = reinterpret_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < count * sizeof(double); ++i) {
    h ^= bytes[i];
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

GeometryCache GeometryCache::build(const Immersion& immersion, double eps_rel) {
  GeometryCache c;
  c.grid_ = immersion.grid;
  c.f_ = immersion.f;
  const ParamGrid& grid = *c.grid_;
  const int n = grid.nodes();
  c.fingerprint_ = fnv1a(c.f_.data(), static_cast<std::size_t>(c.f_.size()));

  c.fu_ = grid.du() * c.f_;
  c.fv_ = grid.dv() * c.f_;

  c.g11_ = c.fu_.rowwise().squaredNorm();
  c.g12_ = (c.fu_.array() * c.fv_.array()).rowwise().sum();
  c.g22_ = c.fv_.rowwise().squaredNorm();
  c.det_ = c.g11_.array() * c.g22_.array() - c.g12_.array().square();

  {
    ScalarField sorted = c.det_;
    std::nth_element(sorted.data(), sorted.data() + n / 2, sorted.data() + n);
    const double med = sorted[n / 2];
    const double floor = eps_rel * std::max(med, 0.0);
    for (int i = 0; i < n; ++i)
      if (!(c.det_[i] > floor))
        throw DegenerateImmersionError("degenerate immersion: det g = " +
                                       std::to_string(c.det_[i]) + " at node " + std::to_string(i));
  }
  c.sqrt_det_ = c.det_.array().sqrt();
  c.gi11_ = c.g22_.array() / c.det_.array();
  c.gi12_ = -c.g12_.array() / c.det_.array();
  c.gi22_ = c.g11_.array() / c.det_.array();

  // normal from the coordinate tangents
  c.normal_.resize(n, 3);
  for (int i = 0; i < n; ++i) {
    Eigen::Vector3d cr = Eigen::Vector3d(c.fu_.row(i)).cross(Eigen::Vector3d(c.fv_.row(i)));
    c.normal_.row(i) = cr / cr.norm();
  }

  // Christoffel symbols from the Koszul formula on the discrete metric
  const ScalarField du_g11 = grid.du() * c.g11_, dv_g11 = grid.dv() * c.g11_;
  const ScalarField du_g12 = grid.du() * c.g12_, dv_g12 = grid.dv() * c.g12_;
  const ScalarField du_g22 = grid.du() * c.g22_, dv_g22 = grid.dv() * c.g22_;
  auto dg = [&](int i, int j, int k) -> const ScalarField& {
    // d_i g_{jk}, indices 0=u,1=v
    const int jk = j + k;  // 0 -> g11, 1 -> g12, 2 -> g22
    if (i == 0) return jk == 0 ? du_g11 : (jk == 1 ? du_g12 : du_g22);
    return jk == 0 ? dv_g11 : (jk == 1 ? dv_g12 : dv_g22);
  };
  std::array<std::array<std::array<ScalarField, 2>, 2>, 2> lower;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int l = 0; l < 2; ++l)
        lower[i][j][l] = 0.5 * (dg(i, j, l) + dg(j, i, l) - dg(l, i, j));
  auto gi = [&](int a, int b) -> const ScalarField& {
    if (a == 0 && b == 0) return c.gi11_;
    if (a == 1 && b == 1) return c.gi22_;
    return c.gi12_;
  };
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        c.gamma_[k][i][j] =
            gi(k, 0).array() * lower[i][j][0].array() + gi(k, 1).array() * lower[i][j][1].array();

  // S_ij = d2_ij f - Gamma^k_ij d_k f  (flat ambient)
  const VecField fuu = grid.d2u() * c.f_;
  const VecField fvv = grid.d2v() * c.f_;
  const VecField fuv = grid.du() * c.fv_;
  auto subtract_tangential = [&](const VecField& second, int i, int j) {
    VecField out = second;
    out.noalias() -= c.gamma_[0][i][j].asDiagonal() * c.fu_;
    out.noalias() -= c.gamma_[1][i][j].asDiagonal() * c.fv_;
    return out;
  };
  c.S11_ = subtract_tangential(fuu, 0, 0);
  c.S12_ = subtract_tangential(fuv, 0, 1);
  c.S22_ = subtract_tangential(fvv, 1, 1);

  c.s11_ = (c.S11_.array() * c.normal_.array()).rowwise().sum();
  c.s12_ = (c.S12_.array() * c.normal_.array()).rowwise().sum();
  c.s22_ = (c.S22_.array() * c.normal_.array()).rowwise().sum();

  c.weingarten_[0][0] = c.gi11_.array() * c.s11_.array() + c.gi12_.array() * c.s12_.array();
  c.weingarten_[0][1] = c.gi11_.array() * c.s12_.array() + c.gi12_.array() * c.s22_.array();
  c.weingarten_[1][0] = c.gi12_.array() * c.s11_.array() + c.gi22_.array() * c.s12_.array();
  c.weingarten_[1][1] = c.gi12_.array() * c.s12_.array() + c.gi22_.array() * c.s22_.array();
  c.trL_ = c.weingarten_[0][0] + c.weingarten_[1][1];

  c.mass_ = grid.quad_weight().array() * c.sqrt_det_.array() * grid.cell_area();

  // flux-form stiffness: half-point fluxes for the diagonal metric terms,
  // node-centered pair for the cross term (skipped when g12 vanishes).
  const ScalarField coeff_u = c.sqrt_det_.array() * c.gi11_.array() * grid.cell_area();
  const ScalarField coeff_v = c.sqrt_det_.array() * c.gi22_.array() * grid.cell_area();
  const ScalarField cu_half = grid.avg_u() * coeff_u;
  const ScalarField cv_half = grid.avg_v() * coeff_v;
  SparseMat K = SparseMat(grid.fwd_u().transpose()) * cu_half.asDiagonal() * grid.fwd_u();
  K += SparseMat(grid.fwd_v().transpose()) * cv_half.asDiagonal() * grid.fwd_v();
  const ScalarField cx = grid.quad_weight().array() * c.sqrt_det_.array() * c.gi12_.array() *
                         grid.cell_area();
  if (cx.cwiseAbs().maxCoeff() > 1e-14 * coeff_u.cwiseAbs().maxCoeff()) {
    const SparseMat duT = grid.du().transpose();
    const SparseMat dvT = grid.dv().transpose();
    K += duT * cx.asDiagonal() * grid.dv();
    K += dvT * cx.asDiagonal() * grid.du();
  }
  K.makeCompressed();
  c.stiffness_ = std::move(K);
  return c;
}

VecField GeometryCache::mean_curvature_vector() const {
  VecField out = gi11_.asDiagonal() * S11_;
  out.noalias() += gi22_.asDiagonal() * S22_;
  out.noalias() += (2.0 * gi12_).asDiagonal() * S12_;
  return out;
}

ScalarField GeometryCache::laplace(const ScalarField& phi) const {
  return (stiffness_ * phi).array() / mass_.array();
}

VecField GeometryCache::laplace(const VecField& h) const {
  VecField out = stiffness_ * h;
  out.array().colwise() /= mass_.array();
  return out;
}

double GeometryCache::h0_inner(const VecField& h, const VecField& k) const {
  return ((h.array() * k.array()).rowwise().sum() * mass_.array()).sum();
}

double GeometryCache::h0_inner(const ScalarField& h, const ScalarField& k) const {
  return (h.array() * k.array() * mass_.array()).sum();
}

std::pair<VecField, VecField> GeometryCache::gradient(const VecField& h) const {
  return {grid_->du() * h, grid_->dv() * h};
}

std::pair<ScalarField, ScalarField> GeometryCache::gradient(const ScalarField& phi) const {
  return {grid_->du() * phi, grid_->dv() * phi};
}

ScalarField GeometryCache::coderivative(const ScalarField& omega_u,
                                        const ScalarField& omega_v) const {
  const ScalarField qu =
      mass_.array() * (gi11_.array() * omega_u.array() + gi12_.array() * omega_v.array());
  const ScalarField qv =
      mass_.array() * (gi12_.array() * omega_u.array() + gi22_.array() * omega_v.array());
  ScalarField out = grid_->du().transpose() * qu;
  out.noalias() += grid_->dv().transpose() * qv;
  return out.array() / mass_.array();
}

TanField GeometryCache::tangential_part(const VecField& h) const {
  const ScalarField hu = (h.array() * fu_.array()).rowwise().sum();
  const ScalarField hv = (h.array() * fv_.array()).rowwise().sum();
  TanField X(h.rows(), 2);
  X.col(0) = gi11_.array() * hu.array() + gi12_.array() * hv.array();
  X.col(1) = gi12_.array() * hu.array() + gi22_.array() * hv.array();
  return X;
}

VecField GeometryCache::tangent_map(const TanField& X) const {
  VecField out = X.col(0).asDiagonal() * fu_;
  out.noalias() += X.col(1).asDiagonal() * fv_;
  return out;
}

std::pair<TanField, VecField> GeometryCache::split_tangent_normal(const VecField& h) const {
  TanField X = tangential_part(h);
  VecField perp = h - tangent_map(X);
  return {std::move(X), std::move(perp)};
}

}  // namespace shapegeo
