#pragma once

#include "shapegeo/grid.hpp"

#include <array>
#include <cstdint>

namespace shapegeo {

/// All derived geometry of one immersion f: pullback metric and inverse,
/// volume density, Christoffel symbols, second fundamental form S, unit
/// normal, scalar second fundamental form s, Weingarten map L and the mean
/// curvature Tr L, plus the assembled mass/stiffness pair behind the
/// Laplace-Beltrami operator.
///
/// Everything is value-semantic and immutable after build(); instances can be
/// shared freely across threads.
///
/// Index conventions: symmetric 2x2 node fields are stored as three scalar
/// fields (11, 12, 22); the Weingarten map is stored with all four entries
/// since g^{-1} s need not be symmetric as a matrix.
class GeometryCache {
 public:
  /// Builds every field.  Throws DegenerateImmersionError when
  /// det g <= eps_rel * median(det g) at any node.
  static GeometryCache build(const Immersion& immersion, double eps_rel = 1e-12);

  const GridPtr& grid() const { return grid_; }
  const VecField& f() const { return f_; }
  /// FNV-1a hash of the raw node positions; identifies the immersion a
  /// downstream assembled operator was built from.
  std::uint64_t fingerprint() const { return fingerprint_; }

  const VecField& fu() const { return fu_; }
  const VecField& fv() const { return fv_; }

  const ScalarField& g11() const { return g11_; }
  const ScalarField& g12() const { return g12_; }
  const ScalarField& g22() const { return g22_; }
  const ScalarField& gi11() const { return gi11_; }
  const ScalarField& gi12() const { return gi12_; }
  const ScalarField& gi22() const { return gi22_; }
  const ScalarField& det() const { return det_; }
  const ScalarField& sqrt_det() const { return sqrt_det_; }

  /// Gamma^k_{ij}; symmetric in (i,j).  christoffel(k,i,j) with indices in {0,1}.
  const ScalarField& christoffel(int k, int i, int j) const { return gamma_[k][i][j]; }

  const VecField& S11() const { return S11_; }
  const VecField& S12() const { return S12_; }
  const VecField& S22() const { return S22_; }
  const VecField& normal() const { return normal_; }
  const ScalarField& s11() const { return s11_; }
  const ScalarField& s12() const { return s12_; }
  const ScalarField& s22() const { return s22_; }
  /// Weingarten map L = g^{-1} s, row-major 2x2 per node.
  const ScalarField& L(int a, int b) const { return weingarten_[a][b]; }
  const ScalarField& trL() const { return trL_; }
  /// Vector mean curvature Tr^g(S) = g^{ij} S_ij per node.
  VecField mean_curvature_vector() const;

  /// diag of the discrete H^0 mass: trapezoid weight * sqrt(det g) * hu*hv
  const ScalarField& mass() const { return mass_; }
  /// flux-form stiffness K (symmetric, PSD); Delta = M^{-1} K
  const SparseMat& stiffness() const { return stiffness_; }

  /// total surface area Vol(f)
  double volume() const { return mass_.sum(); }

  ScalarField laplace(const ScalarField& phi) const;
  /// componentwise Laplace-Beltrami, positive (Bochner) sign convention
  VecField laplace(const VecField& h) const;

  /// discrete H^0 product: sum <h,k> * mass
  double h0_inner(const VecField& h, const VecField& k) const;
  double h0_inner(const ScalarField& h, const ScalarField& k) const;

  /// nodal gradient of each Cartesian component (flat-ambient covariant
  /// derivative of a field along f): pair (d_u h, d_v h)
  std::pair<VecField, VecField> gradient(const VecField& h) const;
  std::pair<ScalarField, ScalarField> gradient(const ScalarField& phi) const;

  /// adjoint of the nodal gradient in the weighted product:
  /// div* omega = M^{-1} (du^T, dv^T) W omega  with  W = mass * g^{-1}
  ScalarField coderivative(const ScalarField& omega_u, const ScalarField& omega_v) const;

  /// h = Tf.h_top + h_perp with <h_perp, d_i f> = 0 per node
  std::pair<TanField, VecField> split_tangent_normal(const VecField& h) const;
  /// Tf.X = X^1 du f + X^2 dv f
  VecField tangent_map(const TanField& X) const;
  /// (h)^top per node: g^{kl} <h, d_l f>
  TanField tangential_part(const VecField& h) const;

 private:
  GridPtr grid_;
  VecField f_, fu_, fv_;
  std::uint64_t fingerprint_ = 0;
  ScalarField g11_, g12_, g22_, gi11_, gi12_, gi22_, det_, sqrt_det_;
  std::array<std::array<std::array<ScalarField, 2>, 2>, 2> gamma_;
  VecField S11_, S12_, S22_, normal_;
  ScalarField s11_, s12_, s22_;
  std::array<std::array<ScalarField, 2>, 2> weingarten_;
  ScalarField trL_;
  ScalarField mass_;
  SparseMat stiffness_;
};

}  // namespace shapegeo
