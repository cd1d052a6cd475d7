#pragma once

#include "shapegeo/geometry.hpp"
#include "shapegeo/metric_operator.hpp"

#include <functional>
#include <vector>

namespace shapegeo {

/// Scalar geodesic ODE on the space of concentric (n-1)-spheres in R^n:
///   r_tt = -r_t^2 ( (n-1)/(2r) - p A (n-1)^p / (r (r^{2p} + A (n-1)^p)) )
struct SphereTrajectory {
  std::vector<double> t, r, r_dot;
  bool collapsed = false;   // integration stopped because r would cross 0
  double collapse_time = 0; // valid when collapsed
};

SphereTrajectory sphere_geodesic_ode(double r0, double rdot0, const OperatorParams& params,
                                     int ambient_dim, double dt, double t_final);

/// surface volume of the radius-r sphere: r^{n-1} n pi^{n/2} / Gamma(n/2+1)
double sphere_volume(double r, int ambient_dim);

/// conserved energy r_t^2 (1 + A (n-1)^p / r^{2p}) Vol(r)
double sphere_energy(double r, double r_dot, const OperatorParams& params, int ambient_dim);

/// G^P path length of the radial segment between r0 and r1:
///   sqrt(n pi^{n/2}/Gamma(n/2+1)) * int sqrt((1 + A(n-1)^p/r^{2p}) r^{n-1}) dr
double sphere_path_length(double r0, double r1, const OperatorParams& params, int ambient_dim,
                          double tol = 1e-11);

struct CompletenessReport {
  bool complete = false;
  /// tail increments I_k = L(10^{-k}, 1) - L(10^{-k+1}, 1)
  std::vector<double> increments;
  double increment_ratio = 0;  // I_last / I_first
};

/// Divergence test on sphere_path_length: the space of concentric spheres is
/// complete iff the length down to radius zero diverges (iff p >= (n+1)/2).
CompletenessReport classify_sphere_completeness(const OperatorParams& params, int ambient_dim,
                                                int decades = 6);

/// Base-path data for the vanishing-distance zig-zag construction: an
/// H^0-horizontal path with pointwise speed |f_t|, a surrogate Morse function
/// alpha in [0,1] and its gradient norm |d alpha|_g, integrated against the
/// base volume density.
struct ZigzagBasePath {
  GridPtr grid;
  ScalarField mass;         // quadrature weights * vol density * cell area
  ScalarField alpha;        // in [0,1]
  ScalarField dalpha_norm;  // |d alpha|_g per node
  std::function<double(double t, int node)> speed;  // |f_t|(t, x)
};

/// unit-speed normal translation of the flat square, alpha = u/pi
ZigzagBasePath default_zigzag_path(int nu = 2049, int nv = 3);

/// the reparametrization profile of the zig-zag construction and its partials
double zigzag_phi(double t, double alpha, int n_zigzag);
double zigzag_phi_t(double t, double alpha, int n_zigzag);
double zigzag_phi_alpha(double t, double alpha, int n_zigzag);

/// L^hor of the zig-zagged path: int_0^1 sqrt( int_M phi_t^2 |f_t|^2 /
/// sqrt(1 + phi_alpha^2 |dalpha|^2 |f_t|^2) vol(g) ) dt
double zigzag_horizontal_length(const ZigzagBasePath& path, int n_zigzag, int time_panels = 1024);

/// G^P length of the pure scaling path r.f0, r from 1 down to r_floor:
///   int_{r_floor}^1 sqrt( int_M <(1 + A r^{-2p} Delta^p) f0, f0> r^m vol(g0) ) dr
double scaling_path_length(const Immersion& f0, const OperatorParams& params, double r_floor,
                           double tol = 1e-10);

/// G^P cost of translating the r0-scaled surface by distance ell:
/// ell * sqrt(r0^m Vol(f0))  (the Laplacian annihilates constant fields)
double scaled_translation_cost(const Immersion& f0, double r0, double ell);

/// total shrink-translate-grow cost: 2 L(r_floor) + translation at r_floor
double shrink_translate_grow_cost(const Immersion& f0, const OperatorParams& params,
                                  double r_floor, double ell);

}  // namespace shapegeo
