#pragma once

#include "shapegeo/geodesics.hpp"

#include <vector>

namespace shapegeo {

struct DiagnosticsRecord {
  double t = 0;
  double energy = 0;                          // G^P(f_t, f_t)
  Eigen::Vector3d linear_momentum{0, 0, 0};   // int P f_t vol(g)
  Eigen::Vector3d angular_momentum{0, 0, 0};  // int f x P f_t vol(g)
  double reparam_momentum_norm = 0;           // |g((P f_t)^top) vol(g)|
  double volume = 0;                          // Vol(f)
  double swept_area_cumulative = 0;
  double path_length_cumulative = 0;
};

double energy(const AssembledOperator& op, const VecField& f_t);
Eigen::Vector3d linear_momentum(const GeometryCache& cache, const VecField& P_f_t);
Eigen::Vector3d angular_momentum(const GeometryCache& cache, const VecField& P_f_t);

/// the one-form density  omega_l = <P f_t, d_l f> sqrt(det g)  per node
TanField reparam_momentum(const GeometryCache& cache, const VecField& P_f_t);
/// weighted norm of the tangential momentum: sqrt( sum w g^{kl} om_k om_l / det )
double reparam_momentum_norm(const GeometryCache& cache, const VecField& P_f_t);

/// per-frame diagnostics plus cumulative swept area / path length
/// (time quadrature: trapezoid over the frame times)
std::vector<DiagnosticsRecord> compute_diagnostics(const std::vector<GeodesicState>& trajectory,
                                                   const OperatorParams& params,
                                                   const SolverOptions& options = {});
std::vector<DiagnosticsRecord> compute_diagnostics(
    const std::vector<VectorMomentumState>& trajectory, const OperatorParams& params,
    const SolverOptions& options = {});

/// total area swept out: int_0^T int_M |f_t^perp| vol(g) dt
double swept_area(const std::vector<DiagnosticsRecord>& records);
/// total G^P path length
double path_length(const std::vector<DiagnosticsRecord>& records);

struct InequalityReport {
  bool holds = false;
  double lhs = 0, rhs = 0;
  double margin = 0;  // rhs - lhs
};

/// area-swept bound (C1 = 1):  swept area <= max_t sqrt(Vol) * path length
InequalityReport area_swept_bound_check(const std::vector<DiagnosticsRecord>& records,
                                        double slack = 0.0);

/// sqrt(Vol) Lipschitz bound (C2 = 1, valid for A >= 1, p = 1):
/// sqrt(Vol(end)) - sqrt(Vol(start)) <= 1/2 * path length
InequalityReport sqrt_vol_lipschitz_check(const std::vector<DiagnosticsRecord>& records,
                                          double slack = 0.0);

}  // namespace shapegeo
