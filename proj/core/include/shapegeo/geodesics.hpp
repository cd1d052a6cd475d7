#pragma once

#include "shapegeo/metric_operator.hpp"

#include <functional>
#include <vector>

namespace shapegeo {

/// State of a horizontal geodesic: the surface f and the scalar momentum
/// density b = a * sqrt(det g) in chart coordinates, where P f_t = a nu.
struct GeodesicState {
  Immersion f;
  ScalarField b;
  double t = 0.0;
};

/// State of a general immersion-space geodesic: vector momentum density
/// pvec = (P f_t) * sqrt(det g).
struct VectorMomentumState {
  Immersion f;
  VecField pvec;
  double t = 0.0;
};

enum class Integrator { Rk4, ExplicitEuler };

struct SolverConfig {
  OperatorParams params;
  double dt = 0.05;
  double t_final = 5.0;
  Integrator integrator = Integrator::Rk4;
  SolverOptions solver;
  int output_stride = 1;
  bool warn_cfl = true;

  void validate() const {
    params.validate();
    if (dt <= 0) throw std::invalid_argument("SolverConfig: dt must be > 0");
    if (t_final < 0) throw std::invalid_argument("SolverConfig: t_final must be >= 0");
    if (output_stride < 1) throw std::invalid_argument("SolverConfig: stride must be >= 1");
  }
};

/// f_t from the scalar momentum: solves P f_t = (b / sqrt(det g)) nu.
VecField velocity_from_scalar_momentum(const AssembledOperator& op, const ScalarField& b);

/// d/dt b for p = 1 (the hypersurface form):
///   (A g02(s, <grad f_t, grad f_t>) - TrL/2 (|f_t|^2 + A |grad f_t|^2_g)) sqrt(det g)
ScalarField scalar_momentum_rhs_p1(const GeometryCache& cache, const VecField& f_t, double A);

/// d/dt b for general p >= 1: the p-term sums with iterated Laplacians,
/// contracted against nu; reduces to the p=1 form up to O(h^2).
ScalarField scalar_momentum_rhs_general(const GeometryCache& cache, const OperatorParams& params,
                                        const VecField& f_t);

/// d/dt pvec for the full immersion-space equation (includes the tangential
/// terms); pvec in chart density form.
VecField vector_momentum_rhs(const GeometryCache& cache, const OperatorParams& params,
                             const VecField& f_t);

using FrameCallback = std::function<void(const GeodesicState&)>;
using VectorFrameCallback = std::function<void(const VectorMomentumState&)>;

/// Integrates the horizontal geodesic IVP; returns states every
/// `output_stride` steps (initial state included).  Aborts with
/// DegenerateImmersionError carrying the failure time if the metric
/// degenerates; self-intersections are not detected and do not abort.
std::vector<GeodesicState> integrate_horizontal_geodesic(const GeodesicState& initial,
                                                         const SolverConfig& config,
                                                         const FrameCallback& on_frame = {});

std::vector<VectorMomentumState> integrate_immersion_geodesic(const VectorMomentumState& initial,
                                                              const SolverConfig& config,
                                                              const VectorFrameCallback& on_frame = {});

struct HorizontalLiftResult {
  std::vector<TanField> xi;        // reparametrizing field per input step
  std::vector<VecField> lifted_f;  // the reparametrized path f(t, phi(t,x))
  int clamped_nodes = 0;           // interpolation points clamped to the domain
};

/// Lifts a path of immersions to a horizontal path: per step solves
/// xi = -(P^T)^{-1}((P df/dt)^top) and transports the grid along xi
/// (explicit Euler, bilinear interpolation).
HorizontalLiftResult horizontal_lift(const std::vector<Immersion>& path, double dt,
                                     const OperatorParams& params, const SolverOptions& options = {});

/// bilinear sample of a field at parameter point (u,v); periodic wrap or
/// clamp-to-domain depending on the grid boundary
double interpolate(const ParamGrid& grid, const ScalarField& field, double u, double v,
                   bool* clamped = nullptr);
Eigen::Vector3d interpolate(const ParamGrid& grid, const VecField& field, double u, double v,
                            bool* clamped = nullptr);

}  // namespace shapegeo
