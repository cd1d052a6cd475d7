#include "shapegeo/diagnostics.hpp"

#include <Eigen/Geometry>

#include <cmath>

namespace shapegeo {

double energy(const AssembledOperator& op, const VecField& f_t) { return op.gp_inner(f_t, f_t); }

Eigen::Vector3d linear_momentum(const GeometryCache& cache, const VecField& P_f_t) {
  return (cache.mass().asDiagonal() * P_f_t).colwise().sum();
}

Eigen::Vector3d angular_momentum(const GeometryCache& cache, const VecField& P_f_t) {
  Eigen::Vector3d out = Eigen::Vector3d::Zero();
  const VecField& f = cache.f();
  for (int i = 0; i < f.rows(); ++i)
    out += cache.mass()[i] *
           Eigen::Vector3d(f.row(i)).cross(Eigen::Vector3d(P_f_t.row(i)));
  return out;
}

TanField reparam_momentum(const GeometryCache& cache, const VecField& P_f_t) {
  TanField om(P_f_t.rows(), 2);
  om.col(0) = (P_f_t.array() * cache.fu().array()).rowwise().sum() * cache.sqrt_det().array();
  om.col(1) = (P_f_t.array() * cache.fv().array()).rowwise().sum() * cache.sqrt_det().array();
  return om;
}

double reparam_momentum_norm(const GeometryCache& cache, const VecField& P_f_t) {
  const TanField om = reparam_momentum(cache, P_f_t);
  const auto ou = om.col(0).array() / cache.sqrt_det().array();
  const auto ov = om.col(1).array() / cache.sqrt_det().array();
  const auto q = cache.gi11().array() * ou.square() + 2.0 * cache.gi12().array() * ou * ov +
                 cache.gi22().array() * ov.square();
  return std::sqrt(std::max(0.0, (q * cache.mass().array()).sum()));
}

namespace {

struct FrameQuantities {
  DiagnosticsRecord rec;
  double normal_speed_integral = 0;  // int |f_t^perp| vol
};

FrameQuantities frame_quantities(const Immersion& f, const VecField& P_f_t, const VecField& f_t,
                                 const GeometryCache& cache) {
  FrameQuantities q;
  q.rec.energy = cache.h0_inner(P_f_t, f_t);
  q.rec.linear_momentum = linear_momentum(cache, P_f_t);
  q.rec.angular_momentum = angular_momentum(cache, P_f_t);
  q.rec.reparam_momentum_norm = reparam_momentum_norm(cache, P_f_t);
  q.rec.volume = cache.volume();
  auto [top, perp] = cache.split_tangent_normal(f_t);
  q.normal_speed_integral = (perp.rowwise().norm().array() * cache.mass().array()).sum();
  (void)f;
  return q;
}

template <typename State, typename GetPt>
std::vector<DiagnosticsRecord> diagnostics_impl(const std::vector<State>& trajectory,
                                                const OperatorParams& params,
                                                const SolverOptions& options, GetPt get_p) {
  std::vector<DiagnosticsRecord> out;
  out.reserve(trajectory.size());
  double swept = 0, length = 0;
  double prev_speed = 0, prev_rate = 0, prev_t = 0;
  for (std::size_t k = 0; k < trajectory.size(); ++k) {
    const State& st = trajectory[k];
    auto cache = std::make_shared<const GeometryCache>(GeometryCache::build(st.f));
    AssembledOperator op(cache, params, options);
    const VecField P_f_t = get_p(st, *cache);
    VecField rhs = P_f_t;
    const VecField f_t = op.solve_P(rhs);
    FrameQuantities q = frame_quantities(st.f, P_f_t, f_t, *cache);
    q.rec.t = st.t;
    const double speed = std::sqrt(std::max(0.0, q.rec.energy));
    if (k > 0) {
      const double dt = st.t - prev_t;
      swept += 0.5 * dt * (prev_rate + q.normal_speed_integral);
      length += 0.5 * dt * (prev_speed + speed);
    }
    q.rec.swept_area_cumulative = swept;
    q.rec.path_length_cumulative = length;
    prev_speed = speed;
    prev_rate = q.normal_speed_integral;
    prev_t = st.t;
    out.push_back(q.rec);
  }
  return out;
}

}  // namespace

std::vector<DiagnosticsRecord> compute_diagnostics(const std::vector<GeodesicState>& trajectory,
                                                   const OperatorParams& params,
                                                   const SolverOptions& options) {
  // horizontal states: P f_t = (b / sqrt det) nu by construction
  return diagnostics_impl(trajectory, params, options,
                          [](const GeodesicState& st, const GeometryCache& cache) -> VecField {
                            const ScalarField a = st.b.array() / cache.sqrt_det().array();
                            return a.asDiagonal() * cache.normal();
                          });
}

std::vector<DiagnosticsRecord> compute_diagnostics(
    const std::vector<VectorMomentumState>& trajectory, const OperatorParams& params,
    const SolverOptions& options) {
  return diagnostics_impl(trajectory, params, options,
                          [](const VectorMomentumState& st, const GeometryCache& cache) -> VecField {
                            VecField p = st.pvec;
                            p.array().colwise() /= cache.sqrt_det().array();
                            return p;
                          });
}

double swept_area(const std::vector<DiagnosticsRecord>& records) {
  return records.empty() ? 0.0 : records.back().swept_area_cumulative;
}

double path_length(const std::vector<DiagnosticsRecord>& records) {
  return records.empty() ? 0.0 : records.back().path_length_cumulative;
}

InequalityReport area_swept_bound_check(const std::vector<DiagnosticsRecord>& records,
                                        double slack) {
  InequalityReport rep;
  double max_sqrt_vol = 0;
  for (const auto& r : records) max_sqrt_vol = std::max(max_sqrt_vol, std::sqrt(r.volume));
  rep.lhs = swept_area(records);
  rep.rhs = max_sqrt_vol * path_length(records) + slack;
  rep.margin = rep.rhs - rep.lhs;
  rep.holds = rep.lhs <= rep.rhs;
  return rep;
}

InequalityReport sqrt_vol_lipschitz_check(const std::vector<DiagnosticsRecord>& records,
                                          double slack) {
  InequalityReport rep;
  if (records.empty()) return rep;
  rep.lhs = std::abs(std::sqrt(records.back().volume) - std::sqrt(records.front().volume));
  rep.rhs = 0.5 * path_length(records) + slack;
  rep.margin = rep.rhs - rep.lhs;
  rep.holds = rep.lhs <= rep.rhs;
  return rep;
}

}  // namespace shapegeo
