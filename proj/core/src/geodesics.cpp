#include "shapegeo/geodesics.hpp"

#include <cmath>
#include <iostream>

namespace shapegeo {

namespace {

// Tr(g^{-1} X g^{-1} Y) per node for 2x2 node fields X (symmetric, stored
// 11/12/22) and Y (general, stored 11/12/21/22)
ScalarField trace_gi_sym_gi(const GeometryCache& c, const ScalarField& x11, const ScalarField& x12,
                            const ScalarField& x22, const ScalarField& y11, const ScalarField& y12,
                            const ScalarField& y21, const ScalarField& y22) {
  // a = g^{-1} X  (2x2 per node)
  const auto gi11 = c.gi11().array(), gi12 = c.gi12().array(), gi22 = c.gi22().array();
  const auto a11 = gi11 * x11.array() + gi12 * x12.array();
  const auto a12 = gi11 * x12.array() + gi12 * x22.array();
  const auto a21 = gi12 * x11.array() + gi22 * x12.array();
  const auto a22 = gi12 * x12.array() + gi22 * x22.array();
  // b = g^{-1} Y
  const auto b11 = gi11 * y11.array() + gi12 * y21.array();
  const auto b12 = gi11 * y12.array() + gi12 * y22.array();
  const auto b21 = gi12 * y11.array() + gi22 * y21.array();
  const auto b22 = gi12 * y12.array() + gi22 * y22.array();
  return (a11 * b11 + a12 * b21 + a21 * b12 + a22 * b22).matrix();
}

ScalarField dot_rows(const VecField& a, const VecField& b) {
  return (a.array() * b.array()).rowwise().sum().matrix();
}

void zero_dirichlet_boundary(const ParamGrid& grid, ScalarField& v) {
  if (grid.periodic()) return;
  const auto& mask = grid.interior_mask();
  for (int i = 0; i < v.size(); ++i)
    if (!mask[i]) v[i] = 0.0;
}

void zero_dirichlet_boundary(const ParamGrid& grid, VecField& v) {
  if (grid.periodic()) return;
  const auto& mask = grid.interior_mask();
  for (int i = 0; i < v.rows(); ++i)
    if (!mask[i]) v.row(i).setZero();
}

}  // namespace

VecField velocity_from_scalar_momentum(const AssembledOperator& op, const ScalarField& b) {
  const GeometryCache& c = op.cache();
  const ScalarField a = b.array() / c.sqrt_det().array();
  return op.solve_P(VecField(a.asDiagonal() * c.normal()));
}

ScalarField scalar_momentum_rhs_p1(const GeometryCache& cache, const VecField& f_t, double A) {
  const auto [ftu, ftv] = cache.gradient(f_t);
  const ScalarField C11 = dot_rows(ftu, ftu);
  const ScalarField C12 = dot_rows(ftu, ftv);
  const ScalarField C22 = dot_rows(ftv, ftv);
  const ScalarField g02 =
      trace_gi_sym_gi(cache, cache.s11(), cache.s12(), cache.s22(), C11, C12, C12, C22);
  const ScalarField trgC = (cache.gi11().array() * C11.array() +
                            2.0 * cache.gi12().array() * C12.array() +
                            cache.gi22().array() * C22.array())
                               .matrix();
  const ScalarField ft2 = dot_rows(f_t, f_t);
  return ((A * g02.array() - 0.5 * cache.trL().array() * (ft2.array() + A * trgC.array())) *
          cache.sqrt_det().array())
      .matrix();
}

ScalarField scalar_momentum_rhs_general(const GeometryCache& cache, const OperatorParams& params,
                                        const VecField& f_t) {
  params.validate();
  const double A = params.A;
  const int p = params.p;

  std::vector<VecField> lap;
  lap.reserve(p + 1);
  lap.push_back(f_t);
  for (int i = 0; i < p; ++i) lap.push_back(cache.laplace(lap.back()));
  const VecField Pft = f_t + A * lap[p];

  ScalarField term_s = ScalarField::Zero(f_t.rows());
  ScalarField term_div = ScalarField::Zero(f_t.rows());
  for (int i = 0; i < p; ++i) {
    const VecField& h1 = lap[p - i - 1];
    const VecField& h2 = lap[i];
    const auto [h1u, h1v] = cache.gradient(h1);
    const auto [h2u, h2v] = cache.gradient(h2);
    const ScalarField B11 = dot_rows(h1u, h2u);
    const ScalarField B12 = dot_rows(h1u, h2v);
    const ScalarField B21 = dot_rows(h1v, h2u);
    const ScalarField B22 = dot_rows(h1v, h2v);
    term_s += trace_gi_sym_gi(cache, cache.s11(), cache.s12(), cache.s22(), B11, B12, B21, B22);
    // omega_k = <d_k Delta^{p-i-1} f_t, Delta^i f_t>
    term_div += cache.coderivative(dot_rows(h1u, h2), dot_rows(h1v, h2));
  }

  const ScalarField Pftft = dot_rows(Pft, f_t);
  return ((A * term_s.array() + 0.5 * A * term_div.array() * cache.trL().array() -
           0.5 * Pftft.array() * cache.trL().array()) *
          cache.sqrt_det().array())
      .matrix();
}

VecField vector_momentum_rhs(const GeometryCache& cache, const OperatorParams& params,
                             const VecField& f_t) {
  params.validate();
  const double A = params.A;
  const int p = params.p;
  const int n = static_cast<int>(f_t.rows());

  std::vector<VecField> lap;
  lap.reserve(p + 1);
  lap.push_back(f_t);
  for (int i = 0; i < p; ++i) lap.push_back(cache.laplace(lap.back()));
  const VecField Pft = f_t + A * lap[p];

  const auto gi11 = cache.gi11().array(), gi12 = cache.gi12().array(),
             gi22 = cache.gi22().array();

  VecField rhs = VecField::Zero(n, 3);
  ScalarField term_div = ScalarField::Zero(n);
  for (int i = 0; i < p; ++i) {
    const VecField& h1 = lap[p - i - 1];
    const VecField& h2 = lap[i];
    const auto [h1u, h1v] = cache.gradient(h1);
    const auto [h2u, h2v] = cache.gradient(h2);
    const ScalarField B11 = dot_rows(h1u, h2u);
    const ScalarField B12 = dot_rows(h1u, h2v);
    const ScalarField B21 = dot_rows(h1v, h2u);
    const ScalarField B22 = dot_rows(h1v, h2v);
    // Tr(g^{-1} S g^{-1} B), R^3-valued through S
    const auto c11 = (gi11 * B11.array() + gi12 * B21.array()) * gi11 +
                     (gi11 * B12.array() + gi12 * B22.array()) * gi12;
    const auto c12 = (gi11 * B11.array() + gi12 * B21.array()) * gi12 +
                     (gi11 * B12.array() + gi12 * B22.array()) * gi22;
    const auto c21 = (gi12 * B11.array() + gi22 * B21.array()) * gi11 +
                     (gi12 * B12.array() + gi22 * B22.array()) * gi12;
    const auto c22 = (gi12 * B11.array() + gi22 * B21.array()) * gi12 +
                     (gi12 * B12.array() + gi22 * B22.array()) * gi22;
    // contraction S_{bc} * (g^{-1} B g^{-1})_{cb}
    rhs += A * ((c11 + 0.0).matrix().asDiagonal() * cache.S11());
    rhs += A * ((c12 + c21).matrix().asDiagonal() * cache.S12());
    rhs += A * ((c22 + 0.0).matrix().asDiagonal() * cache.S22());
    term_div += cache.coderivative(dot_rows(h1u, h2), dot_rows(h1v, h2));
  }

  const VecField trS = cache.mean_curvature_vector();
  const ScalarField Pftft = dot_rows(Pft, f_t);
  rhs += (0.5 * A * term_div).asDiagonal() * trS;
  rhs -= (0.5 * Pftft).asDiagonal() * trS;

  // tangential term -Tf.<P f_t, grad f_t>^sharp
  const auto [ftu, ftv] = cache.gradient(f_t);
  const ScalarField wu = dot_rows(Pft, ftu);
  const ScalarField wv = dot_rows(Pft, ftv);
  TanField sharp(n, 2);
  sharp.col(0) = (gi11 * wu.array() + gi12 * wv.array()).matrix();
  sharp.col(1) = (gi12 * wu.array() + gi22 * wv.array()).matrix();
  rhs -= cache.tangent_map(sharp);

  rhs.array().colwise() *= cache.sqrt_det().array();
  return rhs;
}

namespace {

struct HorizontalRhs {
  VecField df;   // f_t
  ScalarField db;
};

HorizontalRhs eval_horizontal_rhs(const GridPtr& grid, const VecField& f, const ScalarField& b,
                                  const SolverConfig& config) {
  auto cache = std::make_shared<const GeometryCache>(GeometryCache::build(Immersion{grid, f}));
  AssembledOperator op(cache, config.params, config.solver);
  VecField f_t = velocity_from_scalar_momentum(op, b);
  ScalarField db = config.params.p == 1
                       ? scalar_momentum_rhs_p1(*cache, f_t, config.params.A)
                       : scalar_momentum_rhs_general(*cache, config.params, f_t);
  zero_dirichlet_boundary(*grid, db);
  return {std::move(f_t), std::move(db)};
}

void maybe_warn_cfl(const GeodesicState& initial, const SolverConfig& config) {
  if (!config.warn_cfl) return;
  auto cache =
      std::make_shared<const GeometryCache>(GeometryCache::build(initial.f));
  AssembledOperator op(cache, config.params, config.solver);
  const VecField f_t = velocity_from_scalar_momentum(op, initial.b);
  const double vmax = f_t.rowwise().norm().maxCoeff();
  const double lmax = op.lambda_max_estimate();
  const double omega = vmax * std::sqrt(std::max(lmax, 0.0));
  if (omega * config.dt > 2.8)
    std::cerr << "shapegeo: warning: dt = " << config.dt
              << " exceeds the RK4 stability estimate " << 2.8 / omega
              << " (power-iteration lambda_max = " << lmax << ", max |f_t| = " << vmax << ")\n";
}

}  // namespace

std::vector<GeodesicState> integrate_horizontal_geodesic(const GeodesicState& initial,
                                                         const SolverConfig& config,
                                                         const FrameCallback& on_frame) {
  config.validate();
  const GridPtr grid = initial.f.grid;
  const int total = static_cast<int>(std::llround(config.t_final / config.dt));

  maybe_warn_cfl(initial, config);

  std::vector<GeodesicState> out;
  out.push_back(initial);
  if (on_frame) on_frame(initial);

  VecField f = initial.f.f;
  ScalarField b = initial.b;
  double t = initial.t;
  const double dt = config.dt;

  for (int k = 0; k < total; ++k) {
    try {
      if (config.integrator == Integrator::ExplicitEuler) {
        auto r = eval_horizontal_rhs(grid, f, b, config);
        f += dt * r.df;
        b += dt * r.db;
      } else {
        auto k1 = eval_horizontal_rhs(grid, f, b, config);
        auto k2 = eval_horizontal_rhs(grid, f + 0.5 * dt * k1.df, b + 0.5 * dt * k1.db, config);
        auto k3 = eval_horizontal_rhs(grid, f + 0.5 * dt * k2.df, b + 0.5 * dt * k2.db, config);
        auto k4 = eval_horizontal_rhs(grid, f + dt * k3.df, b + dt * k3.db, config);
        f += dt / 6.0 * (k1.df + 2.0 * k2.df + 2.0 * k3.df + k4.df);
        b += dt / 6.0 * (k1.db + 2.0 * k2.db + 2.0 * k3.db + k4.db);
      }
    } catch (const DegenerateImmersionError& e) {
      throw DegenerateImmersionError(std::string(e.what()) + " at t = " + std::to_string(t));
    }
    t = initial.t + (k + 1) * dt;
    if ((k + 1) % config.output_stride == 0 || k + 1 == total) {
      GeodesicState s{Immersion{grid, f}, b, t};
      if (on_frame) on_frame(s);
      out.push_back(std::move(s));
    }
  }
  return out;
}

namespace {

struct VectorRhs {
  VecField df;
  VecField dp;
};

VectorRhs eval_vector_rhs(const GridPtr& grid, const VecField& f, const VecField& pvec,
                          const SolverConfig& config) {
  auto cache = std::make_shared<const GeometryCache>(GeometryCache::build(Immersion{grid, f}));
  AssembledOperator op(cache, config.params, config.solver);
  VecField rhs_p = pvec;
  rhs_p.array().colwise() /= cache->sqrt_det().array();
  VecField f_t = op.solve_P(rhs_p);
  VecField dp = vector_momentum_rhs(*cache, config.params, f_t);
  zero_dirichlet_boundary(*grid, dp);
  return {std::move(f_t), std::move(dp)};
}

}  // namespace

std::vector<VectorMomentumState> integrate_immersion_geodesic(const VectorMomentumState& initial,
                                                              const SolverConfig& config,
                                                              const VectorFrameCallback& on_frame) {
  config.validate();
  const GridPtr grid = initial.f.grid;
  const int total = static_cast<int>(std::llround(config.t_final / config.dt));

  std::vector<VectorMomentumState> out;
  out.push_back(initial);
  if (on_frame) on_frame(initial);

  VecField f = initial.f.f;
  VecField pv = initial.pvec;
  double t = initial.t;
  const double dt = config.dt;

  for (int k = 0; k < total; ++k) {
    try {
      if (config.integrator == Integrator::ExplicitEuler) {
        auto r = eval_vector_rhs(grid, f, pv, config);
        f += dt * r.df;
        pv += dt * r.dp;
      } else {
        auto k1 = eval_vector_rhs(grid, f, pv, config);
        auto k2 = eval_vector_rhs(grid, f + 0.5 * dt * k1.df, pv + 0.5 * dt * k1.dp, config);
        auto k3 = eval_vector_rhs(grid, f + 0.5 * dt * k2.df, pv + 0.5 * dt * k2.dp, config);
        auto k4 = eval_vector_rhs(grid, f + dt * k3.df, pv + dt * k3.dp, config);
        f += dt / 6.0 * (k1.df + 2.0 * k2.df + 2.0 * k3.df + k4.df);
        pv += dt / 6.0 * (k1.dp + 2.0 * k2.dp + 2.0 * k3.dp + k4.dp);
      }
    } catch (const DegenerateImmersionError& e) {
      throw DegenerateImmersionError(std::string(e.what()) + " at t = " + std::to_string(t));
    }
    t = initial.t + (k + 1) * dt;
    if ((k + 1) % config.output_stride == 0 || k + 1 == total) {
      VectorMomentumState s{Immersion{grid, f}, pv, t};
      if (on_frame) on_frame(s);
      out.push_back(std::move(s));
    }
  }
  return out;
}

double interpolate(const ParamGrid& grid, const ScalarField& field, double u, double v,
                   bool* clamped) {
  const int nu = grid.nu(), nv = grid.nv();
  double su = u / grid.hu();
  double sv = v / grid.hv();
  int i0, j0;
  double fu, fv;
  if (grid.periodic()) {
    su = std::fmod(su, static_cast<double>(nu));
    if (su < 0) su += nu;
    sv = std::fmod(sv, static_cast<double>(nv));
    if (sv < 0) sv += nv;
    i0 = static_cast<int>(su) % nu;
    j0 = static_cast<int>(sv) % nv;
    fu = su - std::floor(su);
    fv = sv - std::floor(sv);
  } else {
    if (su < 0 || su > nu - 1 || sv < 0 || sv > nv - 1) {
      if (clamped) *clamped = true;
      su = std::clamp(su, 0.0, static_cast<double>(nu - 1));
      sv = std::clamp(sv, 0.0, static_cast<double>(nv - 1));
    }
    i0 = std::min(static_cast<int>(su), nu - 2);
    j0 = std::min(static_cast<int>(sv), nv - 2);
    fu = su - i0;
    fv = sv - j0;
  }
  const int i1 = (i0 + 1) % nu, j1 = (j0 + 1) % nv;
  return (1 - fu) * (1 - fv) * field[grid.node(i0, j0)] + fu * (1 - fv) * field[grid.node(i1, j0)] +
         (1 - fu) * fv * field[grid.node(i0, j1)] + fu * fv * field[grid.node(i1, j1)];
}

Eigen::Vector3d interpolate(const ParamGrid& grid, const VecField& field, double u, double v,
                            bool* clamped) {
  Eigen::Vector3d out;
  for (int c = 0; c < 3; ++c) out[c] = interpolate(grid, ScalarField(field.col(c)), u, v, clamped);
  return out;
}

HorizontalLiftResult horizontal_lift(const std::vector<Immersion>& path, double dt,
                                     const OperatorParams& params, const SolverOptions& options) {
  if (path.size() < 2) throw std::invalid_argument("horizontal_lift: need at least two frames");
  const GridPtr grid = path.front().grid;
  const int n = grid->nodes();

  HorizontalLiftResult result;
  result.xi.reserve(path.size() - 1);
  result.lifted_f.reserve(path.size());

  // particle positions in the parameter domain, phi_0 = id
  std::vector<Eigen::Vector2d> phi(n);
  for (int i = 0; i < grid->nu(); ++i)
    for (int j = 0; j < grid->nv(); ++j)
      phi[grid->node(i, j)] = {grid->u_of(i), grid->v_of(j)};

  result.lifted_f.push_back(path.front().f);

  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    auto cache = std::make_shared<const GeometryCache>(GeometryCache::build(path[k]));
    AssembledOperator op(cache, params, options);
    const VecField dfdt = (path[k + 1].f - path[k].f) / dt;
    const TanField tail = cache->tangential_part(op.apply_P(dfdt));
    TanField xi = -op.solve_P_top(tail);
    result.xi.push_back(xi);

    bool clamped = false;
    for (int idx = 0; idx < n; ++idx) {
      const double xu = interpolate(*grid, ScalarField(xi.col(0)), phi[idx][0], phi[idx][1], &clamped);
      const double xv = interpolate(*grid, ScalarField(xi.col(1)), phi[idx][0], phi[idx][1], &clamped);
      phi[idx][0] += dt * xu;
      phi[idx][1] += dt * xv;
    }
    VecField lifted(n, 3);
    for (int idx = 0; idx < n; ++idx) {
      bool cl = false;
      lifted.row(idx) = interpolate(*grid, path[k + 1].f, phi[idx][0], phi[idx][1], &cl);
      if (cl) ++result.clamped_nodes;
    }
    result.lifted_f.push_back(std::move(lifted));
  }
  return result;
}

}  // namespace shapegeo
