#include "shapegeo/analytic_models.hpp"

#include <cmath>

namespace shapegeo {

namespace {

double sphere_rtt(double r, double rdot, double A, int p, int n) {
  const double E = n - 1;
  const double Ep = std::pow(E, p);
  return -rdot * rdot * (E / (2 * r) - p * A * Ep / (r * (std::pow(r, 2 * p) + A * Ep)));
}

// adaptive Simpson with absolute+relative tolerance
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                        double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0) throw SolveError("adaptive quadrature did not converge");
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  if (a == b) return 0.0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4 * fm + fb);
  const double scale = std::max({std::abs(whole), std::abs(b - a), 1.0});
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol * scale, 48);
}

}  // namespace

SphereTrajectory sphere_geodesic_ode(double r0, double rdot0, const OperatorParams& params,
                                     int ambient_dim, double dt, double t_final) {
  params.validate();
  if (r0 <= 0) throw std::invalid_argument("sphere_geodesic_ode: r0 must be > 0");
  const double A = params.A;
  const int p = params.p, n = ambient_dim;

  SphereTrajectory out;
  double r = r0, v = rdot0, t = 0.0;
  out.t.push_back(t);
  out.r.push_back(r);
  out.r_dot.push_back(v);
  const long steps = std::lround(t_final / dt);
  for (long k = 0; k < steps; ++k) {
    const double k1r = v, k1v = sphere_rtt(r, v, A, p, n);
    const double r2 = r + 0.5 * dt * k1r;
    if (r2 <= 0) { out.collapsed = true; out.collapse_time = t; return out; }
    const double v2 = v + 0.5 * dt * k1v;
    const double k2r = v2, k2v = sphere_rtt(r2, v2, A, p, n);
    const double r3 = r + 0.5 * dt * k2r;
    if (r3 <= 0) { out.collapsed = true; out.collapse_time = t; return out; }
    const double v3 = v + 0.5 * dt * k2v;
    const double k3r = v3, k3v = sphere_rtt(r3, v3, A, p, n);
    const double r4 = r + dt * k3r;
    if (r4 <= 0) { out.collapsed = true; out.collapse_time = t; return out; }
    const double v4 = v + dt * k3v;
    const double k4r = v4, k4v = sphere_rtt(r4, v4, A, p, n);
    const double rn = r + dt / 6.0 * (k1r + 2 * k2r + 2 * k3r + k4r);
    if (rn <= 0) { out.collapsed = true; out.collapse_time = t + dt; return out; }
    r = rn;
    v += dt / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
    t = (k + 1) * dt;
    out.t.push_back(t);
    out.r.push_back(r);
    out.r_dot.push_back(v);
  }
  return out;
}

double sphere_volume(double r, int n) {
  return std::pow(r, n - 1) * n * std::pow(ParamGrid::kPi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

double sphere_energy(double r, double r_dot, const OperatorParams& params, int n) {
  const double Ep = std::pow(static_cast<double>(n - 1), params.p);
  return r_dot * r_dot * (1.0 + params.A * Ep / std::pow(r, 2 * params.p)) * sphere_volume(r, n);
}

double sphere_path_length(double r0, double r1, const OperatorParams& params, int ambient_dim,
                          double tol) {
  params.validate();
  if (r0 <= 0 || r1 <= 0) throw std::invalid_argument("sphere_path_length: radii must be > 0");
  const double lo = std::min(r0, r1), hi = std::max(r0, r1);
  const double A = params.A;
  const int p = params.p, n = ambient_dim;
  const double Ep = std::pow(static_cast<double>(n - 1), p);
  const double pref = std::sqrt(n * std::pow(ParamGrid::kPi, 0.5 * n) / std::tgamma(0.5 * n + 1.0));
  auto integrand = [&](double r) {
    return std::sqrt((1.0 + A * Ep / std::pow(r, 2 * p)) * std::pow(r, n - 1));
  };
  return pref * integrate(integrand, lo, hi, tol);
}

CompletenessReport classify_sphere_completeness(const OperatorParams& params, int ambient_dim,
                                                int decades) {
  CompletenessReport rep;
  double prev = sphere_path_length(0.1, 1.0, params, ambient_dim);
  for (int k = 2; k <= decades; ++k) {
    const double cur = sphere_path_length(std::pow(10.0, -k), 1.0, params, ambient_dim);
    rep.increments.push_back(cur - prev);
    prev = cur;
  }
  rep.increment_ratio = rep.increments.back() / rep.increments.front();
  // convergent tails decay geometrically; any non-vanishing tail means the
  // length down to radius zero diverges
  rep.complete = rep.increment_ratio > 0.1;
  return rep;
}

double zigzag_phi(double t, double alpha, int n) {
  const int cell = std::min(static_cast<int>(std::floor(2.0 * n * alpha)), 2 * n - 1);
  const int k = cell / 2;
  const bool rising = (cell % 2 == 0);
  if (t <= 0.5) return rising ? 2 * t * (2 * n * alpha - 2 * k) : 2 * t * (2 * k + 2 - 2 * n * alpha);
  return rising ? 2 * t - 1 + 2 * (1 - t) * (2 * n * alpha - 2 * k)
                : 2 * t - 1 + 2 * (1 - t) * (2 * k + 2 - 2 * n * alpha);
}

double zigzag_phi_t(double t, double alpha, int n) {
  const int cell = std::min(static_cast<int>(std::floor(2.0 * n * alpha)), 2 * n - 1);
  const int k = cell / 2;
  const bool rising = (cell % 2 == 0);
  if (t <= 0.5) return rising ? 4.0 * n * alpha - 4 * k : 4 * k + 4 - 4.0 * n * alpha;
  return rising ? 2 - 4.0 * n * alpha + 4 * k : -(2 - 4.0 * n * alpha + 4 * k);
}

double zigzag_phi_alpha(double t, double alpha, int n) {
  const int cell = std::min(static_cast<int>(std::floor(2.0 * n * alpha)), 2 * n - 1);
  const bool rising = (cell % 2 == 0);
  if (t <= 0.5) return rising ? 4.0 * n * t : -4.0 * n * t;
  return rising ? 4.0 * n * (1 - t) : -4.0 * n * (1 - t);
}

ZigzagBasePath default_zigzag_path(int nu, int nv) {
  ZigzagBasePath path;
  path.grid = ParamGrid::make(nu, nv, Boundary::DirichletZero);
  const int n = path.grid->nodes();
  path.mass = path.grid->quad_weight() * path.grid->cell_area();  // vol density = 1
  path.alpha.resize(n);
  for (int i = 0; i < nu; ++i)
    for (int j = 0; j < nv; ++j)
      path.alpha[path.grid->node(i, j)] = path.grid->u_of(i) / path.grid->extent_u();
  path.dalpha_norm = ScalarField::Constant(n, 1.0 / path.grid->extent_u());
  path.speed = [](double, int) { return 1.0; };
  return path;
}

double zigzag_horizontal_length(const ZigzagBasePath& path, int n_zigzag, int time_panels) {
  if (n_zigzag < 1) throw std::invalid_argument("zigzag: n must be >= 1");
  const int nodes = static_cast<int>(path.alpha.size());
  auto inner = [&](double t) {
    double acc = 0.0;
    for (int x = 0; x < nodes; ++x) {
      const double al = path.alpha[x];
      const double sp = path.speed(zigzag_phi(t, al, n_zigzag), x);
      const double pt = zigzag_phi_t(t, al, n_zigzag);
      const double pa = zigzag_phi_alpha(t, al, n_zigzag);
      const double da = path.dalpha_norm[x];
      acc += path.mass[x] * pt * pt * sp * sp / std::sqrt(1.0 + pa * pa * da * da * sp * sp);
    }
    return std::sqrt(std::max(acc, 0.0));
  };
  // composite Simpson on each smooth half (kink at t = 1/2)
  double total = 0.0;
  const int m = std::max(2, time_panels / 2) & ~1;
  for (int half = 0; half < 2; ++half) {
    const double a = half * 0.5, b = a + 0.5;
    const double h = (b - a) / m;
    double s = inner(a) + inner(b);
    for (int k = 1; k < m; ++k) s += (k % 2 ? 4.0 : 2.0) * inner(a + k * h);
    total += s * h / 3.0;
  }
  return total;
}

double scaling_path_length(const Immersion& f0, const OperatorParams& params, double r_floor,
                           double tol) {
  params.validate();
  if (r_floor <= 0 || r_floor > 1) throw std::invalid_argument("scaling_path_length: need 0 < r_floor <= 1");
  const GeometryCache cache = GeometryCache::build(f0);
  const int m = 2;  // dim M
  const double c0 = cache.h0_inner(f0.f, f0.f);
  // <Delta^p f0, f0> = f0^T K (M^{-1} K)^{p-1} f0, the exact quadratic form
  double cp = 0.0;
  {
    VecField t = cache.stiffness() * f0.f;
    for (int i = 1; i < params.p; ++i) {
      t.array().colwise() /= cache.mass().array();
      t = cache.stiffness() * t;
    }
    cp = (f0.f.array() * t.array()).sum();
  }
  auto integrand = [&](double r) {
    return std::sqrt(std::pow(r, m) * (c0 + params.A * std::pow(r, -2 * params.p) * cp));
  };
  return integrate(integrand, r_floor, 1.0, tol);
}

double scaled_translation_cost(const Immersion& f0, double r0, double ell) {
  const GeometryCache cache = GeometryCache::build(f0);
  const int m = 2;
  return ell * std::sqrt(std::pow(r0, m) * cache.volume());
}

double shrink_translate_grow_cost(const Immersion& f0, const OperatorParams& params,
                                  double r_floor, double ell) {
  return 2.0 * scaling_path_length(f0, params, r_floor) +
         scaled_translation_cost(f0, r_floor, ell);
}

}  // namespace shapegeo
