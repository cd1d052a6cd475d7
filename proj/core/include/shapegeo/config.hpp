#pragma once

#include "shapegeo/geodesics.hpp"

#include <optional>
#include <string>
#include <vector>

namespace shapegeo {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Tiny arithmetic expression over (u, v): +-*/^, parentheses, unary minus,
/// sin cos exp sqrt abs, constants, pi.  Used for initial momentum fields.
class Expression {
 public:
  static Expression parse(const std::string& text);  // throws std::invalid_argument
  double eval(double u, double v) const;

  struct Node;  // exposed for the parser implementation

 private:
  std::shared_ptr<const Node> root_;
};

/// Everything a run needs; defaults mirror the reference bump experiment
/// (A=1, p=1, 100x100 grid, dt=0.05, t_final=5).
struct RunConfig {
  int nu = 100, nv = 100;
  Boundary boundary = Boundary::DirichletZero;
  double extent = ParamGrid::kPi;
  std::string surface = "flat_square";  // flat_square | torus | from_file
  std::string surface_file;
  double torus_major = 2.0, torus_minor = 0.8;

  OperatorParams params{1.0, 1};
  double dt = 0.05;
  double t_final = 5.0;
  int stride = 1;
  Integrator integrator = Integrator::Rk4;
  double tol_lin = 1e-10;

  std::string momentum_expr = "sin(u)*sin(v)";
  std::string momentum_image;   // PGM path; when set, overrides the expression
  double momentum_sigma = 2.0;  // Gaussian smoothing width in grid units

  std::string output_dir = "out";
  bool write_obj = true;
  bool write_csv = true;

  Immersion build_surface() const;
  ScalarField build_momentum_density(const GeometryCache& cache) const;  // b = a sqrt(det)
  SolverConfig solver_config() const;
};

struct ConfigIssue {
  int line = 0;  // 0 when not tied to a line
  std::string message;
};

struct ParseResult {
  std::optional<RunConfig> config;  // set iff errors is empty
  std::vector<ConfigIssue> errors;
};

/// key = value lines, '#' comments.  Collects every error (unknown keys,
/// type mismatches, duplicates, constraint violations) instead of stopping
/// at the first.
ParseResult parse_config(const std::string& text);
ParseResult parse_config_file(const std::string& path);

/// applies one "key=value" override (the CLI --set flag)
std::optional<ConfigIssue> apply_override(RunConfig& config, const std::string& assignment);

/// final cross-field validation used by both parse paths
std::vector<ConfigIssue> validate(const RunConfig& config);

}  // namespace shapegeo
