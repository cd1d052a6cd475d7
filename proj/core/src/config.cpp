#include "shapegeo/config.hpp"

#include "shapegeo/image_momentum.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace shapegeo {

// ---------------------------------------------------------------------------
// expression parser

struct Expression::Node {
  enum class Kind { Const, VarU, VarV, Neg, Add, Sub, Mul, Div, Pow, Sin, Cos, Exp, Sqrt, Abs };
  Kind kind;
  double value = 0;
  std::shared_ptr<const Node> a, b;
};

namespace {

class ExprParser {
 public:
  explicit ExprParser(const std::string& s) : s_(s) {}

  std::shared_ptr<const Expression::Node> run() {
    auto e = expr();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  using NodePtr = std::shared_ptr<const Expression::Node>;
  using Kind = Expression::Node::Kind;

  [[noreturn]] void fail(const std::string& what) {
    throw std::invalid_argument("expression error at offset " + std::to_string(pos_) + ": " + what);
  }
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  static NodePtr make(Kind k, NodePtr a = nullptr, NodePtr b = nullptr, double v = 0) {
    auto n = std::make_shared<Expression::Node>();
    n->kind = k;
    n->value = v;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
  }

  NodePtr expr() {
    auto left = term();
    for (;;) {
      if (eat('+'))
        left = make(Kind::Add, left, term());
      else if (eat('-'))
        left = make(Kind::Sub, left, term());
      else
        return left;
    }
  }
  NodePtr term() {
    auto left = factor();
    for (;;) {
      if (eat('*'))
        left = make(Kind::Mul, left, factor());
      else if (eat('/'))
        left = make(Kind::Div, left, factor());
      else
        return left;
    }
  }
  NodePtr factor() {
    if (eat('-')) return make(Kind::Neg, factor());
    auto base = atom();
    if (eat('^')) return make(Kind::Pow, base, factor());  // right associative
    return base;
  }
  NodePtr atom() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      auto e = expr();
      if (!eat(')')) fail("missing ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t used = 0;
      double v = std::stod(s_.substr(pos_), &used);
      pos_ += used;
      return make(Kind::Const, nullptr, nullptr, v);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t end = pos_;
      while (end < s_.size() && std::isalnum(static_cast<unsigned char>(s_[end]))) ++end;
      const std::string name = s_.substr(pos_, end - pos_);
      pos_ = end;
      if (name == "u") return make(Kind::VarU);
      if (name == "v") return make(Kind::VarV);
      if (name == "pi") return make(Kind::Const, nullptr, nullptr, ParamGrid::kPi);
      static const std::map<std::string, Kind> funcs = {{"sin", Kind::Sin},
                                                        {"cos", Kind::Cos},
                                                        {"exp", Kind::Exp},
                                                        {"sqrt", Kind::Sqrt},
                                                        {"abs", Kind::Abs}};
      auto it = funcs.find(name);
      if (it == funcs.end()) fail("unknown identifier '" + name + "'");
      if (!eat('(')) fail("expected '(' after '" + name + "'");
      auto arg = expr();
      if (!eat(')')) fail("missing ')'");
      return make(it->second, arg);
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

double eval_node(const Expression::Node& n, double u, double v) {
  using Kind = Expression::Node::Kind;
  switch (n.kind) {
    case Kind::Const: return n.value;
    case Kind::VarU: return u;
    case Kind::VarV: return v;
    case Kind::Neg: return -eval_node(*n.a, u, v);
    case Kind::Add: return eval_node(*n.a, u, v) + eval_node(*n.b, u, v);
    case Kind::Sub: return eval_node(*n.a, u, v) - eval_node(*n.b, u, v);
    case Kind::Mul: return eval_node(*n.a, u, v) * eval_node(*n.b, u, v);
    case Kind::Div: return eval_node(*n.a, u, v) / eval_node(*n.b, u, v);
    case Kind::Pow: return std::pow(eval_node(*n.a, u, v), eval_node(*n.b, u, v));
    case Kind::Sin: return std::sin(eval_node(*n.a, u, v));
    case Kind::Cos: return std::cos(eval_node(*n.a, u, v));
    case Kind::Exp: return std::exp(eval_node(*n.a, u, v));
    case Kind::Sqrt: return std::sqrt(eval_node(*n.a, u, v));
    case Kind::Abs: return std::abs(eval_node(*n.a, u, v));
  }
  return 0;
}

}  // namespace

Expression Expression::parse(const std::string& text) {
  Expression e;
  e.root_ = ExprParser(text).run();
  return e;
}

double Expression::eval(double u, double v) const { return eval_node(*root_, u, v); }

// ---------------------------------------------------------------------------
// RunConfig

Immersion RunConfig::build_surface() const {
  if (surface == "flat_square") return flat_square(nu, nv, extent);
  if (surface == "torus") {
    Immersion t = torus_surface(nu, nv, torus_major, torus_minor);
    return t;
  }
  if (surface == "from_file") {
    std::ifstream in(surface_file);
    if (!in) throw IoError("cannot open surface file: " + surface_file);
    auto grid = ParamGrid::make(nu, nv, boundary, extent, extent);
    VecField f(grid->nodes(), 3);
    for (int k = 0; k < grid->nodes(); ++k)
      if (!(in >> f(k, 0) >> f(k, 1) >> f(k, 2)))
        throw IoError("surface file too short: " + surface_file);
    return {grid, std::move(f)};
  }
  throw std::invalid_argument("unknown surface kind: " + surface);
}

ScalarField RunConfig::build_momentum_density(const GeometryCache& cache) const {
  const ParamGrid& grid = *cache.grid();
  ScalarField a(grid.nodes());
  if (!momentum_image.empty()) {
    a = momentum_from_image(momentum_image, momentum_sigma, grid);
  } else {
    const Expression expr = Expression::parse(momentum_expr);
    for (int i = 0; i < grid.nu(); ++i)
      for (int j = 0; j < grid.nv(); ++j)
        a[grid.node(i, j)] = expr.eval(grid.u_of(i), grid.v_of(j));
  }
  ScalarField b = a.array() * cache.sqrt_det().array();
  if (!grid.periodic())
    for (int k = 0; k < grid.nodes(); ++k)
      if (grid.is_boundary_node(k)) b[k] = 0.0;
  return b;
}

SolverConfig RunConfig::solver_config() const {
  SolverConfig sc;
  sc.params = params;
  sc.dt = dt;
  sc.t_final = t_final;
  sc.integrator = integrator;
  sc.output_stride = stride;
  sc.solver.tol_lin = tol_lin;
  return sc;
}

// ---------------------------------------------------------------------------
// config text parsing

namespace {

bool parse_int(const std::string& s, int& out) {
  try {
    std::size_t used = 0;
    const long v = std::stol(s, &used);
    if (used != s.size()) return false;
    out = static_cast<int>(v);
    return true;
  } catch (...) {
    return false;
  }
}

bool parse_double(const std::string& s, double& out) {
  try {
    std::size_t used = 0;
    out = std::stod(s, &used);
    return used == s.size();
  } catch (...) {
    return false;
  }
}

bool parse_bool(const std::string& s, bool& out) {
  if (s == "on" || s == "true" || s == "1") { out = true; return true; }
  if (s == "off" || s == "false" || s == "0") { out = false; return true; }
  return false;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  std::size_t e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

// one entry per recognized key
struct KeyHandler {
  std::function<std::optional<std::string>(RunConfig&, const std::string&)> set;
};

const std::map<std::string, KeyHandler>& key_table() {
  auto int_key = [](int RunConfig::* member, int min_value, const char* constraint) {
    return KeyHandler{[member, min_value, constraint](RunConfig& c, const std::string& v)
                          -> std::optional<std::string> {
      int x;
      if (!parse_int(v, x)) return "expected an integer, got '" + v + "'";
      if (x < min_value) return std::string(constraint);
      c.*member = x;
      return std::nullopt;
    }};
  };
  auto double_key = [](double RunConfig::* member, bool positive, const char* constraint) {
    return KeyHandler{[member, positive, constraint](RunConfig& c, const std::string& v)
                          -> std::optional<std::string> {
      double x;
      if (!parse_double(v, x)) return "expected a number, got '" + v + "'";
      if (positive && !(x > 0)) return std::string(constraint);
      c.*member = x;
      return std::nullopt;
    }};
  };
  auto string_key = [](std::string RunConfig::* member) {
    return KeyHandler{[member](RunConfig& c, const std::string& v) -> std::optional<std::string> {
      c.*member = v;
      return std::nullopt;
    }};
  };
  auto bool_key = [](bool RunConfig::* member) {
    return KeyHandler{[member](RunConfig& c, const std::string& v) -> std::optional<std::string> {
      bool x;
      if (!parse_bool(v, x)) return "expected on/off, got '" + v + "'";
      c.*member = x;
      return std::nullopt;
    }};
  };

  static const std::map<std::string, KeyHandler> table = {
      {"grid.nu", int_key(&RunConfig::nu, 3, "grid.nu must be >= 3")},
      {"grid.nv", int_key(&RunConfig::nv, 3, "grid.nv must be >= 3")},
      {"grid.boundary",
       {[](RunConfig& c, const std::string& v) -> std::optional<std::string> {
         if (v == "dirichlet") { c.boundary = Boundary::DirichletZero; return std::nullopt; }
         if (v == "periodic") { c.boundary = Boundary::Periodic; return std::nullopt; }
         return "boundary must be dirichlet or periodic, got '" + v + "'";
       }}},
      {"grid.extent", double_key(&RunConfig::extent, true, "grid.extent must be > 0")},
      {"surface", {[](RunConfig& c, const std::string& v) -> std::optional<std::string> {
         if (v != "flat_square" && v != "torus" && v != "from_file")
           return "surface must be flat_square, torus or from_file, got '" + v + "'";
         c.surface = v;
         return std::nullopt;
       }}},
      {"surface.file", string_key(&RunConfig::surface_file)},
      {"torus.major", double_key(&RunConfig::torus_major, true, "torus.major must be > 0")},
      {"torus.minor", double_key(&RunConfig::torus_minor, true, "torus.minor must be > 0")},
      {"A", {[](RunConfig& c, const std::string& v) -> std::optional<std::string> {
         double x;
         if (!parse_double(v, x)) return "expected a number, got '" + v + "'";
         if (x < 0) return std::string("A must be >= 0");
         c.params.A = x;
         return std::nullopt;
       }}},
      {"p", {[](RunConfig& c, const std::string& v) -> std::optional<std::string> {
         int x;
         if (!parse_int(v, x)) return "expected an integer, got '" + v + "'";
         if (x < 1) return std::string("p must be >= 1");
         c.params.p = x;
         return std::nullopt;
       }}},
      {"dt", double_key(&RunConfig::dt, true, "dt must be > 0")},
      {"t_final", {[](RunConfig& c, const std::string& v) -> std::optional<std::string> {
         double x;
         if (!parse_double(v, x)) return "expected a number, got '" + v + "'";
         if (x < 0) return std::string("t_final must be >= 0");
         c.t_final = x;
         return std::nullopt;
       }}},
      {"stride", int_key(&RunConfig::stride, 1, "stride must be >= 1")},
      {"integrator", {[](RunConfig& c, const std::string& v) -> std::optional<std::string> {
         if (v == "rk4") { c.integrator = Integrator::Rk4; return std::nullopt; }
         if (v == "explicit_euler") { c.integrator = Integrator::ExplicitEuler; return std::nullopt; }
         return "integrator must be rk4 or explicit_euler, got '" + v + "'";
       }}},
      {"tol_lin", double_key(&RunConfig::tol_lin, true, "tol_lin must be > 0")},
      {"momentum.expression", {[](RunConfig& c, const std::string& v) -> std::optional<std::string> {
         try {
           Expression::parse(v);
         } catch (const std::invalid_argument& e) {
           return std::string(e.what());
         }
         c.momentum_expr = v;
         return std::nullopt;
       }}},
      {"momentum.image", string_key(&RunConfig::momentum_image)},
      {"momentum.sigma", double_key(&RunConfig::momentum_sigma, true, "momentum.sigma must be > 0")},
      {"output.dir", string_key(&RunConfig::output_dir)},
      {"output.obj", bool_key(&RunConfig::write_obj)},
      {"output.csv", bool_key(&RunConfig::write_csv)},
  };
  return table;
}

}  // namespace

std::vector<ConfigIssue> validate(const RunConfig& config) {
  std::vector<ConfigIssue> issues;
  if (config.surface == "from_file" && config.surface_file.empty())
    issues.push_back({0, "surface = from_file requires surface.file"});
  if (config.surface == "torus" && config.boundary != Boundary::Periodic)
    issues.push_back({0, "surface = torus requires grid.boundary = periodic"});
  if (config.surface == "flat_square" && config.boundary != Boundary::DirichletZero)
    issues.push_back({0, "surface = flat_square requires grid.boundary = dirichlet"});
  return issues;
}

ParseResult parse_config(const std::string& text) {
  ParseResult result;
  RunConfig config;
  std::map<std::string, int> seen;  // key -> first line
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      result.errors.push_back({lineno, "expected 'key = value'"});
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto& table = key_table();
    auto it = table.find(key);
    if (it == table.end()) {
      result.errors.push_back({lineno, "unknown key '" + key + "'"});
      continue;
    }
    if (auto prev = seen.find(key); prev != seen.end()) {
      result.errors.push_back({lineno, "duplicate key '" + key + "' (first set on line " +
                                           std::to_string(prev->second) + ")"});
      continue;
    }
    seen[key] = lineno;
    if (auto err = it->second.set(config, value))
      result.errors.push_back({lineno, key + ": " + *err});
  }
  for (auto& issue : validate(config)) result.errors.push_back(issue);
  if (result.errors.empty()) result.config = std::move(config);
  return result;
}

ParseResult parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    ParseResult r;
    r.errors.push_back({0, "cannot open config file: " + path});
    return r;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::optional<ConfigIssue> apply_override(RunConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) return ConfigIssue{0, "override must be key=value: " + assignment};
  const std::string key = trim(assignment.substr(0, eq));
  const std::string value = trim(assignment.substr(eq + 1));
  const auto& table = key_table();
  auto it = table.find(key);
  if (it == table.end()) return ConfigIssue{0, "unknown key '" + key + "'"};
  if (auto err = it->second.set(config, value)) return ConfigIssue{0, key + ": " + *err};
  return std::nullopt;
}

}  // namespace shapegeo
