// shape-geodesics: geodesic IVP runs and the bundled experiments.
//
//   shape-geodesics run <config-file>
//   shape-geodesics experiment <name> [--set key=value]... [--out dir]
//
// exit codes: 0 ok, 2 config error, 3 numerical failure, 4 I/O error

#include "shapegeo/experiments.hpp"

#include <cstring>
#include <iostream>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

void usage(std::ostream& out) {
  out << "usage:\n"
      << "  shape-geodesics run <config-file>\n"
      << "  shape-geodesics experiment <name> [--set key=value]... [--out dir]\n"
      << "experiments:";
  for (const auto& n : shapegeo::experiment_names()) out << ' ' << n;
  out << "\n\nconfig keys (key = value, '#' comments): grid.nu grid.nv grid.boundary\n"
      << "grid.extent surface surface.file torus.major torus.minor A p dt t_final\n"
      << "stride integrator tol_lin momentum.expression momentum.image momentum.sigma\n"
      << "output.dir output.obj output.csv\n"
      << "environment: SHAPE_GEODESICS_THREADS caps worker parallelism\n";
}

int cmd_run(int argc, char** argv) {
  if (argc != 1) {
    usage(std::cerr);
    return kExitConfig;
  }
  auto parsed = shapegeo::parse_config_file(argv[0]);
  if (!parsed.config) {
    for (const auto& e : parsed.errors) {
      std::cerr << "config error";
      if (e.line > 0) std::cerr << " (line " << e.line << ")";
      std::cerr << ": " << e.message << "\n";
    }
    return kExitConfig;
  }
  shapegeo::run_pipeline(*parsed.config);
  return kExitOk;
}

int cmd_experiment(int argc, char** argv) {
  if (argc < 1) {
    usage(std::cerr);
    return kExitConfig;
  }
  const std::string name = argv[0];
  if (!shapegeo::is_known_experiment(name)) {
    std::cerr << "unknown experiment '" << name << "'\n";
    usage(std::cerr);
    return kExitConfig;
  }
  shapegeo::RunConfig base;
  base.output_dir = "out/" + name;
  std::vector<std::string> overrides;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--set") == 0 && i + 1 < argc) {
      overrides.emplace_back(argv[++i]);
    } else if (std::strcmp(argv[i], "--out") == 0 && i + 1 < argc) {
      base.output_dir = argv[++i];
    } else {
      std::cerr << "unknown argument '" << argv[i] << "'\n";
      return kExitConfig;
    }
  }
  auto result = shapegeo::run_experiment(name, base, overrides);
  for (const auto& m : result.messages) std::cout << m << "\n";
  std::cout << (result.status == 0 ? "experiment passed" : "experiment FAILED") << "\n";
  return result.status;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    usage(std::cerr);
    return kExitConfig;
  }
  const std::string cmd = argv[1];
  try {
    if (cmd == "run") return cmd_run(argc - 2, argv + 2);
    if (cmd == "experiment") return cmd_experiment(argc - 2, argv + 2);
    if (cmd == "--help" || cmd == "-h" || cmd == "help") {
      usage(std::cout);
      return kExitOk;
    }
    std::cerr << "unknown command '" << cmd << "'\n";
    usage(std::cerr);
    return kExitConfig;
  } catch (const shapegeo::IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const shapegeo::DegenerateImmersionError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const shapegeo::SolveError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
}
