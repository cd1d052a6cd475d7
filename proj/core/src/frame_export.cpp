#include "shapegeo/frame_export.hpp"

#include "shapegeo/config.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>

namespace shapegeo {

std::string format_double(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return {buf, res.ptr};
}

void write_obj(const Immersion& f, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  const ParamGrid& grid = *f.grid;
  std::string body;
  body.reserve(static_cast<std::size_t>(grid.nodes()) * 40);
  for (int k = 0; k < grid.nodes(); ++k) {
    body += "v ";
    body += format_double(f.f(k, 0));
    body += ' ';
    body += format_double(f.f(k, 1));
    body += ' ';
    body += format_double(f.f(k, 2));
    body += '\n';
  }
  const int iu = grid.periodic() ? grid.nu() : grid.nu() - 1;
  const int iv = grid.periodic() ? grid.nv() : grid.nv() - 1;
  for (int i = 0; i < iu; ++i)
    for (int j = 0; j < iv; ++j) {
      const int a = grid.node(i, j) + 1;
      const int b = grid.node((i + 1) % grid.nu(), j) + 1;
      const int c = grid.node((i + 1) % grid.nu(), (j + 1) % grid.nv()) + 1;
      const int d = grid.node(i, (j + 1) % grid.nv()) + 1;
      body += "f " + std::to_string(a) + ' ' + std::to_string(b) + ' ' + std::to_string(c) + '\n';
      body += "f " + std::to_string(a) + ' ' + std::to_string(c) + ' ' + std::to_string(d) + '\n';
    }
  out << body;
  if (!out) throw IoError("write failed: " + path);
}

std::vector<std::string> export_frames(const std::vector<GeodesicState>& trajectory,
                                       const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());
  std::vector<std::string> paths;
  paths.reserve(trajectory.size());
  char name[32];
  for (std::size_t k = 0; k < trajectory.size(); ++k) {
    std::snprintf(name, sizeof(name), "frame_%06zu.obj", k);
    std::string path = dir + "/" + name;
    write_obj(trajectory[k].f, path);
    paths.push_back(std::move(path));
  }
  return paths;
}

void write_diagnostics_csv(const std::vector<DiagnosticsRecord>& records,
                           const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << "t,energy,lin_x,lin_y,lin_z,ang_x,ang_y,ang_z,reparam_norm,volume,swept_area,path_length\n";
  for (const auto& r : records) {
    out << format_double(r.t) << ',' << format_double(r.energy) << ','
        << format_double(r.linear_momentum.x()) << ',' << format_double(r.linear_momentum.y())
        << ',' << format_double(r.linear_momentum.z()) << ','
        << format_double(r.angular_momentum.x()) << ',' << format_double(r.angular_momentum.y())
        << ',' << format_double(r.angular_momentum.z()) << ','
        << format_double(r.reparam_momentum_norm) << ',' << format_double(r.volume) << ','
        << format_double(r.swept_area_cumulative) << ','
        << format_double(r.path_length_cumulative) << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace shapegeo
