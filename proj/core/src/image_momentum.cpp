#include "shapegeo/image_momentum.hpp"

#include "shapegeo/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>

namespace shapegeo {

namespace {

// next whitespace-separated token, skipping '#' comment lines
std::string next_token(std::istream& in) {
  std::string tok;
  for (;;) {
    int c = in.peek();
    if (c == EOF) return tok;
    if (std::isspace(c)) {
      in.get();
      continue;
    }
    if (c == '#') {
      std::string line;
      std::getline(in, line);
      continue;
    }
    break;
  }
  in >> tok;
  return tok;
}

int next_int(std::istream& in, const std::string& path, const char* what) {
  const std::string tok = next_token(in);
  try {
    return std::stoi(tok);
  } catch (...) {
    throw IoError(path + ": bad PGM " + what + " field '" + tok + "'");
  }
}

}  // namespace

PgmImage read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open image: " + path);
  std::string magic = next_token(in);
  if (magic != "P5" && magic != "P2") throw IoError(path + ": not a PGM file (magic '" + magic + "')");
  PgmImage img;
  img.width = next_int(in, path, "width");
  img.height = next_int(in, path, "height");
  img.maxval = next_int(in, path, "maxval");
  if (img.width <= 0 || img.height <= 0) throw IoError(path + ": zero-size image");
  if (img.maxval <= 0 || img.maxval > 65535) throw IoError(path + ": bad maxval");
  const std::size_t count = static_cast<std::size_t>(img.width) * img.height;
  img.pixels.resize(count);
  if (magic == "P2") {
    for (std::size_t k = 0; k < count; ++k)
      img.pixels[k] = static_cast<double>(next_int(in, path, "pixel")) / img.maxval;
  } else {
    in.get();  // single whitespace after maxval
    const int bytes = img.maxval < 256 ? 1 : 2;
    std::vector<unsigned char> raw(count * bytes);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (in.gcount() != static_cast<std::streamsize>(raw.size()))
      throw IoError(path + ": truncated pixel data");
    for (std::size_t k = 0; k < count; ++k) {
      const int v = bytes == 1 ? raw[k] : (raw[2 * k] << 8) | raw[2 * k + 1];
      img.pixels[k] = static_cast<double>(v) / img.maxval;
    }
  }
  return img;
}

ScalarField gaussian_smooth(const ParamGrid& grid, const ScalarField& field, double sigma) {
  if (sigma <= 0) return field;
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> kernel(2 * radius + 1);
  double sum = 0;
  for (int k = -radius; k <= radius; ++k) {
    kernel[k + radius] = std::exp(-0.5 * (k / sigma) * (k / sigma));
    sum += kernel[k + radius];
  }
  for (double& w : kernel) w /= sum;

  const int nu = grid.nu(), nv = grid.nv();
  const bool per = grid.periodic();
  ScalarField tmp = ScalarField::Zero(grid.nodes());
  for (int i = 0; i < nu; ++i)
    for (int j = 0; j < nv; ++j) {
      double acc = 0;
      for (int k = -radius; k <= radius; ++k) {
        int ii = i + k;
        if (per)
          ii = (ii % nu + nu) % nu;
        else if (ii < 0 || ii >= nu)
          continue;  // zero padding
        acc += kernel[k + radius] * field[grid.node(ii, j)];
      }
      tmp[grid.node(i, j)] = acc;
    }
  ScalarField out = ScalarField::Zero(grid.nodes());
  for (int i = 0; i < nu; ++i)
    for (int j = 0; j < nv; ++j) {
      double acc = 0;
      for (int k = -radius; k <= radius; ++k) {
        int jj = j + k;
        if (per)
          jj = (jj % nv + nv) % nv;
        else if (jj < 0 || jj >= nv)
          continue;
        acc += kernel[k + radius] * tmp[grid.node(i, jj)];
      }
      out[grid.node(i, j)] = acc;
    }
  return out;
}

ScalarField momentum_from_image(const PgmImage& img, double smoothing_sigma,
                                const ParamGrid& grid) {
  // bilinear resample: image row -> u axis, column -> v axis
  ScalarField a(grid.nodes());
  const int nu = grid.nu(), nv = grid.nv();
  for (int i = 0; i < nu; ++i) {
    const double r = (img.height - 1) * (nu == 1 ? 0.0 : static_cast<double>(i) / (nu - 1));
    const int r0 = std::min(static_cast<int>(r), img.height - 2 >= 0 ? img.height - 2 : 0);
    const double fr = img.height > 1 ? r - r0 : 0.0;
    for (int j = 0; j < nv; ++j) {
      const double c = (img.width - 1) * (nv == 1 ? 0.0 : static_cast<double>(j) / (nv - 1));
      const int c0 = std::min(static_cast<int>(c), img.width - 2 >= 0 ? img.width - 2 : 0);
      const double fc = img.width > 1 ? c - c0 : 0.0;
      const int r1 = std::min(r0 + 1, img.height - 1);
      const int c1 = std::min(c0 + 1, img.width - 1);
      a[grid.node(i, j)] = (1 - fr) * (1 - fc) * img.at(r0, c0) + fr * (1 - fc) * img.at(r1, c0) +
                           (1 - fr) * fc * img.at(r0, c1) + fr * fc * img.at(r1, c1);
    }
  }
  a = gaussian_smooth(grid, a, smoothing_sigma);
  if (!grid.periodic())
    for (int k = 0; k < grid.nodes(); ++k)
      if (grid.is_boundary_node(k)) a[k] = 0.0;
  return a;
}

ScalarField momentum_from_image(const std::string& path, double smoothing_sigma,
                                const ParamGrid& grid) {
  return momentum_from_image(read_pgm(path), smoothing_sigma, grid);
}

PgmImage builtin_letter_image() {
  // blocky letter "A" on a 48x48 canvas
  PgmImage img;
  img.width = img.height = 48;
  img.maxval = 255;
  img.pixels.assign(48 * 48, 0.0);
  auto set = [&](int r, int c) {
    if (r >= 0 && r < 48 && c >= 0 && c < 48) img.pixels[static_cast<std::size_t>(r) * 48 + c] = 1.0;
  };
  for (int r = 8; r < 40; ++r) {
    const double t = (r - 8) / 31.0;
    const int half = static_cast<int>(2 + 14 * t);
    for (int w = -2; w <= 2; ++w) {
      set(r, 24 - half + w);
      set(r, 24 + half + w);
    }
  }
  for (int c = 15; c <= 33; ++c)
    for (int w = 0; w < 4; ++w) set(27 + w, c);
  return img;
}

}  // namespace shapegeo
