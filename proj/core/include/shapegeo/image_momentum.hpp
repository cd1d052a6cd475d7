#pragma once

#include "shapegeo/grid.hpp"

#include <string>
#include <vector>

namespace shapegeo {

struct PgmImage {
  int width = 0, height = 0;
  int maxval = 255;
  std::vector<double> pixels;  // row-major, normalized to [0,1]

  double at(int row, int col) const { return pixels[static_cast<std::size_t>(row) * width + col]; }
};

/// P5 (binary) or P2 (ASCII) grayscale PGM
PgmImage read_pgm(const std::string& path);

/// separable Gaussian blur, sigma in node units; zero padding on Dirichlet
/// grids, wrap-around on periodic ones
ScalarField gaussian_smooth(const ParamGrid& grid, const ScalarField& field, double sigma);

/// image -> initial momentum scalar a0: bilinear resample onto the grid,
/// values normalized to [0,1], Gaussian smoothing, Dirichlet ring zeroed
ScalarField momentum_from_image(const std::string& path, double smoothing_sigma,
                                const ParamGrid& grid);
ScalarField momentum_from_image(const PgmImage& image, double smoothing_sigma,
                                const ParamGrid& grid);

/// built-in 48x48 letter bitmap used by the image experiment when no file is
/// given
PgmImage builtin_letter_image();

}  // namespace shapegeo
