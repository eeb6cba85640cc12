#include "psidyn/grid.hpp"

#include <cmath>
#include <string>

namespace psidyn {

SpectralGrid::SpectralGrid(int dim, int n, double extent)
    : dim_(dim), n_(n), extent_(extent) {
  if (dim < 1 || dim > 3) {
    throw BadDim("grid dimension must be 1, 2, or 3, got " + std::to_string(dim));
  }
  if (n < 4 || n % 2 != 0) {
    throw OddSize("grid size per axis must be even and at least 4, got " +
                  std::to_string(n));
  }
  if (!(extent > 0.0) || !std::isfinite(extent)) {
    throw InvalidArgument("grid extent must be positive and finite");
  }
  dx_ = extent_ / n_;
  dxi_ = 2.0 * M_PI / extent_;
  size_ = 1;
  for (int a = 0; a < dim_; ++a) size_ *= static_cast<std::size_t>(n_);
}

double SpectralGrid::cell(Side side) const {
  double h = side == Side::Physical ? dx_ : dxi_;
  double v = 1.0;
  for (int a = 0; a < dim_; ++a) v *= h;
  return v;
}

std::array<int, 3> SpectralGrid::unravel(std::size_t flat) const {
  std::array<int, 3> idx{0, 0, 0};
  for (int a = dim_ - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % static_cast<std::size_t>(n_));
    flat /= static_cast<std::size_t>(n_);
  }
  return idx;
}

std::size_t SpectralGrid::ravel(const std::array<int, 3>& idx) const {
  std::size_t flat = 0;
  for (int a = 0; a < dim_; ++a) {
    flat = flat * static_cast<std::size_t>(n_) + static_cast<std::size_t>(idx[a]);
  }
  return flat;
}

std::array<double, 3> SpectralGrid::point(std::size_t flat, Side side) const {
  auto idx = unravel(flat);
  std::array<double, 3> p{0.0, 0.0, 0.0};
  for (int a = 0; a < dim_; ++a) p[a] = coord(idx[a], side);
  return p;
}

double SpectralGrid::abs2(std::size_t flat, Side side) const {
  auto p = point(flat, side);
  double r2 = 0.0;
  for (int a = 0; a < dim_; ++a) r2 += p[a] * p[a];
  return r2;
}

GridPtr make_grid(int dim, int n, double extent) {
  return std::make_shared<const SpectralGrid>(dim, n, extent);
}

} // namespace psidyn
