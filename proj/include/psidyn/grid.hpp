#pragma once

#include <array>
#include <cstddef>
#include <memory>

#include "psidyn/errors.hpp"

namespace psidyn {

// Which lattice a set of samples lives on. Physical samples sit on the
// centered box x_j = (j - n/2) dx, frequency samples on the symmetric band
// xi_k = (k - n/2) dxi with dxi = 2 pi / extent. Keeping the side explicit
// lets every norm and transform pick the right cell volume without guessing.
enum class Side { Physical, Frequency };

// Dual pair of centered lattices for one periodic box.
//
// dim in {1,2,3}; n even and >= 4 modes per axis; extent is the side length
// of the physical box. The spacings satisfy dx * dxi * n = 2 pi exactly,
// which is what makes the forward/inverse prefactors compose to the
// identity.
class SpectralGrid {
public:
  SpectralGrid(int dim, int n, double extent);

  int dim() const { return dim_; }
  int n() const { return n_; }
  double extent() const { return extent_; }
  double dx() const { return dx_; }
  double dxi() const { return dxi_; }

  // Total lattice points, n^dim.
  std::size_t size() const { return size_; }

  // Largest resolved frequency magnitude per axis, (n/2) * dxi.
  double grid_radius() const { return 0.5 * n_ * dxi_; }

  // Cell volume of one lattice site, dx^dim or dxi^dim by side.
  double cell(Side side) const;

  // Coordinate of per-axis index j in [0, n) on the requested side.
  double coord(int j, Side side) const {
    return (j - n_ / 2) * (side == Side::Physical ? dx_ : dxi_);
  }

  // Row-major flat index -> per-axis indices (unused axes stay 0).
  std::array<int, 3> unravel(std::size_t flat) const;

  // Per-axis indices -> row-major flat index. Axes beyond dim are ignored.
  std::size_t ravel(const std::array<int, 3>& idx) const;

  // Lattice point for a flat index; entries beyond dim are 0.
  std::array<double, 3> point(std::size_t flat, Side side) const;

  // Squared Euclidean norm of the lattice point for a flat index.
  double abs2(std::size_t flat, Side side) const;

  bool operator==(const SpectralGrid& other) const {
    return dim_ == other.dim_ && n_ == other.n_ && extent_ == other.extent_;
  }
  bool operator!=(const SpectralGrid& other) const { return !(*this == other); }

private:
  int dim_;
  int n_;
  double extent_;
  double dx_;
  double dxi_;
  std::size_t size_;
};

using GridPtr = std::shared_ptr<const SpectralGrid>;

// Validating factory; the shared handle is what fields carry around.
GridPtr make_grid(int dim, int n, double extent);

} // namespace psidyn
