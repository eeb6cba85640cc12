#include "psidyn/field.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace psidyn {

Field Field::zeros(GridPtr grid, Side side) {
  Field f;
  f.grid = std::move(grid);
  f.side = side;
  f.values.assign(f.grid->size(), Complex(0.0, 0.0));
  return f;
}

std::size_t Field::overflow_count() const {
  if (overflow.empty()) return 0;
  return static_cast<std::size_t>(
      std::count_if(overflow.begin(), overflow.end(),
                    [](std::uint8_t m) { return m != 0; }));
}

void require_same_lattice(const Field& a, const Field& b) {
  if (!a.grid || !b.grid || *a.grid != *b.grid) {
    throw GridMismatch("fields live on different grids");
  }
  if (a.side != b.side) {
    throw GridMismatch("fields live on different lattice sides");
  }
}

void require_finite(const Field& f, const char* context) {
  for (std::size_t k = 0; k < f.values.size(); ++k) {
    if (f.masked(k)) continue;
    const Complex& v = f.values[k];
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw NonFinite(std::string(context) + ": non-finite value at flat index " +
                      std::to_string(k));
    }
  }
}

Field sample(GridPtr grid, Side side,
             const std::function<Complex(const std::array<double, 3>&)>& fn) {
  Field f = Field::zeros(grid, side);
  for (std::size_t k = 0; k < f.values.size(); ++k) {
    f.values[k] = fn(f.grid->point(k, side));
  }
  require_finite(f, "sample");
  return f;
}

double lattice_lq_norm(const Field& f, double q) {
  if (!(q >= 1.0)) {
    throw InvalidArgument("lattice norm exponent must satisfy q >= 1");
  }
  if (std::isinf(q)) {
    double m = 0.0;
    for (std::size_t k = 0; k < f.values.size(); ++k) {
      if (f.masked(k)) continue;
      m = std::max(m, std::abs(f.values[k]));
    }
    return m;
  }
  const double cell = f.grid->cell(f.side);
  double acc = 0.0;
  for (std::size_t k = 0; k < f.values.size(); ++k) {
    if (f.masked(k)) continue;
    acc += std::pow(std::abs(f.values[k]), q) * cell;
  }
  return std::pow(acc, 1.0 / q);
}

} // namespace psidyn
