#include "psidyn/transforms.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>
#include <vector>

namespace psidyn {

namespace {

// FFTW planning is not thread-safe, and plans are expensive enough to reuse.
// One plan per (dim, n, direction) triple; execution via fftw_execute_dft on
// caller buffers is re-entrant. Plans are created with FFTW_UNALIGNED so any
// heap buffer qualifies, and FFTW_ESTIMATE so planning never probes (probing
// would make run times, though not results, machine-dependent).
class PlanCache {
public:
  fftw_plan get(int dim, int n, int sign) {
    std::lock_guard<std::mutex> lock(mu_);
    auto key = std::make_tuple(dim, n, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;

    std::size_t total = 1;
    for (int a = 0; a < dim; ++a) total *= static_cast<std::size_t>(n);
    std::vector<fftw_complex> scratch_in(total), scratch_out(total);
    int dims[3] = {n, n, n};
    fftw_plan p =
        fftw_plan_dft(dim, dims, scratch_in.data(), scratch_out.data(), sign,
                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(key, p);
    return p;
  }

  ~PlanCache() {
    for (auto& [key, p] : plans_) fftw_destroy_plan(p);
  }

private:
  std::mutex mu_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

int index_parity(const SpectralGrid& g, std::size_t flat) {
  auto idx = g.unravel(flat);
  int s = 0;
  for (int a = 0; a < g.dim(); ++a) s += idx[a];
  return s & 1;
}

Field run_transform(const Field& in, Side from, Side to, int sign,
                    const char* name) {
  if (!in.grid) throw InvalidArgument(std::string(name) + ": field has no grid");
  if (in.side != from) {
    throw InvalidArgument(std::string(name) + ": field is on the wrong lattice side");
  }
  if (in.overflow_count() > 0) {
    throw MagnitudeOverflow(std::string(name) +
                            ": field carries unrepresentable modes");
  }
  require_finite(in, name);

  const SpectralGrid& g = *in.grid;
  const std::size_t total = g.size();

  std::vector<Complex> buf_in(total), buf_out(total);
  for (std::size_t k = 0; k < total; ++k) {
    buf_in[k] = index_parity(g, k) ? -in.values[k] : in.values[k];
  }

  fftw_plan plan = plan_cache().get(g.dim(), g.n(), sign);
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(buf_in.data()),
                   reinterpret_cast<fftw_complex*>(buf_out.data()));

  // Prefactor: cell volume of the source side, symmetric (2 pi)^{-d/2}, and
  // one (-1)^{n/2} per axis from recentring both lattices.
  double pref = g.cell(from) * std::pow(2.0 * M_PI, -0.5 * g.dim());
  if (((g.n() / 2) & 1) && (g.dim() & 1)) pref = -pref;

  Field out;
  out.grid = in.grid;
  out.side = to;
  out.log_shift = in.log_shift;
  out.values.resize(total);
  for (std::size_t k = 0; k < total; ++k) {
    Complex v = buf_out[k] * pref;
    out.values[k] = index_parity(g, k) ? -v : v;
  }
  return out;
}

} // namespace

Field forward_transform(const Field& f) {
  return run_transform(f, Side::Physical, Side::Frequency, FFTW_FORWARD,
                       "forward_transform");
}

Field inverse_transform(const Field& v) {
  return run_transform(v, Side::Frequency, Side::Physical, FFTW_BACKWARD,
                       "inverse_transform");
}

} // namespace psidyn
