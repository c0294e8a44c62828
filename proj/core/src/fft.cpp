#include "gslr/fft.hpp"

#include <cmath>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>

#include <fftw3.h>

namespace gslr {

namespace {

struct FftwFree
{
  void operator()(void *p) const { fftw_free(p); }
};
using AlignedBuffer = std::unique_ptr<fftw_complex[], FftwFree>;

AlignedBuffer aligned_buffer(std::size_t n)
{
  return AlignedBuffer(static_cast<fftw_complex *>(fftw_malloc(sizeof(fftw_complex) * n)));
}

// The FFTW planner is not re-entrant; execution of an existing plan on fresh
// aligned buffers is. Plans are made once per (nx, ny, direction) with
// FFTW_ESTIMATE so the algorithm choice never depends on timing.
class PlanCache
{
public:
  ~PlanCache()
  {
    for (auto &[key, plan] : plans_)
      fftw_destroy_plan(plan);
  }

  fftw_plan get(int nx, int ny, bool backward)
  {
    std::lock_guard lock(mutex_);
    const auto key = std::make_tuple(nx, ny, backward);
    if (auto it = plans_.find(key); it != plans_.end())
      return it->second;
    const std::size_t n = static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);
    auto in = aligned_buffer(n);
    auto out = aligned_buffer(n);
    const int sign = backward ? FFTW_BACKWARD : FFTW_FORWARD;
    fftw_plan plan = ny == 1 ? fftw_plan_dft_1d(nx, in.get(), out.get(), sign, FFTW_ESTIMATE)
                             : fftw_plan_dft_2d(ny, nx, in.get(), out.get(), sign, FFTW_ESTIMATE);
    plans_.emplace(key, plan);
    return plan;
  }

private:
  std::mutex mutex_;
  std::map<std::tuple<int, int, bool>, fftw_plan> plans_;
};

PlanCache &plan_cache()
{
  static PlanCache cache;
  return cache;
}

} // namespace

Eigen::ArrayXcd dft2(const Eigen::ArrayXcd &x, const KGrid &grid, bool backward)
{
  const std::size_t n = grid.size();
  detail::require(static_cast<std::size_t>(x.size()) == n, "dft2: array size does not match grid");
  fftw_plan plan = plan_cache().get(grid.nx, grid.ny, backward);
  auto in = aligned_buffer(n);
  auto out = aligned_buffer(n);
  std::memcpy(in.get(), x.data(), n * sizeof(fftw_complex));
  fftw_execute_dft(plan, in.get(), out.get());
  Eigen::ArrayXcd y(static_cast<Eigen::Index>(n));
  std::memcpy(static_cast<void *>(y.data()), out.get(), n * sizeof(fftw_complex));
  return y;
}

Eigen::ArrayXcd centered_to_natural(const Eigen::ArrayXcd &x, const KGrid &grid)
{
  Eigen::ArrayXcd y(x.size());
  for (int iy = 0; iy < grid.ny; ++iy) {
    const int ny_nat = (grid.ky_at(iy) + grid.ny) % grid.ny;
    for (int ix = 0; ix < grid.nx; ++ix) {
      const int nx_nat = (grid.kx_at(ix) + grid.nx) % grid.nx;
      y(ny_nat * grid.nx + nx_nat) = x(iy * grid.nx + ix);
    }
  }
  return y;
}

Eigen::ArrayXcd natural_to_centered(const Eigen::ArrayXcd &x, const KGrid &grid)
{
  Eigen::ArrayXcd y(x.size());
  for (int iy = 0; iy < grid.ny; ++iy) {
    const int ny_nat = (grid.ky_at(iy) + grid.ny) % grid.ny;
    for (int ix = 0; ix < grid.nx; ++ix) {
      const int nx_nat = (grid.kx_at(ix) + grid.nx) % grid.nx;
      y(iy * grid.nx + ix) = x(ny_nat * grid.nx + nx_nat);
    }
  }
  return y;
}

KArray fft2_unitary(const KArray &img)
{
  const double scale = 1.0 / std::sqrt(static_cast<double>(img.grid.size()));
  KArray out(img.grid, img.channels);
  for (int c = 0; c < img.channels; ++c)
    out.channel(c) = natural_to_centered(dft2(img.channel(c), img.grid, false), img.grid) * scale;
  return out;
}

KArray ifft2_unitary(const KArray &spec)
{
  const double scale = 1.0 / std::sqrt(static_cast<double>(spec.grid.size()));
  KArray out(spec.grid, spec.channels);
  for (int c = 0; c < spec.channels; ++c)
    out.channel(c) = dft2(centered_to_natural(spec.channel(c), spec.grid), spec.grid, true) * scale;
  return out;
}

} // namespace gslr
