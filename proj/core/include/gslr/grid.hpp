#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "gslr/error.hpp"

namespace gslr {

using cplx = std::complex<double>;

///
/// Rectangular Fourier lattice. Frequencies run over
/// kx in {-floor(nx/2), ..., ceil(nx/2)-1} (same for ky), so DC is always
/// present. Storage is row-major over (ky, kx); a 1-D signal is ny == 1.
///
/// Spatial arrays live on the same grid in natural order (x = 0..nx-1).
///
struct KGrid
{
  int nx = 1;
  int ny = 1;

  KGrid() = default;
  KGrid(int nx_, int ny_ = 1);

  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
  bool is_1d() const { return ny == 1; }

  int kx_min() const { return -(nx / 2); }
  int kx_max() const { return (nx + 1) / 2 - 1; }
  int ky_min() const { return -(ny / 2); }
  int ky_max() const { return (ny + 1) / 2 - 1; }

  /// Frequency at storage column/row.
  int kx_at(int ix) const { return ix - nx / 2; }
  int ky_at(int iy) const { return iy - ny / 2; }

  bool contains(int kx, int ky) const
  {
    return kx >= kx_min() && kx <= kx_max() && ky >= ky_min() && ky <= ky_max();
  }

  /// Storage offset of frequency (kx, ky).
  std::size_t index(int kx, int ky) const
  {
    return static_cast<std::size_t>(ky + ny / 2) * static_cast<std::size_t>(nx) +
           static_cast<std::size_t>(kx + nx / 2);
  }

  std::size_t dc_index() const { return index(0, 0); }

  friend bool operator==(const KGrid &, const KGrid &) = default;
};

/// Multi-channel complex array on a grid; channel-major, then row-major (ky, kx).
struct KArray
{
  KGrid grid;
  int channels = 1;
  Eigen::ArrayXcd data;

  KArray() = default;
  KArray(const KGrid &g, int ch);

  static KArray zeros(const KGrid &g, int ch = 1) { return KArray(g, ch); }

  std::size_t channel_size() const { return grid.size(); }

  auto channel(int c) { return data.segment(static_cast<Eigen::Index>(c * grid.size()), static_cast<Eigen::Index>(grid.size())); }
  auto channel(int c) const { return data.segment(static_cast<Eigen::Index>(c * grid.size()), static_cast<Eigen::Index>(grid.size())); }

  cplx &at(int c, int ix, int iy) { return data(static_cast<Eigen::Index>(c * grid.size() + iy * grid.nx + ix)); }
  const cplx &at(int c, int ix, int iy) const { return data(static_cast<Eigen::Index>(c * grid.size() + iy * grid.nx + ix)); }

  bool same_shape(const KArray &o) const { return grid == o.grid && channels == o.channels; }
  bool all_finite() const;
  double norm() const { return std::sqrt(data.abs2().sum()); }
};

/// Rectangular support. For a filter support the offset is (0, 0); for a
/// valid set it is the position of its first row inside the grid.
struct SupportSet
{
  int fx = 1;
  int fy = 1;
  int offset_x = 0;
  int offset_y = 0;

  std::size_t size() const { return static_cast<std::size_t>(fx) * static_cast<std::size_t>(fy); }
  friend bool operator==(const SupportSet &, const SupportSet &) = default;
};

/// Filter support of size fx x fy.
inline SupportSet filter_support(int fx, int fy = 1) { return SupportSet{fx, fy, 0, 0}; }

/// Valid-convolution output set of `filt` on `grid`: (nx-fx+1) x (ny-fy+1).
SupportSet valid_index_set(const KGrid &grid, const SupportSet &filt);

/// Number of derivative channels produced by M1 (order 1) or M2 (order 2).
/// On 1-D grids every order collapses to a single kx^order channel.
int derivative_channels(const KGrid &grid, int order);

/// Real weight per channel (kx, ky) or (kx^2, kx ky, ky^2), one array per channel.
std::vector<Eigen::ArrayXd> derivative_weights(const KGrid &grid, int order);

/// Diagonal of M^* M: kx^2+ky^2 for order 1, kx^4+kx^2 ky^2+ky^4 for order 2.
Eigen::ArrayXd derivative_gram_diagonal(const KGrid &grid, int order);

/// Forward: 1 channel -> derivative_channels(order). Adjoint: the reverse.
KArray apply_derivative_weights(const KArray &x, int order, bool adjoint = false);

} // namespace gslr
