#include "gslr/grid.hpp"

#include <string>

namespace gslr {

KGrid::KGrid(int nx_, int ny_)
  : nx(nx_)
  , ny(ny_)
{
  detail::require(nx > 0 && ny > 0, "KGrid dimensions must be positive, got " + std::to_string(nx) + "x" +
                                      std::to_string(ny));
}

KArray::KArray(const KGrid &g, int ch)
  : grid(g)
  , channels(ch)
{
  detail::require(ch >= 1, "KArray needs at least one channel");
  data = Eigen::ArrayXcd::Zero(static_cast<Eigen::Index>(g.size() * static_cast<std::size_t>(ch)));
}

bool KArray::all_finite() const
{
  return data.real().isFinite().all() && data.imag().isFinite().all();
}

SupportSet valid_index_set(const KGrid &grid, const SupportSet &filt)
{
  detail::require(filt.fx >= 1 && filt.fy >= 1, "filter support must be non-empty");
  detail::require(filt.fx <= grid.nx && filt.fy <= grid.ny,
                  "filter " + std::to_string(filt.fx) + "x" + std::to_string(filt.fy) + " larger than grid " +
                    std::to_string(grid.nx) + "x" + std::to_string(grid.ny));
  return SupportSet{grid.nx - filt.fx + 1, grid.ny - filt.fy + 1, filt.fx - 1, filt.fy - 1};
}

int derivative_channels(const KGrid &grid, int order)
{
  detail::require(order == 1 || order == 2, "derivative order must be 1 or 2");
  if (grid.is_1d())
    return 1;
  return order + 1;
}

std::vector<Eigen::ArrayXd> derivative_weights(const KGrid &grid, int order)
{
  const int nch = derivative_channels(grid, order);
  std::vector<Eigen::ArrayXd> w(static_cast<std::size_t>(nch), Eigen::ArrayXd(static_cast<Eigen::Index>(grid.size())));
  for (int iy = 0; iy < grid.ny; ++iy) {
    const double ky = grid.ky_at(iy);
    for (int ix = 0; ix < grid.nx; ++ix) {
      const double kx = grid.kx_at(ix);
      const auto i = static_cast<Eigen::Index>(iy * grid.nx + ix);
      if (grid.is_1d()) {
        w[0](i) = order == 1 ? kx : kx * kx;
      } else if (order == 1) {
        w[0](i) = kx;
        w[1](i) = ky;
      } else {
        w[0](i) = kx * kx;
        w[1](i) = kx * ky;
        w[2](i) = ky * ky;
      }
    }
  }
  return w;
}

Eigen::ArrayXd derivative_gram_diagonal(const KGrid &grid, int order)
{
  Eigen::ArrayXd d = Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(grid.size()));
  for (const auto &w : derivative_weights(grid, order))
    d += w.square();
  return d;
}

KArray apply_derivative_weights(const KArray &x, int order, bool adjoint)
{
  const int nch = derivative_channels(x.grid, order);
  const auto w = derivative_weights(x.grid, order);
  if (!adjoint) {
    detail::require(x.channels == 1, "forward derivative weighting expects 1 channel, got " +
                                       std::to_string(x.channels));
    KArray out(x.grid, nch);
    for (int c = 0; c < nch; ++c)
      out.channel(c) = x.channel(0) * w[static_cast<std::size_t>(c)];
    return out;
  }
  detail::require(x.channels == nch, "adjoint derivative weighting of order " + std::to_string(order) +
                                       " expects " + std::to_string(nch) + " channels, got " +
                                       std::to_string(x.channels));
  KArray out(x.grid, 1);
  for (int c = 0; c < nch; ++c)
    out.channel(0) += x.channel(c) * w[static_cast<std::size_t>(c)];
  return out;
}

} // namespace gslr
