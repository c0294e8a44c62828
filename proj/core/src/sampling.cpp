#include "gslr/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

namespace gslr {

namespace {

std::uint64_t splitmix64(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string format_double(double v)
{
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

int round_symmetric(double v)
{
  return static_cast<int>(std::copysign(std::floor(std::abs(v) + 0.5), v));
}

} // namespace

std::uint64_t CounterRng::bits(std::uint64_t counter) const
{
  return splitmix64(splitmix64(seed_) ^ splitmix64(counter + 0x632be59bd9b4e019ULL));
}

double CounterRng::uniform(std::uint64_t counter) const
{
  return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
}

std::pair<double, double> CounterRng::normal_pair(std::uint64_t counter) const
{
  const double u1 = uniform(2 * counter);
  const double u2 = uniform(2 * counter + 1);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double t = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(t), r * std::sin(t)};
}

Mask::Mask(const KGrid &g)
  : grid(g)
  , sampled(g.size(), 0)
{
}

std::size_t Mask::count() const
{
  return static_cast<std::size_t>(std::count(sampled.begin(), sampled.end(), std::uint8_t{1}));
}

Eigen::ArrayXd Mask::diagonal() const
{
  Eigen::ArrayXd d(static_cast<Eigen::Index>(sampled.size()));
  for (std::size_t i = 0; i < sampled.size(); ++i)
    d(static_cast<Eigen::Index>(i)) = sampled[i] ? 1.0 : 0.0;
  return d;
}

Mask full_mask(const KGrid &grid)
{
  Mask m(grid);
  std::fill(m.sampled.begin(), m.sampled.end(), std::uint8_t{1});
  m.provenance = {{"generator", "full"}};
  return m;
}

Mask radial_mask(const KGrid &grid, int n_spokes)
{
  detail::require(n_spokes >= 0, "radial_mask: spoke count must be non-negative");
  Mask m(grid);
  m.sampled[grid.dc_index()] = 1;
  const int radius = std::max(grid.nx, grid.ny) / 2;
  for (int j = 0; j < n_spokes; ++j) {
    const double theta = std::numbers::pi * j / n_spokes;
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    for (int t = -radius; t <= radius; ++t) {
      const int kx = round_symmetric(t * c);
      const int ky = grid.is_1d() ? 0 : round_symmetric(t * s);
      if (grid.contains(kx, ky))
        m.sampled[grid.index(kx, ky)] = 1;
    }
  }
  m.provenance = {{"generator", "radial"}, {"spokes", std::to_string(n_spokes)}};
  return m;
}

Mask variable_density_mask(const KGrid &grid, const VariableDensityParams &params)
{
  detail::require(params.target_accel > 1.0, "variable_density_mask: target acceleration must exceed 1");
  detail::require(params.center_fraction >= 0.0 && params.center_fraction < 1.0,
                  "variable_density_mask: center fraction must lie in [0, 1)");

  const std::size_t n = grid.size();
  const auto budget = std::max<std::size_t>(
    1, static_cast<std::size_t>(std::llround(static_cast<double>(n) / params.target_accel)));

  std::vector<double> radius(n);
  double kmax = 0.0;
  for (int iy = 0; iy < grid.ny; ++iy)
    for (int ix = 0; ix < grid.nx; ++ix) {
      const double r = std::hypot(grid.kx_at(ix), grid.ky_at(iy));
      radius[static_cast<std::size_t>(iy * grid.nx + ix)] = r;
      kmax = std::max(kmax, r);
    }

  // Central block: the ceil(center_fraction * n) points nearest DC (DC first).
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return radius[a] < radius[b]; });
  const auto n_center =
    std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(params.center_fraction * static_cast<double>(n))));
  if (n_center > budget)
    throw ContractError("variable_density_mask: infeasible target, central block of " + std::to_string(n_center) +
                        " points exceeds budget of " + std::to_string(budget));

  Mask m(grid);
  for (std::size_t i = 0; i < n_center; ++i)
    m.sampled[order[i]] = 1;

  // Efraimidis-Spirakis keys log(u)/w; the largest keys win.
  const CounterRng rng(params.seed);
  std::vector<std::pair<double, std::size_t>> keys;
  keys.reserve(n - n_center);
  for (std::size_t i = 0; i < n; ++i) {
    if (m.sampled[i])
      continue;
    const double w = std::pow(1.0 + (kmax > 0 ? radius[i] / kmax : 0.0), -params.density_power);
    keys.emplace_back(std::log(rng.uniform(i)) / w, i);
  }
  const std::size_t n_rand = budget - n_center;
  std::partial_sort(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(n_rand), keys.end(),
                    [](const auto &a, const auto &b) { return a.first > b.first || (a.first == b.first && a.second < b.second); });
  for (std::size_t i = 0; i < n_rand; ++i)
    m.sampled[keys[i].second] = 1;

  m.provenance = {{"generator", "variable_density"},
                  {"target_accel", format_double(params.target_accel)},
                  {"density_power", format_double(params.density_power)},
                  {"center_fraction", format_double(params.center_fraction)},
                  {"seed", std::to_string(params.seed)}};
  return m;
}

double acceleration(const Mask &mask)
{
  const std::size_t c = mask.count();
  detail::require(c > 0, "acceleration: empty mask");
  return static_cast<double>(mask.grid.size()) / static_cast<double>(c);
}

KArray apply_mask(const KArray &x, const Mask &mask)
{
  detail::require(x.grid == mask.grid, "apply_mask: grid mismatch");
  KArray out = x;
  const Eigen::ArrayXd d = mask.diagonal();
  for (int c = 0; c < x.channels; ++c)
    out.channel(c) *= d;
  return out;
}

KArray measure(const KArray &rho_hat, const Mask &mask, const NoiseModel &noise)
{
  detail::require(noise.sigma >= 0.0, "measure: noise sigma must be non-negative");
  KArray b = apply_mask(rho_hat, mask);
  if (noise.sigma == 0.0)
    return b;
  const CounterRng rng(noise.seed);
  const double s = noise.sigma / std::sqrt(2.0);
  const std::size_t n = rho_hat.grid.size();
  for (int c = 0; c < b.channels; ++c)
    for (std::size_t i = 0; i < n; ++i) {
      if (!mask[i])
        continue;
      const auto [g1, g2] = rng.normal_pair(static_cast<std::uint64_t>(c) * n + i);
      b.data(static_cast<Eigen::Index>(static_cast<std::size_t>(c) * n + i)) += cplx(s * g1, s * g2);
    }
  return b;
}

double snr_db(const KArray &recon, const KArray &orig)
{
  detail::require(recon.same_shape(orig), "snr_db: shape mismatch");
  const double ref = orig.data.abs2().sum();
  detail::require(ref > 0.0, "snr_db: reference image is zero");
  const double err = (orig.data - recon.data).abs2().sum();
  if (err == 0.0)
    return std::numeric_limits<double>::infinity();
  return -10.0 * std::log10(err / ref);
}

} // namespace gslr
