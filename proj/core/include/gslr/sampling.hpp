#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gslr/grid.hpp"

namespace gslr {

using Provenance = std::map<std::string, std::string>;

/// Binary k-space sampling set. Realizes A (and A^* A, which is diagonal).
struct Mask
{
  KGrid grid;
  std::vector<std::uint8_t> sampled; // 0/1 per k-index, centered storage
  Provenance provenance;

  Mask() = default;
  explicit Mask(const KGrid &g);

  std::size_t count() const;
  bool operator[](std::size_t i) const { return sampled[i] != 0; }

  /// 0/1 weights of A^* A.
  Eigen::ArrayXd diagonal() const;
};

Mask full_mask(const KGrid &grid);

/// Union of n_spokes lines through DC at angles j*pi/n_spokes, sampled at unit
/// radial steps out to radius n/2 and rounded symmetrically to the lattice.
Mask radial_mask(const KGrid &grid, int n_spokes);

struct VariableDensityParams
{
  double target_accel = 4.0;
  double density_power = 3.0;
  double center_fraction = 0.02;
  std::uint64_t seed = 0;
};

/// Fully sampled central disk plus a weighted draw without replacement with
/// weights (1 + |k|/k_max)^-density_power, sized to hit target_accel.
Mask variable_density_mask(const KGrid &grid, const VariableDensityParams &params);

double acceleration(const Mask &mask);

/// A^* A x: zero every unsampled entry of every channel.
KArray apply_mask(const KArray &x, const Mask &mask);

struct NoiseModel
{
  double sigma = 0.0; // absolute std of the complex noise
  std::uint64_t seed = 0;
};

/// b = mask o rho_hat + n, with complex white Gaussian n of per-component std
/// sigma/sqrt(2) on sampled entries only.
KArray measure(const KArray &rho_hat, const Mask &mask, const NoiseModel &noise);

/// -10 log10(|orig - recon|^2 / |orig|^2); +infinity for an exact match.
double snr_db(const KArray &recon, const KArray &orig);

///
/// Stateless counter-based generator: every draw is a pure function of
/// (seed, counter), so masks and noise do not depend on evaluation order.
///
class CounterRng
{
public:
  explicit CounterRng(std::uint64_t seed)
    : seed_(seed)
  {
  }

  std::uint64_t bits(std::uint64_t counter) const;
  /// Uniform in the open interval (0, 1).
  double uniform(std::uint64_t counter) const;
  /// Standard normal pair (Box-Muller on two consecutive counters).
  std::pair<double, double> normal_pair(std::uint64_t counter) const;

private:
  std::uint64_t seed_;
};

} // namespace gslr
