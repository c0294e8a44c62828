#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Core>

#include "gslr/grid.hpp"

namespace gslr {

enum class PhantomKind
{
  disk_pc,        // indicator of a centred disk (an interval in 1-D)
  trig_region_pc, // indicator of {mu <= 0}, mu a real trigonometric polynomial
  ramp_pl,        // global linear ramp, periodic with one wrap edge per axis
  mixed           // piecewise-constant region + linear ramp on an ellipse
};

std::string to_string(PhantomKind k);
PhantomKind phantom_kind_from_string(const std::string &s);

struct SyntheticSpec
{
  PhantomKind kind = PhantomKind::mixed;
  KGrid grid{64, 64};
  /// Support of the edge polynomial mu (odd sizes; x-extent <= 3 on 2-D grids).
  SupportSet edge_support = filter_support(3, 3);
  /// Quadrature density across rows; >= 4.
  int oversampling = 8;
  std::uint64_t seed = 0;
  double area_fraction = 0.25; // disk_pc
  double slope = 1.0;          // ramp_pl
};

struct Synthetic
{
  KArray kspace;    // unitary-scaled Fourier coefficients on the grid
  KArray image;     // ifft2_unitary(kspace)
  KArray pc_kspace; // piecewise-constant part (zero for ramp_pl)
  KArray pl_kspace; // piecewise-linear part (zero for *_pc)
  /// Coefficients of mu (edge_support.fy x edge_support.fx, centred) for
  /// trig_region_pc and the constant part of mixed; empty otherwise.
  Eigen::MatrixXcd edge_polynomial;
};

///
/// Builds a continuous-domain model on the unit torus and returns its Fourier
/// series coefficients c_k scaled by sqrt(nx ny), so that they coincide with
/// the unitary DFT convention. Row integrals are evaluated in closed form and
/// the integral across rows by tanh-sinh quadrature split at every point where
/// the row structure changes, so coefficients are accurate to near machine
/// precision rather than rasterization-limited.
///
Synthetic make_synthetic(const SyntheticSpec &spec);

} // namespace gslr
