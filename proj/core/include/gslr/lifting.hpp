#pragma once

#include <vector>

#include <Eigen/Dense>

#include "gslr/grid.hpp"

namespace gslr {

///
/// Dense derivative-weighted Toeplitz lifting T_order(x).
///
/// Rows are stacked per derivative channel ([Tx; Ty] or [Txx; Txy; Tyy]),
/// each block indexed row-major over the valid set; columns index the filter
/// support row-major over (b, a). Multiplying by a vectorized filter gives the
/// valid-region linear convolution of every weighted channel with it.
///
struct LiftedMatrix
{
  int order = 1;
  KGrid grid;
  SupportSet filter;
  SupportSet valid;
  int channels = 1;
  Eigen::MatrixXcd matrix;
};

LiftedMatrix build_toeplitz(const KArray &x, int order, const SupportSet &filt);

/// T^* T. The fast path builds it from FFT cross-correlations of each weighted
/// channel against its valid-window restrictions, so it is exact, not circulant.
Eigen::MatrixXcd gram_matrix(const KArray &x, int order, const SupportSet &filt, bool fast = true);

/// (1/p) sum sigma_i^p for p in (0, 1]; sum log sigma_i for p == 0 (sigma floored at 1e-15).
double schatten_p(const Eigen::MatrixXcd &mat, double p);

///
/// Penalty whose gradient with respect to G is (G + eps I)^(p/2 - 1):
/// (2/p) sum (lambda_i + eps)^(p/2), or sum log(lambda_i + eps) at p == 0.
/// Equals schatten_p(G + eps I, p / 2).
///
double smoothed_schatten(const Eigen::VectorXd &gram_eigenvalues, double p, double eps);

/// Columns of H^(1/2) with H = (G + eps I)^(p/2 - 1); each column is an
/// eigenvector of G scaled by (lambda + eps)^(p/4 - 1/2).
struct FilterBank
{
  KGrid grid;
  SupportSet support;
  Eigen::MatrixXcd columns;   // |support| x |support|
  Eigen::VectorXd eigenvalues; // of G, ascending
  Eigen::VectorXd scales;

  Eigen::Index count() const { return columns.cols(); }
};

FilterBank weight_sqrt_columns(const Eigen::MatrixXcd &gram, const KGrid &grid, const SupportSet &support, double p,
                               double eps);

/// Diagonal S(r) = sum_l |mu_l(r)|^2, mu_l(r) = sum_k h_l[k] exp(2 pi i k.r / n).
struct SpectrumMask
{
  KGrid grid;
  Eigen::ArrayXd values; // spatial, natural order
};

SpectrumMask filter_spectrum_mask(const FilterBank &bank);

///
/// Exact quadratic form of the weighted lifting on one derivative channel:
/// u^* N u = ||T(u) H^(1/2)||_F^2 with H = sum_l h_l h_l^*. N is a local
/// k-space kernel with (2fx-1) x (2fy-1) taps whose values vary only within
/// fx-1 (fy-1) samples of the grid border; in the interior it is the
/// circulant operator of the spectrum mask.
///
struct LiftedQuadratic
{
  KGrid grid;
  SupportSet filter;
  std::vector<Eigen::ArrayXcd> taps; // lag (dx, dy) at (dy + fy - 1) * (2fx - 1) + dx + fx - 1

  /// (N u)[m] = sum_d taps_d[m] u[m + d].
  Eigen::ArrayXcd apply(const Eigen::ArrayXcd &u) const;
  /// Zero-lag tap, the diagonal of N.
  const Eigen::ArrayXcd &diagonal() const;
};

LiftedQuadratic lifted_quadratic(const FilterBank &bank);

} // namespace gslr
