#pragma once

#include <Eigen/Core>

#include "gslr/grid.hpp"

namespace gslr {

/// Unitary forward DFT of a spatial array (natural order) into a centered spectrum.
KArray fft2_unitary(const KArray &img);

/// Adjoint (= inverse) of fft2_unitary.
KArray ifft2_unitary(const KArray &spec);

///
/// Unnormalized natural-order DFT of one nx x ny channel:
///   forward  X[k] = sum_r x[r] exp(-2 pi i k.r / n)
///   backward x[r] = sum_k X[k] exp(+2 pi i k.r / n)
///
Eigen::ArrayXcd dft2(const Eigen::ArrayXcd &x, const KGrid &grid, bool backward);

/// Reorder between centered spectral storage and natural DFT order.
Eigen::ArrayXcd centered_to_natural(const Eigen::ArrayXcd &x, const KGrid &grid);
Eigen::ArrayXcd natural_to_centered(const Eigen::ArrayXcd &x, const KGrid &grid);

} // namespace gslr
