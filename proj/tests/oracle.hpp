#pragma once

// Slow reference implementations, written directly from the definitions and
// sharing no code with the library beyond the grid/array containers.

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "gslr/grid.hpp"
#include "gslr/sampling.hpp"

namespace oracle {

using gslr::cplx;
using gslr::KArray;
using gslr::KGrid;
using gslr::SupportSet;

inline std::vector<Eigen::ArrayXd> weights(const KGrid &g, int order)
{
  std::vector<Eigen::ArrayXd> w;
  const int nch = g.ny == 1 ? 1 : order + 1;
  for (int c = 0; c < nch; ++c) {
    Eigen::ArrayXd a(static_cast<Eigen::Index>(g.size()));
    for (int iy = 0; iy < g.ny; ++iy)
      for (int ix = 0; ix < g.nx; ++ix) {
        const double kx = ix - g.nx / 2;
        const double ky = iy - g.ny / 2;
        double v = 0.0;
        if (g.ny == 1)
          v = std::pow(kx, order);
        else if (order == 1)
          v = c == 0 ? kx : ky;
        else
          v = c == 0 ? kx * kx : (c == 1 ? kx * ky : ky * ky);
        a(iy * g.nx + ix) = v;
      }
    w.push_back(a);
  }
  return w;
}

/// Full linear convolution of one weighted channel with h, then cropped to
/// the outputs that never touch the zero padding.
inline Eigen::VectorXcd valid_convolution(const Eigen::ArrayXcd &y, const KGrid &g, const Eigen::VectorXcd &h,
                                          const SupportSet &f)
{
  const int ox = g.nx + f.fx - 1;
  const int oy = g.ny + f.fy - 1;
  Eigen::ArrayXcd full = Eigen::ArrayXcd::Zero(ox * oy);
  for (int my = 0; my < g.ny; ++my)
    for (int mx = 0; mx < g.nx; ++mx)
      for (int b = 0; b < f.fy; ++b)
        for (int a = 0; a < f.fx; ++a)
          full((my + b) * ox + mx + a) += y(my * g.nx + mx) * h(b * f.fx + a);
  const int vx = g.nx - f.fx + 1;
  const int vy = g.ny - f.fy + 1;
  Eigen::VectorXcd out(vx * vy);
  for (int j = 0; j < vy; ++j)
    for (int i = 0; i < vx; ++i)
      out(j * vx + i) = full((j + f.fy - 1) * ox + i + f.fx - 1);
  return out;
}

/// Explicit lifting: column s is the stacked valid convolution of every
/// weighted channel with the unit filter e_s.
inline Eigen::MatrixXcd lifting(const KArray &x, int order, const SupportSet &f)
{
  const auto w = weights(x.grid, order);
  const auto nf = static_cast<Eigen::Index>(f.size());
  const Eigen::Index rows_ch = (x.grid.nx - f.fx + 1) * (x.grid.ny - f.fy + 1);
  Eigen::MatrixXcd t(rows_ch * static_cast<Eigen::Index>(w.size()), nf);
  for (std::size_t c = 0; c < w.size(); ++c) {
    const Eigen::ArrayXcd y = x.data * w[c];
    for (Eigen::Index s = 0; s < nf; ++s)
      t.block(static_cast<Eigen::Index>(c) * rows_ch, s, rows_ch, 1) =
        valid_convolution(y, x.grid, Eigen::VectorXcd::Unit(nf, s), f);
  }
  return t;
}

/// (G + eps I)^e through an eigendecomposition.
inline Eigen::MatrixXcd gram_power(const Eigen::MatrixXcd &g, double eps, double e)
{
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g);
  Eigen::VectorXd d = es.eigenvalues();
  for (Eigen::Index i = 0; i < d.size(); ++i)
    d(i) = std::pow(std::max(d(i), 0.0) + eps, e);
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
}

/// L with ||L rho||^2 = ||T(rho) H^(1/2)||_F^2, one column per k-space entry.
inline Eigen::MatrixXcd penalty_operator(const KGrid &g, int order, const SupportSet &f, const Eigen::MatrixXcd &h)
{
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  const Eigen::MatrixXcd hs = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
                              es.eigenvectors().adjoint();
  const auto n = static_cast<Eigen::Index>(g.size());
  Eigen::MatrixXcd l;
  for (Eigen::Index k = 0; k < n; ++k) {
    KArray e(g, 1);
    e.data(k) = 1.0;
    const Eigen::MatrixXcd th = lifting(e, order, f) * hs;
    if (l.size() == 0)
      l.resize(th.size(), n);
    l.col(k) = Eigen::Map<const Eigen::VectorXcd>(th.data(), th.size());
  }
  return l;
}

inline double penalty(const Eigen::MatrixXcd &g, double p, double eps)
{
  const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(g).eigenvalues();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    const double v = std::max(ev(i), 0.0) + eps;
    acc += p == 0.0 ? std::log(v) : 2.0 / p * std::pow(v, 0.5 * p);
  }
  return acc;
}

struct DenseResult
{
  KArray rho1;
  KArray rho2;
};

///
/// Reweighted least squares with every weighted subproblem solved by a dense
/// factorization. Mirrors the library conventions: b normalized to unit max
/// modulus, rho^(0) = A^* b in the first component, eps0 = scale * lambda_max
/// of the Gram of the zero-filled data, eps(n) = max(eps0 / eta^n, floor).
///
inline DenseResult dense_irls(const KArray &b, const gslr::Mask &mask, double lambda1, double lambda2, double p,
                              const SupportSet &f1, const SupportSet &f2, int outer, double eps_scale = 1e-2,
                              double eta = 2.0, double floor_scale = 1e-9)
{
  const KGrid &g = b.grid;
  const auto n = static_cast<Eigen::Index>(g.size());
  const double scale = b.data.abs().maxCoeff();
  Eigen::VectorXcd bn(n);
  Eigen::VectorXd a(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    a(k) = mask[static_cast<std::size_t>(k)] ? 1.0 : 0.0;
    bn(k) = a(k) * b.data(k) / scale;
  }
  KArray r1(g, 1), r2(g, 1);
  r1.data = bn.array();

  auto gram = [&](const KArray &x, int order, const SupportSet &f) {
    const Eigen::MatrixXcd t = lifting(x, order, f);
    return Eigen::MatrixXcd(t.adjoint() * t);
  };
  const double e1 = eps_scale * Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(gram(r1, 1, f1)).eigenvalues().maxCoeff();
  const double e2 = eps_scale * Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(gram(r1, 2, f2)).eigenvalues().maxCoeff();

  for (int it = 0; it < outer; ++it) {
    const double eps1 = std::max(e1 / std::pow(eta, it), floor_scale * e1);
    const double eps2 = std::max(e2 / std::pow(eta, it), floor_scale * e2);
    const Eigen::MatrixXcd l1 = penalty_operator(g, 1, f1, gram_power(gram(r1, 1, f1), eps1, 0.5 * p - 1.0));
    const Eigen::MatrixXcd l2 = penalty_operator(g, 2, f2, gram_power(gram(r2, 2, f2), eps2, 0.5 * p - 1.0));
    Eigen::MatrixXcd sys = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
    const Eigen::MatrixXcd am = a.cast<cplx>().asDiagonal();
    sys.topLeftCorner(n, n) = am + lambda1 * l1.adjoint() * l1;
    sys.bottomRightCorner(n, n) = am + lambda2 * l2.adjoint() * l2;
    sys.topRightCorner(n, n) = am;
    sys.bottomLeftCorner(n, n) = am;
    Eigen::VectorXcd rhs(2 * n);
    rhs << bn, bn;
    const Eigen::VectorXcd x = sys.ldlt().solve(rhs);
    r1.data = x.head(n).array();
    r2.data = x.tail(n).array();
  }
  r1.data *= scale;
  r2.data *= scale;
  return {r1, r2};
}

} // namespace oracle
