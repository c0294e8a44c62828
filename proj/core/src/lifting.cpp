#include "gslr/lifting.hpp"

#include <cmath>
#include <string>

#include "gslr/fft.hpp"

namespace gslr {

namespace {

void check_lifting_args(const KArray &x, const SupportSet &filt)
{
  detail::require(x.channels == 1, "lifting expects a single-channel array");
  detail::require(x.all_finite(), "lifting input contains non-finite values");
  (void)valid_index_set(x.grid, filt);
}

} // namespace

LiftedMatrix build_toeplitz(const KArray &x, int order, const SupportSet &filt)
{
  check_lifting_args(x, filt);
  const KGrid &g = x.grid;
  const SupportSet valid = valid_index_set(g, filt);
  const KArray w = apply_derivative_weights(x, order);

  LiftedMatrix t;
  t.order = order;
  t.grid = g;
  t.filter = filt;
  t.valid = valid;
  t.channels = w.channels;
  const auto nrows_ch = static_cast<Eigen::Index>(valid.size());
  t.matrix.resize(nrows_ch * w.channels, static_cast<Eigen::Index>(filt.size()));

  for (int c = 0; c < w.channels; ++c)
    for (int j = 0; j < valid.fy; ++j)
      for (int i = 0; i < valid.fx; ++i) {
        const Eigen::Index row = c * nrows_ch + j * valid.fx + i;
        for (int b = 0; b < filt.fy; ++b)
          for (int a = 0; a < filt.fx; ++a)
            t.matrix(row, b * filt.fx + a) = w.at(c, i + filt.fx - 1 - a, j + filt.fy - 1 - b);
      }
  return t;
}

Eigen::MatrixXcd gram_matrix(const KArray &x, int order, const SupportSet &filt, bool fast)
{
  if (!fast) {
    const LiftedMatrix t = build_toeplitz(x, order, filt);
    return t.matrix.adjoint() * t.matrix;
  }

  check_lifting_args(x, filt);
  const KGrid &g = x.grid;
  const SupportSet valid = valid_index_set(g, filt);
  const KArray w = apply_derivative_weights(x, order);
  const auto nf = static_cast<Eigen::Index>(filt.size());
  const double inv_n = 1.0 / static_cast<double>(g.size());

  // G[s, s'] = sum_{i in valid window} conj(w[i + s]) w[i + s'], with s the
  // window shift of a column. For fixed s this is the cross-correlation of w
  // with its shifted window u_s; lags stay below n so the circular FFT
  // correlation never wraps.
  Eigen::MatrixXcd gram = Eigen::MatrixXcd::Zero(nf, nf);
  Eigen::ArrayXcd u(static_cast<Eigen::Index>(g.size()));
  for (int c = 0; c < w.channels; ++c) {
    const Eigen::ArrayXcd wc = w.channel(c);
    const Eigen::ArrayXcd wf = dft2(wc, g, false);
    for (int b = 0; b < filt.fy; ++b)
      for (int a = 0; a < filt.fx; ++a) {
        const int sx = filt.fx - 1 - a;
        const int sy = filt.fy - 1 - b;
        u.setZero();
        for (int j = 0; j < valid.fy; ++j)
          for (int i = 0; i < valid.fx; ++i)
            u(j * g.nx + i) = wc((j + sy) * g.nx + i + sx);
        const Eigen::ArrayXcd uf = dft2(u, g, false);
        const Eigen::ArrayXcd corr = dft2(uf.conjugate() * wf, g, true) * inv_n;
        const Eigen::Index col = b * filt.fx + a;
        for (int ty = 0; ty < filt.fy; ++ty)
          for (int tx = 0; tx < filt.fx; ++tx) {
            const Eigen::Index col2 = (filt.fy - 1 - ty) * filt.fx + (filt.fx - 1 - tx);
            gram(col, col2) += corr(ty * g.nx + tx);
          }
      }
  }
  return (gram + gram.adjoint()) * 0.5;
}

double schatten_p(const Eigen::MatrixXcd &mat, double p)
{
  detail::require(p >= 0.0 && p <= 1.0, "schatten_p: p must lie in [0, 1]");
  detail::require(mat.allFinite(), "schatten_p: matrix contains non-finite values");
  const Eigen::VectorXd sv = Eigen::BDCSVD<Eigen::MatrixXcd>(mat).singularValues();
  double acc = 0.0;
  if (p == 0.0) {
    for (double s : sv)
      acc += std::log(std::max(s, 1e-15));
    return acc;
  }
  for (double s : sv)
    acc += std::pow(s, p);
  return acc / p;
}

double smoothed_schatten(const Eigen::VectorXd &gram_eigenvalues, double p, double eps)
{
  detail::require(p >= 0.0 && p <= 1.0, "smoothed_schatten: p must lie in [0, 1]");
  detail::require(eps > 0.0, "smoothed_schatten: eps must be positive");
  double acc = 0.0;
  for (double l : gram_eigenvalues) {
    const double v = std::max(l, 0.0) + eps;
    acc += p == 0.0 ? std::log(v) : std::pow(v, 0.5 * p);
  }
  return p == 0.0 ? acc : 2.0 * acc / p;
}

FilterBank weight_sqrt_columns(const Eigen::MatrixXcd &gram, const KGrid &grid, const SupportSet &support, double p,
                               double eps)
{
  detail::require(gram.rows() == gram.cols() && gram.rows() == static_cast<Eigen::Index>(support.size()),
                  "weight_sqrt_columns: Gram size does not match filter support");
  detail::require(eps > 0.0, "weight_sqrt_columns: eps must be positive");
  detail::require(p >= 0.0 && p <= 1.0, "weight_sqrt_columns: p must lie in [0, 1]");
  const double scale = std::max(1.0, gram.cwiseAbs().maxCoeff());
  const double asym = (gram - gram.adjoint()).cwiseAbs().maxCoeff();
  detail::require(asym <= 1e-10 * scale, "weight_sqrt_columns: Gram matrix is not Hermitian (asymmetry " +
                                           std::to_string(asym) + ")");

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(gram);
  if (eig.info() != Eigen::Success)
    throw SolverError("weight_sqrt_columns: eigendecomposition failed");

  FilterBank bank;
  bank.grid = grid;
  bank.support = support;
  bank.eigenvalues = eig.eigenvalues();
  bank.scales.resize(bank.eigenvalues.size());
  const double expo = 0.25 * p - 0.5;
  for (Eigen::Index l = 0; l < bank.eigenvalues.size(); ++l)
    bank.scales(l) = std::pow(std::max(bank.eigenvalues(l), 0.0) + eps, expo);
  bank.columns = eig.eigenvectors() * bank.scales.asDiagonal();
  return bank;
}

SpectrumMask filter_spectrum_mask(const FilterBank &bank)
{
  const KGrid &g = bank.grid;
  const SupportSet &f = bank.support;
  detail::require(f.fx <= g.nx && f.fy <= g.ny, "filter_spectrum_mask: filter larger than grid");

  // sum_l |mu_l|^2 is the trigonometric polynomial whose coefficient at lag d
  // is the d-th diagonal sum of H = sum_l h_l h_l^*; one backward DFT suffices.
  const Eigen::MatrixXcd h = bank.columns * bank.columns.adjoint();
  Eigen::ArrayXcd lags = Eigen::ArrayXcd::Zero(static_cast<Eigen::Index>(g.size()));
  for (int b = 0; b < f.fy; ++b)
    for (int a = 0; a < f.fx; ++a)
      for (int b2 = 0; b2 < f.fy; ++b2)
        for (int a2 = 0; a2 < f.fx; ++a2) {
          const int dx = ((a - a2) % g.nx + g.nx) % g.nx;
          const int dy = ((b - b2) % g.ny + g.ny) % g.ny;
          lags(dy * g.nx + dx) += h(b * f.fx + a, b2 * f.fx + a2);
        }
  SpectrumMask s;
  s.grid = g;
  s.values = dft2(lags, g, true).real().max(0.0);
  return s;
}

LiftedQuadratic lifted_quadratic(const FilterBank &bank)
{
  const KGrid &g = bank.grid;
  const SupportSet &f = bank.support;
  const SupportSet valid = valid_index_set(g, f);
  const Eigen::MatrixXcd h = bank.columns * bank.columns.adjoint();
  const int lx = 2 * f.fx - 1;
  const int ly = 2 * f.fy - 1;

  LiftedQuadratic q;
  q.grid = g;
  q.filter = f;
  q.taps.assign(static_cast<std::size_t>(lx * ly), Eigen::ArrayXcd::Zero(static_cast<Eigen::Index>(g.size())));

  // u^* N u = sum_{r in valid} sum_{a,t} H[a, t] u[r + f-1 - a] conj(u[r + f-1 - t]).
  // Output m = r + f-1 - t couples to input m + (t - a); the pair contributes
  // wherever r = m - (f-1) + t lies in the valid set, a box in m.
  for (int ty = 0; ty < f.fy; ++ty)
    for (int tx = 0; tx < f.fx; ++tx)
      for (int ay = 0; ay < f.fy; ++ay)
        for (int ax = 0; ax < f.fx; ++ax) {
          const cplx v = h(ay * f.fx + ax, ty * f.fx + tx);
          auto &tap = q.taps[static_cast<std::size_t>((ty - ay + f.fy - 1) * lx + (tx - ax + f.fx - 1))];
          const int mx0 = f.fx - 1 - tx;
          const int my0 = f.fy - 1 - ty;
          for (int my = my0; my < my0 + valid.fy; ++my)
            tap.segment(my * g.nx + mx0, valid.fx) += v;
        }
  return q;
}

Eigen::ArrayXcd LiftedQuadratic::apply(const Eigen::ArrayXcd &u) const
{
  detail::require(u.size() == static_cast<Eigen::Index>(grid.size()), "LiftedQuadratic::apply: size mismatch");
  const int nx = grid.nx;
  const int ny = grid.ny;
  const int lx = 2 * filter.fx - 1;
  Eigen::ArrayXcd out = Eigen::ArrayXcd::Zero(u.size());
  for (int dy = 1 - filter.fy; dy < filter.fy; ++dy)
    for (int dx = 1 - filter.fx; dx < filter.fx; ++dx) {
      const Eigen::ArrayXcd &tap = taps[static_cast<std::size_t>((dy + filter.fy - 1) * lx + dx + filter.fx - 1)];
      const int x0 = std::max(0, -dx);
      const int len = nx - std::abs(dx);
      if (len <= 0)
        continue;
      for (int my = std::max(0, -dy); my < std::min(ny, ny - dy); ++my) {
        const Eigen::Index o = my * nx + x0;
        out.segment(o, len) += tap.segment(o, len) * u.segment(o + dy * nx + dx, len);
      }
    }
  return out;
}

const Eigen::ArrayXcd &LiftedQuadratic::diagonal() const
{
  return taps[static_cast<std::size_t>((filter.fy - 1) * (2 * filter.fx - 1) + filter.fx - 1)];
}

} // namespace gslr
