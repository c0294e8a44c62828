#include "gslr/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "gslr/fft.hpp"
#include "gslr/sampling.hpp"

namespace gslr {

std::string to_string(PhantomKind k)
{
  switch (k) {
  case PhantomKind::disk_pc: return "disk_pc";
  case PhantomKind::trig_region_pc: return "trig_region_pc";
  case PhantomKind::ramp_pl: return "ramp_pl";
  case PhantomKind::mixed: return "mixed";
  }
  return "mixed";
}

PhantomKind phantom_kind_from_string(const std::string &s)
{
  if (s == "disk_pc")
    return PhantomKind::disk_pc;
  if (s == "trig_region_pc")
    return PhantomKind::trig_region_pc;
  if (s == "ramp_pl")
    return PhantomKind::ramp_pl;
  if (s == "mixed")
    return PhantomKind::mixed;
  throw ContractError("unknown phantom kind '" + s + "'");
}

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;
const cplx I{0.0, 1.0};

using Interval = std::pair<double, double>;

/// Value c0 + cx x + cy y on a piece.
struct Linear
{
  double c0 = 1.0;
  double cx = 0.0;
  double cy = 0.0;
};

/// A region described row by row, with the y values where its row structure
/// changes (tangencies, caps).
struct Piece
{
  std::function<void(double, std::vector<Interval> &)> rows;
  std::vector<double> breakpoints;
  Linear value;
};

/// int_a^b (u0 + ux x) exp(-i w x) dx for every kx on the grid, accumulated into out.
void accumulate_row(const KGrid &g, double a, double b, double u0, double ux, Eigen::VectorXcd &out)
{
  for (int ix = 0; ix < g.nx; ++ix) {
    const int k = g.kx_at(ix);
    if (k == 0) {
      out(ix) += u0 * (b - a) + ux * 0.5 * (b * b - a * a);
      continue;
    }
    const double w = two_pi * k;
    const cplx ea = std::polar(1.0, -w * a);
    const cplx eb = std::polar(1.0, -w * b);
    const cplx e0 = (ea - eb) / (I * w);
    const cplx e1 = (a * ea - b * eb) / (I * w) + (eb - ea) / (w * w);
    out(ix) += u0 * e0 + ux * e1;
  }
}

struct TanhSinh
{
  std::vector<double> node;   // in (-1, 1)
  std::vector<double> weight; // for the reference interval
  TanhSinh()
  {
    const double h = 1.0 / 8.0;
    const double tmax = 3.2;
    for (double t = -tmax; t <= tmax + 1e-12; t += h) {
      const double s = 0.5 * std::numbers::pi * std::sinh(t);
      const double c = std::cosh(s);
      node.push_back(std::tanh(s));
      weight.push_back(h * 0.5 * std::numbers::pi * std::cosh(t) / (c * c));
    }
  }
};

Eigen::ArrayXcd coefficients_2d(const KGrid &g, const std::vector<Piece> &pieces, int oversampling)
{
  static const TanhSinh rule;
  Eigen::MatrixXcd coef = Eigen::MatrixXcd::Zero(g.ny, g.nx);
  Eigen::VectorXcd row(g.nx);
  Eigen::VectorXcd ey(g.ny);
  std::vector<Interval> ivals;

  for (const Piece &piece : pieces) {
    std::vector<double> cuts{0.0, 1.0};
    for (double b : piece.breakpoints)
      if (b > 0.0 && b < 1.0)
        cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());

    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
      const double lo = cuts[s];
      const double hi = cuts[s + 1];
      if (hi - lo <= 0.0)
        continue;
      const int panels = std::max(1, static_cast<int>(std::ceil((hi - lo) * g.ny * oversampling / 8.0)));
      const double plen = (hi - lo) / panels;
      for (int pn = 0; pn < panels; ++pn) {
        const double mid = lo + (pn + 0.5) * plen;
        const double half = 0.5 * plen;
        for (std::size_t q = 0; q < rule.node.size(); ++q) {
          const double y = mid + half * rule.node[q];
          const double wy = half * rule.weight[q];
          ivals.clear();
          piece.rows(y, ivals);
          if (ivals.empty())
            continue;
          row.setZero();
          const double u0 = piece.value.c0 + piece.value.cy * y;
          for (const auto &[a, b] : ivals)
            accumulate_row(g, a, b, u0, piece.value.cx, row);
          for (int iy = 0; iy < g.ny; ++iy)
            ey(iy) = std::polar(wy, -two_pi * g.ky_at(iy) * y);
          coef.noalias() += ey * row.transpose();
        }
      }
    }
  }

  Eigen::ArrayXcd out(static_cast<Eigen::Index>(g.size()));
  for (int iy = 0; iy < g.ny; ++iy)
    for (int ix = 0; ix < g.nx; ++ix)
      out(iy * g.nx + ix) = coef(iy, ix);
  return out;
}

/// 1-D: sum over segments of int (c0 + cx x) exp(-i w x) on [a, b].
Eigen::ArrayXcd coefficients_1d(const KGrid &g, const std::vector<std::pair<Interval, Linear>> &segments)
{
  Eigen::VectorXcd row = Eigen::VectorXcd::Zero(g.nx);
  for (const auto &[iv, v] : segments)
    accumulate_row(g, iv.first, iv.second, v.c0, v.cx, row);
  return row.array();
}

/// Simple roots of a smooth 1-periodic function on [0, 1), by sign scan + bisection.
std::vector<double> periodic_roots(const std::function<double(double)> &f, int samples)
{
  std::vector<double> roots;
  double x0 = 0.0;
  double f0 = f(x0);
  for (int i = 1; i <= samples; ++i) {
    const double x1 = static_cast<double>(i) / samples;
    const double f1 = f(x1);
    if ((f0 <= 0.0) != (f1 <= 0.0)) {
      double lo = x0, hi = x1, flo = f0;
      for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
        const double m = 0.5 * (lo + hi);
        const double fm = f(m);
        if ((fm <= 0.0) == (flo <= 0.0)) {
          lo = m;
          flo = fm;
        } else {
          hi = m;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    x0 = x1;
    f0 = f1;
  }
  return roots;
}

/// Real trigonometric polynomial with Hermitian coefficients on a centred support.
struct TrigPoly
{
  int dx = 0, dy = 0;   // half-widths
  Eigen::MatrixXcd c;   // (2dy+1) x (2dx+1), c(ky+dy, kx+dx)

  double operator()(double x, double y) const
  {
    cplx acc = 0.0;
    for (int ky = -dy; ky <= dy; ++ky)
      for (int kx = -dx; kx <= dx; ++kx)
        acc += c(ky + dy, kx + dx) * std::polar(1.0, two_pi * (kx * x + ky * y));
    return acc.real();
  }

  /// Row coefficient of exp(i 2 pi kx x) as a function of y.
  cplx row_coefficient(int kx, double y) const
  {
    cplx acc = 0.0;
    for (int ky = -dy; ky <= dy; ++ky)
      acc += c(ky + dy, kx + dx) * std::polar(1.0, two_pi * ky * y);
    return acc;
  }
};

TrigPoly random_edge_polynomial(const SupportSet &support, bool one_d, std::uint64_t seed, double area)
{
  detail::require(support.fx % 2 == 1 && support.fy % 2 == 1, "edge polynomial support must have odd sizes");
  detail::require(!one_d || support.fy == 1, "1-D edge polynomial must have fy == 1");
  TrigPoly mu;
  mu.dx = support.fx / 2;
  mu.dy = support.fy / 2;
  mu.c = Eigen::MatrixXcd::Zero(support.fy, support.fx);
  const CounterRng rng(seed ^ 0x5eed0fedcafeULL);
  std::uint64_t ctr = 0;
  for (int ky = -mu.dy; ky <= mu.dy; ++ky)
    for (int kx = -mu.dx; kx <= mu.dx; ++kx) {
      if (!(kx > 0 || (kx == 0 && ky > 0)))
        continue;
      const auto [g1, g2] = rng.normal_pair(ctr++);
      const cplx v(g1, g2);
      mu.c(ky + mu.dy, kx + mu.dx) = v;
      mu.c(-ky + mu.dy, -kx + mu.dx) = std::conj(v);
    }

  // Pick the constant term so that {mu <= 0} covers roughly `area` of the torus.
  const int m = one_d ? 4096 : 256;
  std::vector<double> samples;
  samples.reserve(static_cast<std::size_t>(m) * (one_d ? 1 : m));
  for (int j = 0; j < (one_d ? 1 : m); ++j)
    for (int i = 0; i < m; ++i)
      samples.push_back(mu(static_cast<double>(i) / m, static_cast<double>(j) / m));
  const auto n = samples.size();
  if (n == 0 || std::all_of(samples.begin(), samples.end(), [](double v) { return std::abs(v) < 1e-300; }))
    throw ContractError("degenerate region: edge polynomial support too small to bound a region");
  const auto kth = static_cast<std::ptrdiff_t>(area * static_cast<double>(n - 1));
  std::nth_element(samples.begin(), samples.begin() + kth, samples.end());
  mu.c(mu.dy, mu.dx) = -samples[static_cast<std::size_t>(kth)];
  return mu;
}

/// Region {mu <= 0} of a polynomial with x-degree <= 1, row by row in closed form.
Piece trig_region_piece(const TrigPoly &mu, Linear value)
{
  detail::require(mu.dx <= 1, "2-D trig regions need edge support x-extent <= 3");
  Piece piece;
  piece.value = value;
  piece.rows = [mu](double y, std::vector<Interval> &out) {
    const double a = mu.row_coefficient(0, y).real();
    if (mu.dx == 0) {
      if (a <= 0.0)
        out.emplace_back(0.0, 1.0);
      return;
    }
    const cplx p = mu.row_coefficient(1, y);
    const double r = 2.0 * std::abs(p);
    if (r <= std::abs(a)) {
      if (a <= 0.0)
        out.emplace_back(0.0, 1.0);
      return;
    }
    // mu = a + r cos(2 pi x + arg p) <= 0
    const double alpha = std::acos(std::clamp(-a / r, -1.0, 1.0));
    const double phi = std::arg(p);
    out.emplace_back((alpha - phi) / two_pi, (two_pi - alpha - phi) / two_pi);
  };
  if (mu.dx == 1) {
    auto disc = [mu](double y) {
      const double a = mu.row_coefficient(0, y).real();
      return 4.0 * std::norm(mu.row_coefficient(1, y)) - a * a;
    };
    piece.breakpoints = periodic_roots(disc, 8192);
  } else {
    auto a_of = [mu](double y) { return mu.row_coefficient(0, y).real(); };
    piece.breakpoints = periodic_roots(a_of, 8192);
  }
  return piece;
}

Piece ellipse_piece(double x0, double y0, double rx, double ry, Linear value)
{
  detail::require(rx > 0 && ry > 0 && x0 - rx >= 0 && x0 + rx <= 1 && y0 - ry >= 0 && y0 + ry <= 1,
                  "degenerate region: ellipse must lie inside the unit square");
  Piece piece;
  piece.value = value;
  piece.rows = [=](double y, std::vector<Interval> &out) {
    const double t = (y - y0) / ry;
    if (std::abs(t) >= 1.0)
      return;
    const double s = rx * std::sqrt(1.0 - t * t);
    out.emplace_back(x0 - s, x0 + s);
  };
  piece.breakpoints = {y0 - ry, y0 + ry};
  return piece;
}

std::vector<std::pair<Interval, Linear>> trig_region_segments_1d(const TrigPoly &mu, Linear value)
{
  const auto f = [&mu](double x) { return mu(x, 0.0); };
  std::vector<double> roots = periodic_roots(f, 4096 * std::max(1, mu.dx));
  std::vector<std::pair<Interval, Linear>> segs;
  if (roots.empty()) {
    if (f(0.5) <= 0.0)
      segs.push_back({{0.0, 1.0}, value});
    return segs;
  }
  roots.push_back(roots.front() + 1.0);
  for (std::size_t i = 0; i + 1 < roots.size(); ++i) {
    const double mid = 0.5 * (roots[i] + roots[i + 1]);
    if (f(mid - std::floor(mid)) <= 0.0)
      segs.push_back({{roots[i], roots[i + 1]}, value});
  }
  return segs;
}

KArray to_unitary(const KGrid &g, const Eigen::ArrayXcd &coef)
{
  KArray out(g, 1);
  out.channel(0) = coef * std::sqrt(static_cast<double>(g.size()));
  return out;
}

} // namespace

Synthetic make_synthetic(const SyntheticSpec &spec)
{
  detail::require(spec.oversampling >= 4, "make_synthetic: oversampling must be at least 4");
  const KGrid &g = spec.grid;
  const bool one_d = g.is_1d();
  const CounterRng rng(spec.seed);

  Synthetic out;
  out.pc_kspace = KArray(g, 1);
  out.pl_kspace = KArray(g, 1);

  switch (spec.kind) {
  case PhantomKind::disk_pc: {
    const double a = spec.area_fraction;
    if (one_d) {
      detail::require(a > 0.0 && a < 1.0, "degenerate region: area fraction must lie in (0, 1)");
      out.pc_kspace = to_unitary(g, coefficients_1d(g, {{{0.5 - 0.5 * a, 0.5 + 0.5 * a}, Linear{}}}));
    } else {
      detail::require(a > 0.0 && a < std::numbers::pi / 4.0,
                      "degenerate region: disk area fraction must lie in (0, pi/4)");
      const double r = std::sqrt(a / std::numbers::pi);
      out.pc_kspace = to_unitary(g, coefficients_2d(g, {ellipse_piece(0.5, 0.5, r, r, Linear{})}, spec.oversampling));
    }
    break;
  }
  case PhantomKind::trig_region_pc: {
    const double area = 0.35 + 0.2 * rng.uniform(1);
    const TrigPoly mu = random_edge_polynomial(spec.edge_support, one_d, spec.seed, area);
    out.edge_polynomial = mu.c;
    if (one_d)
      out.pc_kspace = to_unitary(g, coefficients_1d(g, trig_region_segments_1d(mu, Linear{})));
    else
      out.pc_kspace = to_unitary(g, coefficients_2d(g, {trig_region_piece(mu, Linear{})}, spec.oversampling));
    break;
  }
  case PhantomKind::ramp_pl: {
    if (one_d) {
      out.pl_kspace = to_unitary(g, coefficients_1d(g, {{{0.0, 1.0}, Linear{1.0 - 0.5 * spec.slope, spec.slope, 0.0}}}));
    } else {
      Piece full;
      full.rows = [](double, std::vector<Interval> &o) { o.emplace_back(0.0, 1.0); };
      full.value = Linear{1.0 - 0.75 * spec.slope, spec.slope, 0.5 * spec.slope};
      out.pl_kspace = to_unitary(g, coefficients_2d(g, {full}, spec.oversampling));
    }
    break;
  }
  case PhantomKind::mixed: {
    if (one_d) {
      // Piecewise-constant: levels between seeded jump locations.
      std::vector<std::pair<Interval, Linear>> pc;
      const int jumps = 4;
      std::vector<double> t;
      for (int i = 0; i < jumps; ++i)
        t.push_back((i + 0.15 + 0.7 * rng.uniform(10 + static_cast<std::uint64_t>(i))) / jumps);
      for (int i = 0; i < jumps; ++i) {
        const double lo = t[static_cast<std::size_t>(i)];
        const double hi = i + 1 < jumps ? t[static_cast<std::size_t>(i + 1)] : t[0] + 1.0;
        const double level = (i % 2 == 0 ? 1.0 : 0.35) + 0.3 * rng.uniform(20 + static_cast<std::uint64_t>(i));
        pc.push_back({{lo, hi}, Linear{level, 0.0, 0.0}});
      }
      out.pc_kspace = to_unitary(g, coefficients_1d(g, pc));
      // Piecewise-linear: two continuous hats, so the part carries slope
      // changes only and every jump belongs to the constant part.
      const double s1 = 0.08 + 0.1 * rng.uniform(30);
      const double s2 = 0.55 + 0.1 * rng.uniform(31);
      const double half = 0.125;
      const double k1 = 2.0 + rng.uniform(32);
      const double k2 = -(2.0 + rng.uniform(33));
      std::vector<std::pair<Interval, Linear>> pl;
      for (const auto &[s, k] : {std::pair{s1, k1}, std::pair{s2, k2}}) {
        pl.push_back({{s, s + half}, Linear{-k * s, k, 0.0}});
        pl.push_back({{s + half, s + 2.0 * half}, Linear{k * (s + 2.0 * half), -k, 0.0}});
      }
      out.pl_kspace = to_unitary(g, coefficients_1d(g, pl));
    } else {
      const double area = 0.3 + 0.15 * rng.uniform(1);
      const TrigPoly mu = random_edge_polynomial(spec.edge_support, false, spec.seed, area);
      out.edge_polynomial = mu.c;
      out.pc_kspace = to_unitary(g, coefficients_2d(g, {trig_region_piece(mu, Linear{1.0, 0.0, 0.0})}, spec.oversampling));
      const double x0 = 0.45 + 0.1 * rng.uniform(2);
      const double y0 = 0.45 + 0.1 * rng.uniform(3);
      const double rx = 0.25 + 0.1 * rng.uniform(4);
      const double ry = 0.2 + 0.1 * rng.uniform(5);
      const double cx = 2.0 * (rng.uniform(6) - 0.5) * 3.0;
      const double cy = 2.0 * (rng.uniform(7) - 0.5) * 3.0;
      const Linear ramp{0.5 - cx * x0 - cy * y0, cx, cy};
      out.pl_kspace = to_unitary(g, coefficients_2d(g, {ellipse_piece(x0, y0, rx, ry, ramp)}, spec.oversampling));
    }
    break;
  }
  }

  out.kspace = out.pc_kspace;
  out.kspace.data += out.pl_kspace.data;
  out.image = ifft2_unitary(out.kspace);
  return out;
}

} // namespace gslr
