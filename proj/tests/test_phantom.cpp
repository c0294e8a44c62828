#include <doctest.h>

#include <cmath>

#include <Eigen/SVD>

#include "gslr/fft.hpp"
#include "gslr/lifting.hpp"
#include "gslr/phantom.hpp"

using namespace gslr;

namespace {

SyntheticSpec spec(PhantomKind k, KGrid g, std::uint64_t seed = 0)
{
  SyntheticSpec s;
  s.kind = k;
  s.grid = g;
  s.seed = seed;
  if (g.is_1d())
    s.edge_support = filter_support(3, 1);
  return s;
}

} // namespace

TEST_CASE("disk coefficient at DC is its area")
{
  for (const KGrid &g : {KGrid(32, 32), KGrid(64, 48), KGrid(128)}) {
    const Synthetic s = make_synthetic(spec(PhantomKind::disk_pc, g));
    const double dc = s.kspace.data(static_cast<Eigen::Index>(g.dc_index())).real();
    CHECK(dc == doctest::Approx(0.25 * std::sqrt(static_cast<double>(g.size()))).epsilon(0.02));
    CHECK(s.pl_kspace.norm() == 0.0);
  }
}

TEST_CASE("1-D interval coefficients are exact")
{
  const KGrid g(64);
  SyntheticSpec sp = spec(PhantomKind::disk_pc, g);
  sp.area_fraction = 0.3;
  const Synthetic s = make_synthetic(sp);
  // Indicator of [0.35, 0.65]: c_k = int exp(-2 pi i k x) dx.
  for (int k = -5; k <= 5; ++k) {
    const cplx ref = k == 0 ? cplx(0.3)
                            : (std::polar(1.0, -2.0 * M_PI * k * 0.65) - std::polar(1.0, -2.0 * M_PI * k * 0.35)) /
                                cplx(0.0, -2.0 * M_PI * k);
    CHECK(std::abs(s.kspace.data(static_cast<Eigen::Index>(g.index(k, 0))) / 8.0 - ref) < 1e-12);
  }
}

TEST_CASE("ramp with zero slope is a constant")
{
  SyntheticSpec sp = spec(PhantomKind::ramp_pl, KGrid(16, 16));
  sp.slope = 0.0;
  const Synthetic s = make_synthetic(sp);
  const Eigen::Index dc = static_cast<Eigen::Index>(sp.grid.dc_index());
  CHECK(s.kspace.data(dc).real() == doctest::Approx(16.0));
  Eigen::ArrayXcd rest = s.kspace.data;
  rest(dc) = 0.0;
  CHECK(rest.abs().maxCoeff() < 1e-10);
  CHECK((s.image.data - 1.0).abs().maxCoeff() < 1e-10);
}

TEST_CASE("mixed phantom split sums to the signal")
{
  for (const KGrid &g : {KGrid(256), KGrid(32, 32)}) {
    const Synthetic s = make_synthetic(spec(PhantomKind::mixed, g, 4));
    CHECK((s.pc_kspace.data + s.pl_kspace.data == s.kspace.data).all());
    CHECK(s.pc_kspace.norm() > 0.0);
    CHECK(s.pl_kspace.norm() > 0.0);
    CHECK((ifft2_unitary(s.kspace).data - s.image.data).abs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("piecewise-constant phantoms are annihilated")
{
  const Synthetic s = make_synthetic(spec(PhantomKind::trig_region_pc, KGrid(24, 24), 2));
  CHECK(s.edge_polynomial.rows() == 3);
  CHECK(s.edge_polynomial.cols() == 3);
  const Eigen::VectorXd sv = Eigen::BDCSVD<Eigen::MatrixXcd>(build_toeplitz(s.kspace, 1, filter_support(5, 5)).matrix).singularValues();
  CHECK(sv(sv.size() - 1) / sv(0) < 1e-8);

  // The linear part of a 1-D mixed signal carries slope changes only.
  const Synthetic m = make_synthetic(spec(PhantomKind::mixed, KGrid(128), 1));
  const Eigen::VectorXd s2 = Eigen::BDCSVD<Eigen::MatrixXcd>(build_toeplitz(m.pl_kspace, 2, filter_support(7)).matrix).singularValues();
  CHECK(s2(s2.size() - 1) / s2(0) < 1e-8);
}

TEST_CASE("phantoms are deterministic and validate input")
{
  const Synthetic a = make_synthetic(spec(PhantomKind::mixed, KGrid(32, 32), 7));
  const Synthetic b = make_synthetic(spec(PhantomKind::mixed, KGrid(32, 32), 7));
  const Synthetic c = make_synthetic(spec(PhantomKind::mixed, KGrid(32, 32), 8));
  CHECK((a.kspace.data == b.kspace.data).all());
  CHECK_FALSE((a.kspace.data == c.kspace.data).all());

  SyntheticSpec bad = spec(PhantomKind::disk_pc, KGrid(16, 16));
  bad.area_fraction = 0.9;
  CHECK_THROWS_AS(make_synthetic(bad), ContractError);
  bad.area_fraction = 0.25;
  bad.oversampling = 2;
  CHECK_THROWS_AS(make_synthetic(bad), ContractError);
  CHECK(phantom_kind_from_string(to_string(PhantomKind::ramp_pl)) == PhantomKind::ramp_pl);
  CHECK_THROWS_AS(phantom_kind_from_string("blob"), ContractError);
}
