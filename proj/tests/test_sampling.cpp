#include <doctest.h>

#include <cmath>
#include <limits>

#include "gslr/sampling.hpp"
#include "support.hpp"

using namespace gslr;

TEST_CASE("counter rng is a pure function of seed and counter")
{
  const CounterRng a(5), b(5), c(6);
  CHECK(a.bits(17) == b.bits(17));
  CHECK(a.bits(17) != c.bits(17));
  CHECK(a.bits(17) != a.bits(18));
  double mean = 0.0, var = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double u = a.uniform(static_cast<std::uint64_t>(i));
    CHECK(u > 0.0);
    CHECK(u < 1.0);
    const auto [g, h] = a.normal_pair(static_cast<std::uint64_t>(i));
    mean += g + h;
    var += g * g + h * h;
  }
  CHECK(std::abs(mean / (2 * n)) < 0.03);
  CHECK(std::abs(var / (2 * n) - 1.0) < 0.03);
}

TEST_CASE("radial mask")
{
  const Mask m = radial_mask(KGrid(256, 256), 26);
  CHECK(acceleration(m) == doctest::Approx(10.56).epsilon(0.005));
  CHECK(m[m.grid.dc_index()]);
  CHECK(m.provenance.at("spokes") == "26");
  const Mask m2 = radial_mask(KGrid(256, 256), 26);
  CHECK(m.sampled == m2.sampled);
  // Spokes through DC are symmetric under k -> -k where both lie on the grid.
  for (int ky = -100; ky <= 100; ++ky)
    for (int kx = -100; kx <= 100; ++kx)
      CHECK(m[m.grid.index(kx, ky)] == m[m.grid.index(-kx, -ky)]);
  CHECK(radial_mask(KGrid(16, 16), 0).count() == 1);
  CHECK_THROWS_AS(radial_mask(KGrid(8, 8), -1), ContractError);
}

TEST_CASE("variable density mask hits its budget")
{
  for (double target : {2.0, 4.0, 6.5})
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const Mask m = variable_density_mask(KGrid(64, 48), {target, 3.0, 0.02, seed});
      CHECK(std::abs(acceleration(m) / target - 1.0) < 0.10);
      CHECK(m[m.grid.dc_index()]);
    }
  const Mask a = variable_density_mask(KGrid(32, 32), {4.0, 3.0, 0.02, 1});
  const Mask b = variable_density_mask(KGrid(32, 32), {4.0, 3.0, 0.02, 1});
  const Mask c = variable_density_mask(KGrid(32, 32), {4.0, 3.0, 0.02, 2});
  CHECK(a.sampled == b.sampled);
  CHECK(a.sampled != c.sampled);
  CHECK(a.provenance.at("seed") == "1");
  CHECK(acceleration(variable_density_mask(KGrid(256), {2.0, 3.0, 0.02, 0})) == doctest::Approx(2.0));
}

TEST_CASE("variable density mask favours low frequencies")
{
  const KGrid g(64, 64);
  std::size_t inner = 0, outer = 0, n_inner = 0, n_outer = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Mask m = variable_density_mask(g, {4.0, 3.0, 0.02, seed});
    for (int ky = g.ky_min(); ky <= g.ky_max(); ++ky)
      for (int kx = g.kx_min(); kx <= g.kx_max(); ++kx) {
        const double r = std::hypot(kx, ky);
        if (r < 12) {
          inner += m[g.index(kx, ky)];
          ++n_inner;
        } else if (r > 24) {
          outer += m[g.index(kx, ky)];
          ++n_outer;
        }
      }
  }
  CHECK(static_cast<double>(inner) / n_inner > 1.5 * static_cast<double>(outer) / n_outer);
}

TEST_CASE("variable density rejects bad parameters")
{
  CHECK_THROWS_AS(variable_density_mask(KGrid(16, 16), {1.0, 3.0, 0.02, 0}), ContractError);
  CHECK_THROWS_AS(variable_density_mask(KGrid(16, 16), {4.0, 3.0, 1.0, 0}), ContractError);
  CHECK_THROWS_AS(variable_density_mask(KGrid(16, 16), {4.0, 3.0, 0.5, 0}), ContractError);
  CHECK_THROWS_AS(acceleration(Mask(KGrid(4, 4))), ContractError);
}

TEST_CASE("measurement and noise")
{
  const KGrid g(32, 32);
  const Mask m = variable_density_mask(g, {2.0, 3.0, 0.02, 3});
  const KArray x = testing::random_array(g, 2, 4);
  const KArray b = measure(x, m, {});
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    CHECK(b.data(k) == (m[i] ? x.data(k) : cplx(0.0)));
  }
  const KArray bn = measure(x, m, {0.5, 9});
  CHECK((bn.data == measure(x, m, {0.5, 9}).data).all());
  double power = 0.0;
  for (int c = 0; c < 2; ++c)
    for (std::size_t i = 0; i < g.size(); ++i) {
      const auto k = static_cast<Eigen::Index>(c * g.size() + i);
      if (!m[i])
        CHECK(bn.data(k) == cplx(0.0));
      else
        power += std::norm(bn.data(k) - x.data(k));
    }
  CHECK(power / (2.0 * static_cast<double>(m.count())) == doctest::Approx(0.25).epsilon(0.08));
  CHECK_THROWS_AS(measure(x, m, {-1.0, 0}), ContractError);
}

TEST_CASE("snr")
{
  const KArray x = testing::random_array(KGrid(8, 8), 1, 1);
  CHECK(snr_db(x, x) == std::numeric_limits<double>::infinity());
  KArray y = x;
  y.data *= 1.1;
  CHECK(snr_db(y, x) == doctest::Approx(20.0));
  CHECK_THROWS_AS(snr_db(x, KArray(KGrid(8, 8), 1)), ContractError);
}
