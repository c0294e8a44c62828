#include <doctest.h>

#include "gslr/grid.hpp"
#include "support.hpp"

using namespace gslr;

TEST_CASE("grid index ranges")
{
  const KGrid g(5, 4);
  CHECK(g.kx_min() == -2);
  CHECK(g.kx_max() == 2);
  CHECK(g.ky_min() == -2);
  CHECK(g.ky_max() == 1);
  CHECK(g.index(0, 0) == g.dc_index());
  CHECK(g.kx_at(0) == -2);
  CHECK(g.ky_at(3) == 1);
  CHECK(g.contains(2, 1));
  CHECK_FALSE(g.contains(2, 2));
  CHECK_THROWS_AS(KGrid(0, 3), ContractError);
}

TEST_CASE("valid set of a filter")
{
  const SupportSet v = valid_index_set(KGrid(10, 8), filter_support(3, 5));
  CHECK(v.fx == 8);
  CHECK(v.fy == 4);
  CHECK(v.offset_x == 2);
  CHECK(v.offset_y == 4);
  CHECK_THROWS_AS(valid_index_set(KGrid(4, 4), filter_support(5, 1)), ContractError);
}

TEST_CASE("derivative channels collapse in 1-D")
{
  CHECK(derivative_channels(KGrid(8, 8), 1) == 2);
  CHECK(derivative_channels(KGrid(8, 8), 2) == 3);
  CHECK(derivative_channels(KGrid(8), 2) == 1);
  CHECK_THROWS_AS(derivative_channels(KGrid(8), 3), ContractError);

  const KGrid g(6);
  const auto w = derivative_weights(g, 2);
  for (int ix = 0; ix < 6; ++ix)
    CHECK(w[0](ix) == doctest::Approx(g.kx_at(ix) * g.kx_at(ix)));
}

TEST_CASE("derivative weighting adjoint")
{
  for (const KGrid &g : {KGrid(7, 6), KGrid(9)})
    for (int order : {1, 2}) {
      const KArray x = testing::random_array(g, 1, 3);
      const KArray y = testing::random_array(g, derivative_channels(g, order), 4);
      const cplx lhs = (apply_derivative_weights(x, order).data.conjugate() * y.data).sum();
      const cplx rhs = (x.data.conjugate() * apply_derivative_weights(y, order, true).data).sum();
      CHECK(std::abs(lhs - rhs) < 1e-10 * std::abs(lhs));

      const Eigen::ArrayXd d = derivative_gram_diagonal(g, order);
      const KArray mm = apply_derivative_weights(apply_derivative_weights(x, order), order, true);
      CHECK(((mm.data - d * x.data).abs()).maxCoeff() < 1e-9);
    }
  CHECK_THROWS_AS(apply_derivative_weights(KArray(KGrid(4, 4), 3), 1, true), ContractError);
}
