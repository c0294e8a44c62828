#include <doctest.h>

#include <fstream>
#include <limits>

#include "gslr/array_io.hpp"
#include "support.hpp"

using namespace gslr;
namespace fs = std::filesystem;

namespace {

void write_raw(const fs::path &p, const std::string &bytes)
{
  std::ofstream f(p, std::ios::binary);
  f << bytes;
}

ArrayFormatError::Kind kind_of(const fs::path &p)
{
  try {
    (void)read_array(p);
  } catch (const ArrayFormatError &e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ArrayFormatError::Kind::not_found;
}

} // namespace

TEST_CASE("round trips are bit-exact for every dtype")
{
  const testing::TempDir dir("array_io_rt");
  KArray x = testing::random_array(KGrid(7, 3), 2, 1);
  x.data(0) = cplx(-0.0, std::numeric_limits<double>::denorm_min());
  x.data(1) = cplx(std::numeric_limits<double>::max(), -1e-300);

  for (DType d : {DType::c128, DType::c64, DType::f64, DType::u8}) {
    KArray in = x;
    if (d == DType::u8)
      for (Eigen::Index i = 0; i < in.data.size(); ++i)
        in.data(i) = static_cast<double>(i % 256);
    const ArrayFile f = to_array_file(in, d, {{"source", "unit"}, {"dtype", to_string(d)}});
    const fs::path p = dir.path / (to_string(d) + ".arr");
    write_array(p, f);
    const ArrayFile back = read_array(p);
    CHECK(back.dtype == d);
    CHECK(back.shape == f.shape);
    CHECK(back.payload == f.payload);
    CHECK(back.provenance == f.provenance);
    write_array(dir.path / "again.arr", back);
    CHECK(testing::slurp(p) == testing::slurp(dir.path / "again.arr"));
    CHECK(back.payload.size() == in.data.size() * dtype_size(d));

    const KArray y = to_karray(back);
    CHECK(y.same_shape(in));
    if (d == DType::c128)
      CHECK((y.data == in.data).all());
    if (d == DType::f64)
      CHECK((y.data.real() == in.data.real()).all());
    if (d == DType::u8)
      CHECK((y.data == in.data).all());
    if (d == DType::c64)
      CHECK((y.data - in.data.cast<std::complex<float>>().cast<cplx>()).abs().maxCoeff() == 0.0);
  }
}

TEST_CASE("masks and real images")
{
  const testing::TempDir dir("array_io_mask");
  const Mask m = variable_density_mask(KGrid(12, 10), {3.0, 3.0, 0.02, 4});
  write_array(dir.path / "m.arr", to_array_file(m));
  const Mask back = to_mask(read_array(dir.path / "m.arr"));
  CHECK(back.sampled == m.sampled);
  CHECK(back.grid == m.grid);
  CHECK(back.provenance == m.provenance);
  CHECK_THROWS_AS(to_mask(to_array_file(KArray(KGrid(4, 4), 1))), ContractError);

  const Eigen::ArrayXd img = Eigen::ArrayXd::LinSpaced(20, -1.0, 1.0);
  const ArrayFile f = to_array_file(img, KGrid(5, 4));
  CHECK(f.dtype == DType::f64);
  CHECK((to_karray(f).data.real() == img).all());
}

TEST_CASE("header is a single JSON line")
{
  const testing::TempDir dir("array_io_header");
  write_array(dir.path / "a.arr", to_array_file(KArray(KGrid(3, 2), 1), DType::f64));
  const auto bytes = testing::slurp(dir.path / "a.arr");
  const std::string text(bytes.begin(), bytes.end());
  const auto nl = text.find('\n');
  CHECK(text.substr(0, nl) ==
        R"({"count":6,"dtype":"f64","format":"gslr-array/1","layout":"row-major","provenance":{},"shape":[1,2,3]})");
  CHECK(bytes.size() == nl + 1 + 6 * 8);
}

TEST_CASE("malformed files raise typed errors")
{
  const testing::TempDir dir("array_io_bad");
  using K = ArrayFormatError::Kind;
  CHECK(kind_of(dir.path / "missing.arr") == K::not_found);
  try {
    (void)read_array(dir.path / "missing.arr");
  } catch (const ArrayFormatError &e) {
    CHECK(std::string(e.what()).find("input not found") != std::string::npos);
  }

  const std::string ok =
    R"({"count":2,"dtype":"f64","format":"gslr-array/1","layout":"row-major","provenance":{},"shape":[1,1,2]})";
  write_raw(dir.path / "noline.arr", ok);
  CHECK(kind_of(dir.path / "noline.arr") == K::malformed_header);
  write_raw(dir.path / "json.arr", "{not json\n");
  CHECK(kind_of(dir.path / "json.arr") == K::malformed_header);
  write_raw(dir.path / "short.arr", ok + "\n" + std::string(15, '\0'));
  CHECK(kind_of(dir.path / "short.arr") == K::truncated_payload);
  write_raw(dir.path / "long.arr", ok + "\n" + std::string(17, '\0'));
  CHECK(kind_of(dir.path / "long.arr") == K::inconsistent_header);

  std::string dt = ok;
  dt.replace(dt.find("f64"), 3, "f16");
  write_raw(dir.path / "dtype.arr", dt + "\n" + std::string(16, '\0'));
  CHECK(kind_of(dir.path / "dtype.arr") == K::unsupported_dtype);

  std::string cnt = ok;
  cnt.replace(cnt.find("\"count\":2"), 9, "\"count\":3");
  write_raw(dir.path / "count.arr", cnt + "\n" + std::string(16, '\0'));
  CHECK(kind_of(dir.path / "count.arr") == K::inconsistent_header);

  std::string fmt = ok;
  fmt.replace(fmt.find("gslr-array/1"), 12, "other/1");
  write_raw(dir.path / "fmt.arr", fmt + "\n" + std::string(16, '\0'));
  CHECK(kind_of(dir.path / "fmt.arr") == K::malformed_header);

  ArrayFile f;
  f.dtype = DType::c128;
  f.shape = {1, 2, 2};
  f.payload.resize(10);
  CHECK_THROWS_AS(write_array(dir.path / "x.arr", f), ContractError);
}
