#pragma once

#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "gslr/grid.hpp"
#include "gslr/sampling.hpp"

namespace testing {

inline Eigen::ArrayXcd random_complex(std::size_t n, std::uint64_t seed)
{
  const gslr::CounterRng rng(seed);
  Eigen::ArrayXcd x(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto [re, im] = rng.normal_pair(2 * i);
    x(static_cast<Eigen::Index>(i)) = gslr::cplx(re, im);
  }
  return x;
}

inline gslr::KArray random_array(const gslr::KGrid &g, int ch, std::uint64_t seed)
{
  gslr::KArray x(g, ch);
  x.data = random_complex(x.data.size(), seed);
  return x;
}

inline std::vector<char> slurp(const std::filesystem::path &p)
{
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

// Fresh directory under the system temp dir, removed on scope exit.
struct TempDir
{
  std::filesystem::path path;
  explicit TempDir(const std::string &tag)
    : path(std::filesystem::temp_directory_path() / ("gslr_test_" + tag))
  {
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

} // namespace testing
