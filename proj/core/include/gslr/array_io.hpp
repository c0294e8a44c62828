#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "gslr/grid.hpp"
#include "gslr/sampling.hpp"

namespace gslr {

enum class DType
{
  c64,
  c128,
  f64,
  u8
};

std::string to_string(DType d);
std::size_t dtype_size(DType d);

class ArrayFormatError : public std::runtime_error
{
public:
  enum class Kind
  {
    not_found,
    malformed_header,
    truncated_payload,
    unsupported_dtype,
    inconsistent_header
  };

  ArrayFormatError(Kind kind, const std::string &what)
    : std::runtime_error(what)
    , kind_(kind)
  {
  }

  Kind kind() const { return kind_; }

private:
  Kind kind_;
};

///
/// On-disk array: one UTF-8 header line holding a JSON record
///   {"count":N,"dtype":"c128","format":"gslr-array/1","layout":"row-major",
///    "provenance":{...},"shape":[channels,ny,nx]}
/// followed by the little-endian payload (complex values interleaved re, im).
///
struct ArrayFile
{
  DType dtype = DType::c128;
  std::array<std::size_t, 3> shape{1, 1, 1}; // channels, ny, nx
  Provenance provenance;
  std::vector<std::uint8_t> payload;

  std::size_t count() const { return shape[0] * shape[1] * shape[2]; }
};

ArrayFile read_array(const std::filesystem::path &path);
void write_array(const std::filesystem::path &path, const ArrayFile &file);

ArrayFile to_array_file(const KArray &x, DType dtype = DType::c128, Provenance provenance = {});
/// Any dtype widens to complex double.
KArray to_karray(const ArrayFile &file);

ArrayFile to_array_file(const Mask &mask);
Mask to_mask(const ArrayFile &file);

/// Real single-channel image (e.g. a sum-of-squares combine) as f64.
ArrayFile to_array_file(const Eigen::ArrayXd &image, const KGrid &grid, Provenance provenance = {});

} // namespace gslr
