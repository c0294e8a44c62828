#include "gslr/array_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include <json.hpp>

namespace gslr {

namespace {

using Json = nlohmann::json;
using Kind = ArrayFormatError::Kind;

constexpr const char *format_tag = "gslr-array/1";
constexpr std::size_t max_header_bytes = 1 << 20;

DType dtype_from_string(const std::string &s)
{
  if (s == "c64")
    return DType::c64;
  if (s == "c128")
    return DType::c128;
  if (s == "f64")
    return DType::f64;
  if (s == "u8")
    return DType::u8;
  throw ArrayFormatError(Kind::unsupported_dtype, "unsupported dtype '" + s + "'");
}

std::size_t scalar_size(DType d)
{
  switch (d) {
  case DType::c64: return 4;
  case DType::c128: return 8;
  case DType::f64: return 8;
  case DType::u8: return 1;
  }
  return 1;
}

// Payload is little-endian; swap in place on big-endian hosts.
void to_little_endian(std::uint8_t *bytes, std::size_t n, std::size_t width)
{
  if constexpr (std::endian::native == std::endian::big) {
    for (std::size_t i = 0; i + width <= n; i += width)
      std::reverse(bytes + i, bytes + i + width);
  } else {
    (void)bytes;
    (void)n;
    (void)width;
  }
}

template <typename T>
void append_scalar(std::vector<std::uint8_t> &out, T v)
{
  std::uint8_t buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  to_little_endian(buf, sizeof(T), sizeof(T));
  out.insert(out.end(), buf, buf + sizeof(T));
}

template <typename T>
T read_scalar(const std::uint8_t *p)
{
  std::uint8_t buf[sizeof(T)];
  std::memcpy(buf, p, sizeof(T));
  to_little_endian(buf, sizeof(T), sizeof(T));
  T v;
  std::memcpy(&v, buf, sizeof(T));
  return v;
}

std::size_t as_size(const Json &j, const char *what)
{
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0))
    throw ArrayFormatError(Kind::malformed_header, std::string("header field '") + what + "' must be a non-negative integer");
  return j.get<std::size_t>();
}

} // namespace

std::string to_string(DType d)
{
  switch (d) {
  case DType::c64: return "c64";
  case DType::c128: return "c128";
  case DType::f64: return "f64";
  case DType::u8: return "u8";
  }
  return "c128";
}

std::size_t dtype_size(DType d)
{
  switch (d) {
  case DType::c64: return 8;
  case DType::c128: return 16;
  case DType::f64: return 8;
  case DType::u8: return 1;
  }
  return 1;
}

ArrayFile read_array(const std::filesystem::path &path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ArrayFormatError(Kind::not_found, "input not found: " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  const auto nl = std::find(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(std::min(bytes.size(), max_header_bytes)),
                            std::uint8_t{'\n'});
  if (nl == bytes.end() || static_cast<std::size_t>(nl - bytes.begin()) >= max_header_bytes)
    throw ArrayFormatError(Kind::malformed_header, "malformed header: no header line in " + path.string());

  Json h;
  try {
    h = Json::parse(std::string(bytes.begin(), nl));
  } catch (const Json::exception &e) {
    throw ArrayFormatError(Kind::malformed_header, std::string("malformed header: ") + e.what());
  }
  if (!h.is_object() || h.value("format", "") != format_tag)
    throw ArrayFormatError(Kind::malformed_header, "malformed header: missing format tag " + std::string(format_tag));
  for (const char *key : {"dtype", "shape", "count"})
    if (!h.contains(key))
      throw ArrayFormatError(Kind::malformed_header, std::string("malformed header: missing '") + key + "'");
  if (!h["dtype"].is_string())
    throw ArrayFormatError(Kind::malformed_header, "malformed header: dtype must be a string");
  if (h.contains("layout") && h["layout"] != "row-major")
    throw ArrayFormatError(Kind::unsupported_dtype, "unsupported layout " + h["layout"].dump());

  ArrayFile f;
  f.dtype = dtype_from_string(h["dtype"].get<std::string>());
  if (!h["shape"].is_array() || h["shape"].size() != 3)
    throw ArrayFormatError(Kind::malformed_header, "malformed header: shape must be [channels, ny, nx]");
  for (std::size_t i = 0; i < 3; ++i)
    f.shape[i] = as_size(h["shape"][i], "shape");
  const std::size_t count = as_size(h["count"], "count");
  if (count != f.count() || f.count() == 0)
    throw ArrayFormatError(Kind::inconsistent_header, "inconsistent header: count " + std::to_string(count) +
                                                        " does not match shape product " + std::to_string(f.count()));
  if (h.contains("provenance")) {
    if (!h["provenance"].is_object())
      throw ArrayFormatError(Kind::malformed_header, "malformed header: provenance must be an object");
    for (const auto &[k, v] : h["provenance"].items())
      f.provenance[k] = v.is_string() ? v.get<std::string>() : v.dump();
  }

  const std::size_t need = f.count() * dtype_size(f.dtype);
  const std::size_t have = static_cast<std::size_t>(bytes.end() - nl) - 1;
  if (have < need)
    throw ArrayFormatError(Kind::truncated_payload, "truncated payload: expected " + std::to_string(need) +
                                                      " bytes, found " + std::to_string(have));
  if (have > need)
    throw ArrayFormatError(Kind::inconsistent_header, "inconsistent header: " + std::to_string(have - need) +
                                                        " bytes beyond the declared payload");
  f.payload.assign(nl + 1, bytes.end());
  return f;
}

void write_array(const std::filesystem::path &path, const ArrayFile &file)
{
  detail::require(file.payload.size() == file.count() * dtype_size(file.dtype),
                  "write_array: payload size does not match shape and dtype");
  Json h;
  h["format"] = format_tag;
  h["dtype"] = to_string(file.dtype);
  h["shape"] = {file.shape[0], file.shape[1], file.shape[2]};
  h["count"] = file.count();
  h["layout"] = "row-major";
  h["provenance"] = Json::object();
  for (const auto &[k, v] : file.provenance)
    h["provenance"][k] = v;

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  const std::string header = h.dump() + "\n";
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(reinterpret_cast<const char *>(file.payload.data()), static_cast<std::streamsize>(file.payload.size()));
  if (!out)
    throw std::runtime_error("write failed: " + path.string());
}

ArrayFile to_array_file(const KArray &x, DType dtype, Provenance provenance)
{
  ArrayFile f;
  f.dtype = dtype;
  f.shape = {static_cast<std::size_t>(x.channels), static_cast<std::size_t>(x.grid.ny), static_cast<std::size_t>(x.grid.nx)};
  f.provenance = std::move(provenance);
  f.payload.reserve(f.count() * dtype_size(dtype));
  for (Eigen::Index i = 0; i < x.data.size(); ++i) {
    const cplx v = x.data(i);
    switch (dtype) {
    case DType::c64:
      append_scalar(f.payload, static_cast<float>(v.real()));
      append_scalar(f.payload, static_cast<float>(v.imag()));
      break;
    case DType::c128:
      append_scalar(f.payload, v.real());
      append_scalar(f.payload, v.imag());
      break;
    case DType::f64:
      append_scalar(f.payload, v.real());
      break;
    case DType::u8:
      f.payload.push_back(static_cast<std::uint8_t>(std::clamp(std::lround(v.real()), 0L, 255L)));
      break;
    }
  }
  return f;
}

KArray to_karray(const ArrayFile &f)
{
  detail::require(f.count() > 0 && f.payload.size() == f.count() * dtype_size(f.dtype), "to_karray: inconsistent array file");
  const KGrid g(static_cast<int>(f.shape[2]), static_cast<int>(f.shape[1]));
  KArray x(g, static_cast<int>(f.shape[0]));
  const std::uint8_t *p = f.payload.data();
  const std::size_t w = scalar_size(f.dtype);
  for (Eigen::Index i = 0; i < x.data.size(); ++i) {
    switch (f.dtype) {
    case DType::c64:
      x.data(i) = cplx(read_scalar<float>(p), read_scalar<float>(p + w));
      p += 2 * w;
      break;
    case DType::c128:
      x.data(i) = cplx(read_scalar<double>(p), read_scalar<double>(p + w));
      p += 2 * w;
      break;
    case DType::f64:
      x.data(i) = read_scalar<double>(p);
      p += w;
      break;
    case DType::u8:
      x.data(i) = static_cast<double>(*p);
      p += 1;
      break;
    }
  }
  return x;
}

ArrayFile to_array_file(const Mask &mask)
{
  ArrayFile f;
  f.dtype = DType::u8;
  f.shape = {1, static_cast<std::size_t>(mask.grid.ny), static_cast<std::size_t>(mask.grid.nx)};
  f.provenance = mask.provenance;
  f.payload = mask.sampled;
  return f;
}

Mask to_mask(const ArrayFile &f)
{
  detail::require(f.dtype == DType::u8 && f.shape[0] == 1, "to_mask: masks are single-channel u8 arrays");
  Mask m(KGrid(static_cast<int>(f.shape[2]), static_cast<int>(f.shape[1])));
  for (std::size_t i = 0; i < f.payload.size(); ++i)
    m.sampled[i] = f.payload[i] ? 1 : 0;
  m.provenance = f.provenance;
  return m;
}

ArrayFile to_array_file(const Eigen::ArrayXd &image, const KGrid &grid, Provenance provenance)
{
  detail::require(static_cast<std::size_t>(image.size()) == grid.size(), "to_array_file: image size does not match grid");
  ArrayFile f;
  f.dtype = DType::f64;
  f.shape = {1, static_cast<std::size_t>(grid.ny), static_cast<std::size_t>(grid.nx)};
  f.provenance = std::move(provenance);
  for (double v : image)
    append_scalar(f.payload, v);
  return f;
}

} // namespace gslr
