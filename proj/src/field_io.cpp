#include "cscope/field_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

#include <json.hpp>

#include "cscope/error.hpp"

namespace cscope {
namespace {

constexpr char kMagic[] = "CSCOPE1\n";
constexpr std::size_t kMagicLen = 8;
constexpr std::uint64_t kMaxHeader = 1u << 20;

using nlohmann::json;

template <class U>
U to_little(U v) {
  if constexpr (std::endian::native == std::endian::little) return v;
  U out = 0;
  for (std::size_t b = 0; b < sizeof(U); ++b) out |= ((v >> (8 * b)) & 0xFF) << (8 * (sizeof(U) - 1 - b));
  return out;
}

json header_of(const Field& f) {
  const Grid& g = f.grid();
  json h;
  h["dim"] = g.dim;
  h["resolution"] = json::array();
  h["origin"] = json::array();
  h["extent"] = json::array();
  h["periodic"] = json::array();
  for (int a = 0; a < g.dim; ++a) {
    h["resolution"].push_back(g.resolution[a]);
    h["origin"].push_back(g.origin[a]);
    h["extent"].push_back(g.extent[a]);
    h["periodic"].push_back(g.periodic[a]);
  }
  h["components"] = f.components();
  h["time"] = f.time();
  h["encoding"] = "f64le";
  return h;
}

}  // namespace

std::string field_header_json(const Field& field) { return header_of(field).dump(); }

void write_field(const Field& field, const std::filesystem::path& path) {
  const std::string header = header_of(field).dump();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(kMagic, kMagicLen);
  const std::uint64_t len = to_little<std::uint64_t>(header.size());
  out.write(reinterpret_cast<const char*>(&len), sizeof len);
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  const auto values = field.values();
  std::vector<std::uint64_t> raw(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) raw[i] = to_little(std::bit_cast<std::uint64_t>(values[i]));
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size() * 8));
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

Field read_field(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const std::string where = " in '" + path.string() + "'";
  if (bytes.size() < kMagicLen + 8 || std::memcmp(bytes.data(), kMagic, kMagicLen) != 0)
    throw IoError("bad magic" + where);
  std::uint64_t len = 0;
  std::memcpy(&len, bytes.data() + kMagicLen, 8);
  len = to_little(len);
  const std::size_t body = kMagicLen + 8;
  if (len > kMaxHeader || len > bytes.size() - body) throw IoError("truncated header" + where);

  Grid grid;
  int components = 0;
  double time = 0.0;
  try {
    const json h = json::parse(bytes.begin() + body, bytes.begin() + body + static_cast<std::ptrdiff_t>(len));
    if (h.at("encoding").get<std::string>() != "f64le") throw IoError("unsupported encoding" + where);
    const int dim = h.at("dim").get<int>();
    if (dim < 1 || dim > 3) throw IoError("bad dim" + where);
    const auto res = h.at("resolution").get<std::vector<int>>();
    const auto origin = h.at("origin").get<std::vector<double>>();
    const auto extent = h.at("extent").get<std::vector<double>>();
    const auto periodic = h.at("periodic").get<std::vector<bool>>();
    if (res.size() != std::size_t(dim) || origin.size() != std::size_t(dim) || extent.size() != std::size_t(dim) ||
        periodic.size() != std::size_t(dim))
      throw IoError("header arrays do not match dim" + where);
    const bool p[3] = {periodic[0], dim > 1 && periodic[1], dim > 2 && periodic[2]};
    grid = make_grid(origin, extent, res, std::span<const bool>(p, dim));
    components = h.at("components").get<int>();
    time = h.at("time").get<double>();
    if (components < 1) throw IoError("bad component count" + where);
  } catch (const json::exception& e) {
    throw IoError("malformed header" + where + ": " + e.what());
  } catch (const ValidationError& e) {
    throw IoError("invalid grid in header" + where + ": " + e.what());
  }

  const std::size_t count = grid.cell_count() * static_cast<std::size_t>(components);
  const std::size_t payload = bytes.size() - body - len;
  if (payload != count * 8)
    throw IoError("payload size mismatch" + where + ": expected " + std::to_string(count * 8) + " bytes, found " +
                  std::to_string(payload));
  std::vector<double> values(count);
  const char* src = bytes.data() + body + len;
  for (std::size_t i = 0; i < count; ++i) {
    std::uint64_t raw = 0;
    std::memcpy(&raw, src + 8 * i, 8);
    values[i] = std::bit_cast<double>(to_little(raw));
  }
  return Field(grid, components, time, std::move(values));
}

}  // namespace cscope
