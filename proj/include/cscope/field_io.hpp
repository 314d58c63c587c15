#pragma once

#include <filesystem>
#include <string>

#include "cscope/field.hpp"

namespace cscope {

/// Binary field files: "CSCOPE1\n", a little-endian uint64 header length, a
/// JSON header (dim, resolution, origin, extent, periodic, components, time,
/// encoding = "f64le"), then the payload as little-endian doubles in the
/// in-memory order of Field::values().
///
/// Reading validates everything before building the field; any mismatch
/// throws IoError and nothing partial is returned.
void write_field(const Field& field, const std::filesystem::path& path);
Field read_field(const std::filesystem::path& path);

/// Header JSON text for a field (also used in reports).
std::string field_header_json(const Field& field);

}  // namespace cscope
