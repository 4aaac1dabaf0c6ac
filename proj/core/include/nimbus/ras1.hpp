#pragma once

#include <filesystem>
#include <iosfwd>

#include "nimbus/raster.hpp"

namespace nimbus {

// RAS1 container (bit-exact):
//   line 1 (ASCII, LF): "RAS1 <width> <height> <bands>", decimal integers >= 1
//   line 2 (ASCII, LF): <bands> space-separated central wavelengths in
//                       micrometers, decimal literal or "-" for unknown
//   payload: bands x height x width IEEE-754 binary32, little-endian,
//            band-sequential, row-major within band.

/// Parse a RAS1 file. Throws format_error on a malformed header,
/// truncation_error on a short payload, validation_error on NaN/Inf values,
/// io_error when the file cannot be opened.
MultiBandImage read_raster(const std::filesystem::path& path);

/// Write a RAS1 file; read_raster(write_raster(x)) is bit-identical to x.
/// Throws validation_error on an empty band list, io_error on I/O failure.
void write_raster(const MultiBandImage& image, const std::filesystem::path& path);

/// Stream variants used by the file functions (and handy in tests).
MultiBandImage read_raster(std::istream& in, const std::string& origin = "<stream>");
void write_raster(const MultiBandImage& image, std::ostream& out);

} // namespace nimbus
