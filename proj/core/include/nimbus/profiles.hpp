#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nimbus/raster.hpp"

namespace nimbus {

// Built-in sensor profiles. Central wavelengths in micrometers; the cirrus
// reference channel is 1.375 um for all of them.

SensorProfile landsat89_profile();  // coastal..NIR, parallax max 2
SensorProfile sentinel2_profile();  // coastal..NIR, parallax max 5
SensorProfile gaofen2_profile();    // no coastal band, parallax max 0

std::vector<SensorProfile> builtin_profiles();

/// Case-sensitive lookup among `extra` first, then the built-ins
/// ("landsat89", "sentinel2", "gaofen2").
std::optional<SensorProfile> find_profile(const std::string& name,
                                          const std::vector<SensorProfile>& extra = {});

} // namespace nimbus
