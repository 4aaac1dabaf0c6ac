#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "nimbus/cloud.hpp"
#include "nimbus/raster.hpp"
#include "nimbus/spectral.hpp"

namespace nimbus {

/// Declarative run configuration, loadable from a line-oriented
/// "key = value" file with [section] headers:
///
///   [gamma]
///   coefficient = -0.14
///
///   [fbm]
///   octaves = 6
///   persistence = 0.55
///   lacunarity = 2.0
///   base_frequency = 0.01
///   coverage_threshold = 0.4
///   max_radiance = 0.1
///
///   [dataset]
///   thickness_min = 0.5
///   thickness_max = 1.5
///
///   [metrics]
///   peak = 1.0
///   overlap_bins = 256
///
///   [profile my_sensor]
///   bands = blue:0.49,green:0.56,red:0.665,nir:0.842
///   reference_wavelength = 1.375
///   max_parallax_offset = 3
///
/// Profiles declared in the file shadow built-ins of the same name.
struct Config {
    GammaModel gamma;
    FbmParams fbm;
    PatchSpec patch;
    double thickness_min = 1.0;
    double thickness_max = 1.0;
    double metric_peak = 1.0;
    int overlap_bins = 256;
    std::vector<SensorProfile> profiles; // file-defined, checked valid

    static Config load(const std::filesystem::path& path);
    static Config parse(const std::string& text, const std::string& origin = "<config>");
};

} // namespace nimbus
