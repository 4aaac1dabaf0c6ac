#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include "nimbus/raster.hpp"

namespace nimbus {

/// A single-channel cloud radiance field at the sensor reference wavelength.
/// Values are non-negative and the wavelength stamp is always present.
class CloudField {
public:
    explicit CloudField(BandRaster raster);

    const BandRaster& raster() const { return raster_; }
    int width() const { return raster_.width(); }
    int height() const { return raster_.height(); }
    double wavelength() const { return *raster_.wavelength(); }

    bool operator==(const CloudField&) const = default;

private:
    BandRaster raster_;
};

/// Parameters of the seeded fractal value-noise generator.
struct FbmParams {
    int octaves = 6;                 // >= 1
    double persistence = 0.55;       // (0, 1]
    double lacunarity = 2.0;         // > 1
    double base_frequency = 0.01;    // > 0, lattice cells per pixel
    double coverage_threshold = 0.4; // [0, 1), fraction of noise cut to zero
    double max_radiance = 0.1;       // > 0
    std::uint64_t seed = 0;

    void validate() const;
};

/// Deterministic fractal cloud field: lattice value-noise with bilinear
/// interpolation, summed over octaves and normalized to [0,1], then mapped
/// through c = max(0, n - t) * M / (1 - t). Output values lie in [0, M]
/// and repeated calls with equal arguments agree bitwise.
CloudField generate_fbm_cloud(int width, int height, const FbmParams& params,
                              double reference_wavelength = 1.375);

/// Load an externally produced single-band RAS1 field and stamp the profile's
/// reference wavelength. Values in [-1e-6, 0) snap to 0; anything lower is a
/// validation error. Multi-band files are a shape error.
CloudField ingest_cloud(const std::filesystem::path& path, const SensorProfile& profile);

/// Patch extraction and cleaning controls.
struct PatchSpec {
    int patch_size = 512;
    int stride = 128;
    float cleaning_threshold = 0.015f;

    void validate() const;
};

/// All patch_size x patch_size crops anchored at (i*stride, j*stride) that fit
/// inside the image, in row-major anchor order. An image smaller than the
/// patch yields an empty list.
std::vector<BandRaster> extract_patches(const BandRaster& image, const PatchSpec& spec);

/// Anchor coordinates matching extract_patches order.
struct PatchAnchor {
    int x = 0;
    int y = 0;
};
std::vector<PatchAnchor> patch_anchors(int width, int height, const PatchSpec& spec);

/// Keep patches whose maximum value reaches the cleaning threshold
/// (max == threshold is retained); order preserved.
std::vector<BandRaster> clean_patches(std::vector<BandRaster> patches, const PatchSpec& spec);

/// Linear thickness stretch with an optional upper cap:
/// out = min(scale * v, cap). scale must be >= 0, cap (if given) > 0.
CloudField adjust_thickness(const CloudField& cloud, double scale,
                            std::optional<double> cap = std::nullopt);

} // namespace nimbus
