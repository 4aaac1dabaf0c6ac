#pragma once

#include <optional>
#include <span>
#include <vector>

#include "nimbus/errors.hpp"

namespace nimbus {

/// One spectral band: a row-major grid of finite float radiance values
/// (unitless TOA quantities, typically within [0, ~1]) plus an optional
/// central wavelength in micrometers. Immutable after construction and safe
/// to share across threads.
class BandRaster {
public:
    BandRaster(int width, int height, std::optional<double> wavelength,
               std::vector<float> data);

    /// Constant-valued raster, mostly for tests and synthetic scenes.
    static BandRaster filled(int width, int height,
                             std::optional<double> wavelength, float value);

    int width() const { return width_; }
    int height() const { return height_; }
    std::optional<double> wavelength() const { return wavelength_; }
    std::span<const float> values() const { return data_; }
    std::size_t pixel_count() const { return data_.size(); }

    float at(int x, int y) const {
        return data_[static_cast<std::size_t>(y) * width_ + x];
    }

    /// Same raster with a different wavelength stamp.
    BandRaster with_wavelength(std::optional<double> wavelength) const;

    float max_value() const;
    float min_value() const;

    bool operator==(const BandRaster&) const = default;

private:
    int width_;
    int height_;
    std::optional<double> wavelength_;
    std::vector<float> data_;
};

/// Ordered, co-registered stack of bands sharing dimensions. May be empty
/// (e.g. default construction); file output rejects empty stacks.
class MultiBandImage {
public:
    MultiBandImage() = default;
    explicit MultiBandImage(std::vector<BandRaster> bands);

    std::size_t band_count() const { return bands_.size(); }
    const BandRaster& band(std::size_t i) const { return bands_[i]; }
    const std::vector<BandRaster>& bands() const { return bands_; }
    bool empty() const { return bands_.empty(); }

    int width() const { return bands_.empty() ? 0 : bands_.front().width(); }
    int height() const { return bands_.empty() ? 0 : bands_.front().height(); }

    bool operator==(const MultiBandImage&) const = default;

private:
    std::vector<BandRaster> bands_;
};

struct SensorBand {
    std::string name;
    double wavelength; // micrometers

    bool operator==(const SensorBand&) const = default;
};

/// A sensor's band list, reference channel wavelength, and the maximum
/// per-band parallax offset in pixels.
struct SensorProfile {
    std::string name;
    std::vector<SensorBand> bands;
    double reference_wavelength = 1.375; // micrometers
    int max_parallax_offset = 0;

    /// Throws validation_error when a field invariant is broken.
    void validate() const;
};

/// Affine DN-to-TOA rescaling parameters. sun_elevation is in degrees and
/// must lie in (0, 90].
struct CalibrationParams {
    double gain = 1.0;
    double offset = 0.0;
    double sun_elevation = 90.0;
};

/// TOA conversion: out = (gain * dn + offset) / sin(sun_elevation).
BandRaster calibrate_to_toa(const BandRaster& dn, const CalibrationParams& params);

/// Map cirrus radiance to the training range: out = c / 0.05 - 1, with values
/// above 0.1 clamped to +1. Rejects negative input.
BandRaster normalize_for_training(const BandRaster& c);

/// Inverse of normalize_for_training on [-1, 1]: out = 0.05 * (x + 1).
BandRaster denormalize(const BandRaster& x);

} // namespace nimbus
