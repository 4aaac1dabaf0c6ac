#include "nimbus/raster.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace nimbus {

BandRaster::BandRaster(int width, int height, std::optional<double> wavelength,
                       std::vector<float> data)
    : width_(width), height_(height), wavelength_(wavelength), data_(std::move(data)) {
    if (width_ < 1 || height_ < 1)
        throw validation_error("raster dimensions must be >= 1");
    if (data_.size() != static_cast<std::size_t>(width_) * height_)
        throw validation_error("raster data length does not match width * height");
    if (wavelength_ && !(*wavelength_ > 0.0))
        throw validation_error("wavelength must be positive");
    for (float v : data_) {
        if (!std::isfinite(v))
            throw validation_error("raster contains NaN or Inf");
    }
}

BandRaster BandRaster::filled(int width, int height, std::optional<double> wavelength,
                              float value) {
    return BandRaster(width, height, wavelength,
                      std::vector<float>(static_cast<std::size_t>(width) * height, value));
}

BandRaster BandRaster::with_wavelength(std::optional<double> wavelength) const {
    return BandRaster(width_, height_, wavelength, data_);
}

float BandRaster::max_value() const {
    return *std::max_element(data_.begin(), data_.end());
}

float BandRaster::min_value() const {
    return *std::min_element(data_.begin(), data_.end());
}

MultiBandImage::MultiBandImage(std::vector<BandRaster> bands) : bands_(std::move(bands)) {
    for (const auto& b : bands_) {
        if (b.width() != bands_.front().width() || b.height() != bands_.front().height())
            throw shape_error("bands differ in dimensions");
    }
}

void SensorProfile::validate() const {
    if (bands.empty())
        throw validation_error("sensor profile has no bands");
    std::set<std::string> names;
    for (const auto& b : bands) {
        if (!(b.wavelength > 0.0))
            throw validation_error("band wavelength must be positive: " + b.name);
        if (!names.insert(b.name).second)
            throw validation_error("duplicate band name: " + b.name);
    }
    if (!(reference_wavelength > 0.0))
        throw validation_error("reference wavelength must be positive");
    if (max_parallax_offset < 0)
        throw validation_error("max parallax offset must be non-negative");
}

BandRaster calibrate_to_toa(const BandRaster& dn, const CalibrationParams& params) {
    if (!(params.sun_elevation > 0.0) || params.sun_elevation > 90.0)
        throw parameter_error("sun elevation must lie in (0, 90] degrees");
    const double s = std::sin(params.sun_elevation * std::numbers::pi / 180.0);
    std::vector<float> out(dn.pixel_count());
    auto in = dn.values();
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = static_cast<float>((params.gain * in[i] + params.offset) / s);
    return BandRaster(dn.width(), dn.height(), dn.wavelength(), std::move(out));
}

BandRaster normalize_for_training(const BandRaster& c) {
    std::vector<float> out(c.pixel_count());
    auto in = c.values();
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (in[i] < 0.0f)
            throw validation_error("negative radiance cannot be normalized");
        out[i] = static_cast<float>(std::min(in[i] / 0.05 - 1.0, 1.0));
    }
    return BandRaster(c.width(), c.height(), c.wavelength(), std::move(out));
}

BandRaster denormalize(const BandRaster& x) {
    std::vector<float> out(x.pixel_count());
    auto in = x.values();
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (in[i] < -1.0f || in[i] > 1.0f)
            throw validation_error("normalized values must lie in [-1, 1]");
        out[i] = static_cast<float>(0.05 * (in[i] + 1.0));
    }
    return BandRaster(x.width(), x.height(), x.wavelength(), std::move(out));
}

} // namespace nimbus
