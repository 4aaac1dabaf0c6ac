#include "nimbus/cloud.hpp"

#include <algorithm>
#include <cmath>

#include "nimbus/ras1.hpp"
#include "nimbus/rng.hpp"

namespace nimbus {

CloudField::CloudField(BandRaster raster) : raster_(std::move(raster)) {
    if (!raster_.wavelength())
        throw validation_error("cloud field needs a wavelength stamp");
    for (float v : raster_.values()) {
        if (v < 0.0f)
            throw validation_error("cloud field values must be non-negative");
    }
}

void FbmParams::validate() const {
    if (octaves < 1)
        throw parameter_error("octaves must be >= 1");
    if (!(persistence > 0.0) || persistence > 1.0)
        throw parameter_error("persistence must lie in (0, 1]");
    if (!(lacunarity > 1.0))
        throw parameter_error("lacunarity must be > 1");
    if (!(base_frequency > 0.0))
        throw parameter_error("base_frequency must be > 0");
    if (coverage_threshold < 0.0 || coverage_threshold >= 1.0)
        throw parameter_error("coverage_threshold must lie in [0, 1)");
    if (!(max_radiance > 0.0))
        throw parameter_error("max_radiance must be > 0");
}

namespace {

// Lattice corner value in [0, 1) for (octave, ix, iy).
double lattice_value(std::uint64_t seed, int octave, std::int64_t ix, std::int64_t iy) {
    std::uint64_t h = seed;
    h = mix64(h ^ static_cast<std::uint64_t>(octave));
    h = mix64(h ^ static_cast<std::uint64_t>(ix));
    h = mix64(h ^ static_cast<std::uint64_t>(iy));
    return to_unit_double(h);
}

double value_noise(std::uint64_t seed, int octave, double u, double v) {
    const double fu = std::floor(u);
    const double fv = std::floor(v);
    const auto ix = static_cast<std::int64_t>(fu);
    const auto iy = static_cast<std::int64_t>(fv);
    const double tx = u - fu;
    const double ty = v - fv;
    const double c00 = lattice_value(seed, octave, ix, iy);
    const double c10 = lattice_value(seed, octave, ix + 1, iy);
    const double c01 = lattice_value(seed, octave, ix, iy + 1);
    const double c11 = lattice_value(seed, octave, ix + 1, iy + 1);
    const double top = c00 + (c10 - c00) * tx;
    const double bot = c01 + (c11 - c01) * tx;
    return top + (bot - top) * ty;
}

} // namespace

CloudField generate_fbm_cloud(int width, int height, const FbmParams& params,
                              double reference_wavelength) {
    if (width < 1 || height < 1)
        throw parameter_error("cloud dimensions must be >= 1");
    params.validate();

    double amplitude_sum = 0.0;
    {
        double a = 1.0;
        for (int o = 0; o < params.octaves; ++o) {
            amplitude_sum += a;
            a *= params.persistence;
        }
    }
    const double t = params.coverage_threshold;
    const double gain = params.max_radiance / (1.0 - t);

    std::vector<float> data(static_cast<std::size_t>(width) * height);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            double freq = params.base_frequency;
            double amp = 1.0;
            double n = 0.0;
            for (int o = 0; o < params.octaves; ++o) {
                n += amp * value_noise(params.seed, o, x * freq, y * freq);
                freq *= params.lacunarity;
                amp *= params.persistence;
            }
            n /= amplitude_sum; // [0, 1)
            const double c = std::max(0.0, n - t) * gain;
            data[static_cast<std::size_t>(y) * width + x] = static_cast<float>(c);
        }
    }
    return CloudField(BandRaster(width, height, reference_wavelength, std::move(data)));
}

CloudField ingest_cloud(const std::filesystem::path& path, const SensorProfile& profile) {
    profile.validate();
    MultiBandImage image = read_raster(path);
    if (image.band_count() != 1)
        throw shape_error(path.string() + ": cloud field must be single-band, got " +
                          std::to_string(image.band_count()) + " bands");
    const BandRaster& band = image.band(0);
    constexpr float kSnapEps = 1e-6f;
    std::vector<float> data(band.values().begin(), band.values().end());
    for (float& v : data) {
        if (v < 0.0f) {
            if (v < -kSnapEps)
                throw validation_error(path.string() + ": negative radiance below -1e-6");
            v = 0.0f;
        }
    }
    return CloudField(BandRaster(band.width(), band.height(),
                                 profile.reference_wavelength, std::move(data)));
}

void PatchSpec::validate() const {
    if (stride < 1 || stride > patch_size)
        throw parameter_error("stride must lie in [1, patch_size]");
    if (patch_size < 1)
        throw parameter_error("patch_size must be >= 1");
}

std::vector<PatchAnchor> patch_anchors(int width, int height, const PatchSpec& spec) {
    spec.validate();
    std::vector<PatchAnchor> anchors;
    if (width < spec.patch_size || height < spec.patch_size)
        return anchors;
    const int nx = (width - spec.patch_size) / spec.stride + 1;
    const int ny = (height - spec.patch_size) / spec.stride + 1;
    anchors.reserve(static_cast<std::size_t>(nx) * ny);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            anchors.push_back({i * spec.stride, j * spec.stride});
    return anchors;
}

std::vector<BandRaster> extract_patches(const BandRaster& image, const PatchSpec& spec) {
    std::vector<BandRaster> patches;
    for (const auto& a : patch_anchors(image.width(), image.height(), spec)) {
        std::vector<float> data(static_cast<std::size_t>(spec.patch_size) * spec.patch_size);
        auto src = image.values();
        for (int y = 0; y < spec.patch_size; ++y) {
            const float* row = src.data() +
                               static_cast<std::size_t>(a.y + y) * image.width() + a.x;
            std::copy(row, row + spec.patch_size,
                      data.begin() + static_cast<std::size_t>(y) * spec.patch_size);
        }
        patches.emplace_back(spec.patch_size, spec.patch_size, image.wavelength(),
                             std::move(data));
    }
    return patches;
}

std::vector<BandRaster> clean_patches(std::vector<BandRaster> patches, const PatchSpec& spec) {
    std::erase_if(patches, [&](const BandRaster& p) {
        return p.max_value() < spec.cleaning_threshold;
    });
    return patches;
}

CloudField adjust_thickness(const CloudField& cloud, double scale,
                            std::optional<double> cap) {
    if (scale < 0.0)
        throw parameter_error("thickness scale must be >= 0");
    if (cap && !(*cap > 0.0))
        throw parameter_error("thickness cap must be > 0");
    const BandRaster& in = cloud.raster();
    std::vector<float> data(in.pixel_count());
    auto src = in.values();
    for (std::size_t i = 0; i < data.size(); ++i) {
        double v = scale * src[i];
        if (cap)
            v = std::min(v, *cap);
        data[i] = static_cast<float>(v);
    }
    return CloudField(BandRaster(in.width(), in.height(), in.wavelength(), std::move(data)));
}

} // namespace nimbus
