#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nimbus/cloud.hpp"
#include "nimbus/raster.hpp"
#include "nimbus/spectral.hpp"

namespace nimbus {

struct BandOffset {
    int dx = 0;
    int dy = 0;

    bool operator==(const BandOffset&) const = default;
};

/// Per-band integer pixel shifts bounded by the profile's maximum.
struct ParallaxOffsets {
    std::vector<BandOffset> per_band;

    bool operator==(const ParallaxOffsets&) const = default;
    bool all_zero() const;
};

/// Draw each band's (dx, dy) uniformly from [-max, +max]; deterministic per
/// seed.
ParallaxOffsets sample_offsets(const SensorProfile& profile, std::uint64_t seed);

/// Translate band k by (dx_k, dy_k) with edge replication on vacated borders;
/// dimensions unchanged. Offsets beyond the profile bound are a parameter
/// error.
MultiBandImage apply_parallax(const MultiBandImage& cloud_bands,
                              const ParallaxOffsets& offsets,
                              const SensorProfile& profile);

/// The 8 dihedral transforms of a raster. Composites like hflip_rot90 apply
/// the rotation first.
enum class AugmentOp {
    identity,
    rot90,
    rot180,
    rot270,
    hflip,
    vflip,
    hflip_rot90,
    vflip_rot90,
};
inline constexpr int kAugmentOpCount = 8;

const char* augment_name(AugmentOp op);
AugmentOp augment_from_name(const std::string& name);

BandRaster augment(const BandRaster& band, AugmentOp op);
MultiBandImage augment(const MultiBandImage& image, AugmentOp op);

/// Pixel-wise per-band sum (rho = G + C); no clipping.
MultiBandImage composite(const MultiBandImage& ground, const MultiBandImage& cloud);

/// One synthesized pair as recorded in the manifest.
struct ManifestEntry {
    std::string ground_path;
    std::string cloud_path;
    std::string cloudy_path;
    std::uint64_t seed = 0;
    double thickness = 1.0;
    std::optional<double> cap;
    ParallaxOffsets offsets;
    AugmentOp augment_op = AugmentOp::identity;
};

/// Reproducibility record of a synthesized dataset.
struct DatasetManifest {
    std::string profile_name;
    double coefficient = -0.14;
    std::vector<ManifestEntry> entries;
};

void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);
DatasetManifest read_manifest(const std::filesystem::path& path);

/// Supplies the single-channel cloud for item `seed` at the required size.
using CloudProvider =
    std::function<CloudField(std::uint64_t seed, int width, int height)>;

struct DatasetParams {
    int n_pairs = 1;
    std::uint64_t base_seed = 0;
    double thickness_min = 1.0;
    double thickness_max = 1.0;
    std::optional<double> cap;
    std::filesystem::path output_dir;
    /// 0 = use NIMBUS_THREADS or hardware concurrency. Never affects bytes.
    unsigned threads = 0;
};

/// Synthesize n_pairs (ground, cloud, cloudy) triples. Item i uses
/// derive_seed(base_seed, i); grounds rotate round-robin; thickness is
/// uniform in [thickness_min, thickness_max]; the cloud file holds the
/// parallax-shifted multi-band cloud actually added to the augmented ground.
/// Re-running with identical arguments reproduces every file bit-exactly,
/// for any thread count.
DatasetManifest build_dataset(const std::vector<MultiBandImage>& grounds,
                              const SensorProfile& profile,
                              const GammaModel& model,
                              const DatasetParams& params,
                              const CloudProvider& provider);

/// Thread cap honoring the NIMBUS_THREADS environment variable.
unsigned effective_thread_count(unsigned requested);

} // namespace nimbus
