#include "nimbus/pair_synth.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "nimbus/ras1.hpp"
#include "nimbus/rng.hpp"

namespace nimbus {

namespace {

// Sub-stream tags of an item seed (documented in the README).
constexpr std::uint64_t kTagThickness = 1;
constexpr std::uint64_t kTagOffsets = 2;
constexpr std::uint64_t kTagAugment = 3;

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

} // namespace

bool ParallaxOffsets::all_zero() const {
    for (const auto& o : per_band)
        if (o.dx != 0 || o.dy != 0)
            return false;
    return true;
}

ParallaxOffsets sample_offsets(const SensorProfile& profile, std::uint64_t seed) {
    profile.validate();
    const int m = profile.max_parallax_offset;
    ParallaxOffsets offsets;
    offsets.per_band.reserve(profile.bands.size());
    std::uint64_t state = seed;
    for (std::size_t b = 0; b < profile.bands.size(); ++b) {
        BandOffset o;
        state = mix64(state);
        o.dx = to_uniform_int(state, -m, m);
        state = mix64(state);
        o.dy = to_uniform_int(state, -m, m);
        offsets.per_band.push_back(o);
    }
    return offsets;
}

namespace {

BandRaster translate_band(const BandRaster& in, int dx, int dy) {
    const int w = in.width();
    const int h = in.height();
    std::vector<float> data(in.pixel_count());
    for (int y = 0; y < h; ++y) {
        const int sy = std::clamp(y - dy, 0, h - 1);
        for (int x = 0; x < w; ++x) {
            const int sx = std::clamp(x - dx, 0, w - 1);
            data[static_cast<std::size_t>(y) * w + x] = in.at(sx, sy);
        }
    }
    return BandRaster(w, h, in.wavelength(), std::move(data));
}

} // namespace

MultiBandImage apply_parallax(const MultiBandImage& cloud_bands,
                              const ParallaxOffsets& offsets,
                              const SensorProfile& profile) {
    if (offsets.per_band.size() != cloud_bands.band_count())
        throw shape_error("offset count does not match band count");
    const int m = profile.max_parallax_offset;
    for (const auto& o : offsets.per_band) {
        if (std::abs(o.dx) > m || std::abs(o.dy) > m)
            throw parameter_error("parallax offset exceeds the profile bound");
    }
    std::vector<BandRaster> bands;
    bands.reserve(cloud_bands.band_count());
    for (std::size_t b = 0; b < cloud_bands.band_count(); ++b)
        bands.push_back(translate_band(cloud_bands.band(b), offsets.per_band[b].dx,
                                       offsets.per_band[b].dy));
    return MultiBandImage(std::move(bands));
}

const char* augment_name(AugmentOp op) {
    switch (op) {
    case AugmentOp::identity: return "identity";
    case AugmentOp::rot90: return "rot90";
    case AugmentOp::rot180: return "rot180";
    case AugmentOp::rot270: return "rot270";
    case AugmentOp::hflip: return "hflip";
    case AugmentOp::vflip: return "vflip";
    case AugmentOp::hflip_rot90: return "hflip_rot90";
    case AugmentOp::vflip_rot90: return "vflip_rot90";
    }
    return "?";
}

AugmentOp augment_from_name(const std::string& name) {
    for (int i = 0; i < kAugmentOpCount; ++i) {
        const auto op = static_cast<AugmentOp>(i);
        if (name == augment_name(op))
            return op;
    }
    throw parameter_error("unknown augment op '" + name + "'");
}

BandRaster augment(const BandRaster& band, AugmentOp op) {
    const int w = band.width();
    const int h = band.height();
    // Source pixel for output (x, y); rotations are clockwise.
    int ow = w, oh = h;
    switch (op) {
    case AugmentOp::rot90:
    case AugmentOp::rot270:
    case AugmentOp::hflip_rot90:
    case AugmentOp::vflip_rot90:
        ow = h;
        oh = w;
        break;
    default:
        break;
    }
    auto source = [&](int x, int y) -> float {
        switch (op) {
        case AugmentOp::identity: return band.at(x, y);
        case AugmentOp::rot90: return band.at(y, h - 1 - x);
        case AugmentOp::rot180: return band.at(w - 1 - x, h - 1 - y);
        case AugmentOp::rot270: return band.at(w - 1 - y, x);
        case AugmentOp::hflip: return band.at(w - 1 - x, y);
        case AugmentOp::vflip: return band.at(x, h - 1 - y);
        case AugmentOp::hflip_rot90: return band.at(y, x);
        case AugmentOp::vflip_rot90: return band.at(w - 1 - y, h - 1 - x);
        }
        return 0.0f;
    };
    std::vector<float> data(static_cast<std::size_t>(ow) * oh);
    for (int y = 0; y < oh; ++y)
        for (int x = 0; x < ow; ++x)
            data[static_cast<std::size_t>(y) * ow + x] = source(x, y);
    return BandRaster(ow, oh, band.wavelength(), std::move(data));
}

MultiBandImage augment(const MultiBandImage& image, AugmentOp op) {
    std::vector<BandRaster> bands;
    bands.reserve(image.band_count());
    for (const auto& b : image.bands())
        bands.push_back(augment(b, op));
    return MultiBandImage(std::move(bands));
}

MultiBandImage composite(const MultiBandImage& ground, const MultiBandImage& cloud) {
    if (ground.band_count() != cloud.band_count())
        throw shape_error("band counts differ");
    if (ground.width() != cloud.width() || ground.height() != cloud.height())
        throw shape_error("dimensions differ");
    std::vector<BandRaster> bands;
    bands.reserve(ground.band_count());
    for (std::size_t b = 0; b < ground.band_count(); ++b) {
        auto g = ground.band(b).values();
        auto c = cloud.band(b).values();
        std::vector<float> data(g.size());
        for (std::size_t i = 0; i < data.size(); ++i)
            data[i] = static_cast<float>(static_cast<double>(g[i]) + c[i]);
        bands.emplace_back(ground.width(), ground.height(),
                           cloud.band(b).wavelength() ? cloud.band(b).wavelength()
                                                      : ground.band(b).wavelength(),
                           std::move(data));
    }
    return MultiBandImage(std::move(bands));
}

namespace {

std::string offsets_field(const ParallaxOffsets& offsets) {
    std::string out;
    for (std::size_t i = 0; i < offsets.per_band.size(); ++i) {
        if (i)
            out += ';';
        out += std::to_string(offsets.per_band[i].dx) + ',' +
               std::to_string(offsets.per_band[i].dy);
    }
    return out;
}

ParallaxOffsets parse_offsets_field(const std::string& field, const std::string& origin) {
    ParallaxOffsets offsets;
    std::stringstream ss(field);
    std::string part;
    while (std::getline(ss, part, ';')) {
        const auto comma = part.find(',');
        if (comma == std::string::npos)
            throw format_error(origin + ": bad offsets field '" + field + "'");
        offsets.per_band.push_back(
            {std::stoi(part.substr(0, comma)), std::stoi(part.substr(comma + 1))});
    }
    return offsets;
}

} // namespace

void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw io_error("cannot open " + path.string() + " for writing");
    out << "# profile=" << manifest.profile_name << '\n';
    out << "# coefficient=" << format_double(manifest.coefficient) << '\n';
    for (const auto& e : manifest.entries) {
        out << e.ground_path << '\t' << e.cloud_path << '\t' << e.cloudy_path << '\t'
            << e.seed << '\t' << format_double(e.thickness) << '\t'
            << (e.cap ? format_double(*e.cap) : "-") << '\t' << offsets_field(e.offsets)
            << '\t' << augment_name(e.augment_op) << '\n';
    }
    if (!out)
        throw io_error("write failed: " + path.string());
}

DatasetManifest read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw io_error("cannot open " + path.string());
    DatasetManifest manifest;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string origin = path.string() + ":" + std::to_string(line_no);
        if (line.empty())
            continue;
        if (line.starts_with("# profile=")) {
            manifest.profile_name = line.substr(10);
            continue;
        }
        if (line.starts_with("# coefficient=")) {
            manifest.coefficient = std::stod(line.substr(14));
            continue;
        }
        if (line.starts_with("#"))
            continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, '\t'))
            fields.push_back(field);
        if (fields.size() != 8)
            throw format_error(origin + ": expected 8 tab-separated fields");
        ManifestEntry e;
        e.ground_path = fields[0];
        e.cloud_path = fields[1];
        e.cloudy_path = fields[2];
        e.seed = std::stoull(fields[3]);
        e.thickness = std::stod(fields[4]);
        if (fields[5] != "-")
            e.cap = std::stod(fields[5]);
        e.offsets = parse_offsets_field(fields[6], origin);
        e.augment_op = augment_from_name(fields[7]);
        manifest.entries.push_back(std::move(e));
    }
    return manifest;
}

unsigned effective_thread_count(unsigned requested) {
    unsigned cap = std::thread::hardware_concurrency();
    if (cap == 0)
        cap = 1;
    if (const char* env = std::getenv("NIMBUS_THREADS")) {
        char* end = nullptr;
        const unsigned long v = std::strtoul(env, &end, 10);
        if (end != env && v >= 1)
            cap = static_cast<unsigned>(v);
    }
    if (requested == 0)
        return cap;
    return std::min(requested, cap);
}

DatasetManifest build_dataset(const std::vector<MultiBandImage>& grounds,
                              const SensorProfile& profile,
                              const GammaModel& model,
                              const DatasetParams& params,
                              const CloudProvider& provider) {
    if (grounds.empty())
        throw parameter_error("at least one ground image is required");
    if (params.n_pairs < 1)
        throw parameter_error("n_pairs must be >= 1");
    if (params.thickness_min < 0.0 || params.thickness_max < params.thickness_min)
        throw parameter_error("thickness range must satisfy 0 <= min <= max");
    if (params.cap && !(*params.cap > 0.0))
        throw parameter_error("thickness cap must be > 0");
    profile.validate();
    for (const auto& g : grounds) {
        if (g.band_count() != profile.bands.size())
            throw shape_error("ground band count does not match the profile");
    }
    std::filesystem::create_directories(params.output_dir);

    DatasetManifest manifest;
    manifest.profile_name = profile.name;
    manifest.coefficient = model.coefficient;
    manifest.entries.resize(params.n_pairs);

    auto run_item = [&](int i) {
        const std::uint64_t seed = derive_seed(params.base_seed, static_cast<std::uint64_t>(i));
        const auto& ground = grounds[static_cast<std::size_t>(i) % grounds.size()];
        const auto op = static_cast<AugmentOp>(sub_seed(seed, kTagAugment) % kAugmentOpCount);
        const MultiBandImage aug_ground = augment(ground, op);

        const double u = to_unit_double(sub_seed(seed, kTagThickness));
        const double thickness =
            params.thickness_min + u * (params.thickness_max - params.thickness_min);
        const CloudField cloud = provider(seed, aug_ground.width(), aug_ground.height());
        const CloudField adjusted = adjust_thickness(cloud, thickness, params.cap);
        const MultiBandImage bands = extrapolate_all(adjusted, profile, model);
        const ParallaxOffsets offsets = sample_offsets(profile, sub_seed(seed, kTagOffsets));
        const MultiBandImage shifted = apply_parallax(bands, offsets, profile);
        const MultiBandImage cloudy = composite(aug_ground, shifted);

        char stem[32];
        std::snprintf(stem, sizeof stem, "pair_%05d", i);
        ManifestEntry e;
        e.ground_path = std::string(stem) + "_ground.ras";
        e.cloud_path = std::string(stem) + "_cloud.ras";
        e.cloudy_path = std::string(stem) + "_cloudy.ras";
        e.seed = seed;
        e.thickness = thickness;
        e.cap = params.cap;
        e.offsets = offsets;
        e.augment_op = op;
        try {
            write_raster(aug_ground, params.output_dir / e.ground_path);
            write_raster(shifted, params.output_dir / e.cloud_path);
            write_raster(cloudy, params.output_dir / e.cloudy_path);
        } catch (const io_error& err) {
            throw io_error("entry " + std::to_string(i) + ": " + err.what());
        }
        manifest.entries[static_cast<std::size_t>(i)] = std::move(e);
    };

    const unsigned threads =
        std::min<unsigned>(effective_thread_count(params.threads),
                           static_cast<unsigned>(params.n_pairs));
    if (threads <= 1) {
        for (int i = 0; i < params.n_pairs; ++i)
            run_item(i);
    } else {
        std::atomic<int> next{0};
        std::exception_ptr first_error;
        std::mutex error_mutex;
        auto worker = [&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= params.n_pairs)
                    return;
                try {
                    run_item(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!first_error)
                        first_error = std::current_exception();
                    return;
                }
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back(worker);
        for (auto& t : pool)
            t.join();
        if (first_error)
            std::rethrow_exception(first_error);
    }

    write_manifest(manifest, params.output_dir / "manifest.tsv");
    return manifest;
}

} // namespace nimbus
