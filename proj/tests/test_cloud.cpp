#include "doctest.h"

#include <algorithm>
#include <filesystem>
#include <random>

#include "nimbus/cloud.hpp"
#include "nimbus/errors.hpp"
#include "nimbus/profiles.hpp"
#include "nimbus/ras1.hpp"

using namespace nimbus;

TEST_CASE("generate_fbm_cloud is deterministic and bounded") {
    FbmParams params;
    params.seed = 1234;
    const CloudField a = generate_fbm_cloud(64, 48, params);
    const CloudField b = generate_fbm_cloud(64, 48, params);
    CHECK(a == b);
    CHECK(a.wavelength() == 1.375);
    CHECK(a.width() == 64);
    CHECK(a.height() == 48);

    SUBCASE("different seeds differ") {
        params.seed = 1235;
        CHECK_FALSE(a == generate_fbm_cloud(64, 48, params));
    }
    SUBCASE("values stay within [0, max_radiance] for any seed") {
        for (std::uint64_t s : {0ULL, 1ULL, 77ULL, 0xFFFFFFFFFFFFFFFFULL}) {
            params.seed = s;
            const CloudField f = generate_fbm_cloud(32, 32, params);
            CHECK(f.raster().min_value() >= 0.0f);
            CHECK(f.raster().max_value() <= static_cast<float>(params.max_radiance));
        }
    }
    SUBCASE("coverage threshold near 1 empties the field") {
        params.coverage_threshold = 0.999;
        const CloudField f = generate_fbm_cloud(64, 64, params);
        std::size_t nonzero = 0;
        for (float v : f.raster().values())
            if (v > 0.0f)
                ++nonzero;
        CHECK(nonzero < f.raster().pixel_count() / 100);
    }
}

TEST_CASE("generate_fbm_cloud validates parameters") {
    FbmParams p;
    p.octaves = 0;
    CHECK_THROWS_AS(generate_fbm_cloud(8, 8, p), parameter_error);
    p = {};
    p.persistence = 0.0;
    CHECK_THROWS_AS(generate_fbm_cloud(8, 8, p), parameter_error);
    p = {};
    p.lacunarity = 1.0;
    CHECK_THROWS_AS(generate_fbm_cloud(8, 8, p), parameter_error);
    p = {};
    p.coverage_threshold = 1.0;
    CHECK_THROWS_AS(generate_fbm_cloud(8, 8, p), parameter_error);
    p = {};
    CHECK_THROWS_AS(generate_fbm_cloud(0, 8, p), parameter_error);
}

TEST_CASE("ingest_cloud snaps tiny negatives and stamps the reference wavelength") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "nimbus_test_ingest";
    fs::create_directories(dir);
    const SensorProfile profile = landsat89_profile();

    SUBCASE("valid single-band file") {
        write_raster(MultiBandImage({BandRaster(2, 2, std::nullopt,
                                                {0.0f, 0.05f, -1e-8f, 0.02f})}),
                     dir / "ok.ras");
        const CloudField f = ingest_cloud(dir / "ok.ras", profile);
        CHECK(f.wavelength() == 1.375);
        CHECK(f.raster().at(0, 1) == 0.0f); // snapped
    }
    SUBCASE("too negative") {
        write_raster(MultiBandImage({BandRaster(1, 1, std::nullopt, {-1e-3f})}),
                     dir / "neg.ras");
        CHECK_THROWS_AS(ingest_cloud(dir / "neg.ras", profile), validation_error);
    }
    SUBCASE("multi-band file") {
        std::vector<BandRaster> bands(3, BandRaster::filled(2, 2, std::nullopt, 0.0f));
        write_raster(MultiBandImage(std::move(bands)), dir / "multi.ras");
        CHECK_THROWS_AS(ingest_cloud(dir / "multi.ras", profile), shape_error);
    }
    fs::remove_all(dir);
}

namespace {

BandRaster random_band(int w, int h, std::uint64_t seed, float max_v = 0.1f) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<float> dist(0.0f, max_v);
    std::vector<float> data(static_cast<std::size_t>(w) * h);
    for (float& v : data)
        v = dist(rng);
    return BandRaster(w, h, 1.375, std::move(data));
}

} // namespace

TEST_CASE("extract_patches counts anchors like the stride formula") {
    PatchSpec spec; // 512 / 128 defaults
    SUBCASE("1024x1024 yields 5x5") {
        const auto patches = extract_patches(random_band(1024, 1024, 1), spec);
        CHECK(patches.size() == 25);
    }
    SUBCASE("exact fit yields the input itself") {
        const BandRaster img = random_band(512, 512, 2);
        const auto patches = extract_patches(img, spec);
        REQUIRE(patches.size() == 1);
        CHECK(patches[0] == img);
    }
    SUBCASE("too small yields none") {
        CHECK(extract_patches(random_band(511, 512, 3), spec).empty());
    }
    SUBCASE("anchors are row-major multiples of the stride") {
        const auto anchors = patch_anchors(1024, 768, spec);
        REQUIRE(anchors.size() == 5 * 3);
        CHECK(anchors[0].x == 0);
        CHECK(anchors[0].y == 0);
        CHECK(anchors[1].x == 128);
        CHECK(anchors[1].y == 0);
        CHECK(anchors[5].x == 0);
        CHECK(anchors[5].y == 128);
    }
    SUBCASE("patch content matches the source window") {
        PatchSpec small{4, 2, 0.015f};
        const BandRaster img = random_band(8, 6, 4);
        const auto anchors = patch_anchors(8, 6, small);
        const auto patches = extract_patches(img, small);
        REQUIRE(patches.size() == anchors.size());
        for (std::size_t k = 0; k < patches.size(); ++k)
            for (int y = 0; y < 4; ++y)
                for (int x = 0; x < 4; ++x)
                    CHECK(patches[k].at(x, y) == img.at(anchors[k].x + x, anchors[k].y + y));
    }
    SUBCASE("stride == patch_size partitions the covered region") {
        PatchSpec tiling{4, 4, 0.015f};
        const BandRaster img = random_band(12, 8, 5);
        const auto patches = extract_patches(img, tiling);
        double patch_sum = 0.0;
        for (const auto& p : patches)
            for (float v : p.values())
                patch_sum += v;
        double image_sum = 0.0;
        for (float v : img.values())
            image_sum += v;
        CHECK(patch_sum == doctest::Approx(image_sum).epsilon(1e-9));
    }
}

TEST_CASE("clean_patches keeps the boundary and drops weak patches") {
    PatchSpec spec{2, 2, 0.015f};
    std::vector<BandRaster> patches;
    patches.push_back(BandRaster(2, 2, 1.375, {0.0f, 0.0f, 0.0f, 0.0149f}));
    patches.push_back(BandRaster(2, 2, 1.375, {0.0f, 0.0f, 0.0f, 0.015f}));
    patches.push_back(BandRaster::filled(2, 2, 1.375, 0.0f));
    patches.push_back(BandRaster(2, 2, 1.375, {0.5f, 0.0f, 0.0f, 0.0f}));
    const auto kept = clean_patches(patches, spec);
    REQUIRE(kept.size() == 2);
    CHECK(kept[0].max_value() == 0.015f);
    CHECK(kept[1].max_value() == 0.5f);

    SUBCASE("cleaning is idempotent") {
        CHECK(clean_patches(kept, spec) == kept);
    }
}

TEST_CASE("adjust_thickness scales and caps") {
    const CloudField cloud(BandRaster(2, 1, 1.375, {0.03f, 0.06f}));
    SUBCASE("identity") {
        CHECK(adjust_thickness(cloud, 1.0) == cloud);
    }
    SUBCASE("cap binds") {
        const auto out = adjust_thickness(cloud, 2.0, 0.05);
        CHECK(out.raster().at(0, 0) == 0.05f);
        CHECK(out.raster().at(1, 0) == 0.05f);
    }
    SUBCASE("zero scale empties the field") {
        const auto out = adjust_thickness(cloud, 0.0);
        CHECK(out.raster().max_value() == 0.0f);
    }
    SUBCASE("negative scale rejected") {
        CHECK_THROWS_AS(adjust_thickness(cloud, -0.5), parameter_error);
    }
    SUBCASE("monotone in the scale") {
        const BandRaster base = random_band(16, 16, 6);
        const CloudField f(base);
        const auto lo = adjust_thickness(f, 0.7, 0.08);
        const auto hi = adjust_thickness(f, 1.9, 0.08);
        for (std::size_t i = 0; i < base.pixel_count(); ++i)
            CHECK(hi.raster().values()[i] >= lo.raster().values()[i]);
    }
}
