#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "nimbus/errors.hpp"
#include "nimbus/metrics.hpp"

using namespace nimbus;

namespace {

MultiBandImage random_image(int w, int h, int bands, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<float> dist(0.0f, 1.0f);
    std::vector<BandRaster> out;
    for (int b = 0; b < bands; ++b) {
        std::vector<float> data(static_cast<std::size_t>(w) * h);
        for (float& v : data)
            v = dist(rng);
        out.emplace_back(w, h, std::nullopt, std::move(data));
    }
    return MultiBandImage(std::move(out));
}

MultiBandImage from_values(int w, int h, std::vector<std::vector<float>> bands) {
    std::vector<BandRaster> out;
    for (auto& data : bands)
        out.emplace_back(w, h, std::nullopt, std::move(data));
    return MultiBandImage(std::move(out));
}

// ---- brute-force references, kept deliberately naive ----

double ref_rmse(const MultiBandImage& a, const MultiBandImage& b) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t band = 0; band < a.band_count(); ++band)
        for (int y = 0; y < a.height(); ++y)
            for (int x = 0; x < a.width(); ++x) {
                const double d = static_cast<double>(a.band(band).at(x, y)) -
                                 b.band(band).at(x, y);
                sum += d * d;
                ++n;
            }
    return std::sqrt(sum / static_cast<double>(n));
}

double ref_psnr(const MultiBandImage& a, const MultiBandImage& b, double peak) {
    const double r = ref_rmse(a, b);
    if (r == 0.0)
        return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(peak * peak / (r * r));
}

double ref_cc(const MultiBandImage& a, const MultiBandImage& b) {
    std::vector<double> xs, ys;
    for (std::size_t band = 0; band < a.band_count(); ++band)
        for (int y = 0; y < a.height(); ++y)
            for (int x = 0; x < a.width(); ++x) {
                xs.push_back(a.band(band).at(x, y));
                ys.push_back(b.band(band).at(x, y));
            }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(xs.size());
    my /= static_cast<double>(xs.size());
    double cov = 0.0, va = 0.0, vb = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        cov += (xs[i] - mx) * (ys[i] - my);
        va += (xs[i] - mx) * (xs[i] - mx);
        vb += (ys[i] - my) * (ys[i] - my);
    }
    return cov / std::sqrt(va * vb);
}

double ref_sam(const MultiBandImage& a, const MultiBandImage& b) {
    double sum = 0.0;
    std::size_t used = 0;
    for (int y = 0; y < a.height(); ++y)
        for (int x = 0; x < a.width(); ++x) {
            double dot = 0.0, na = 0.0, nb = 0.0;
            for (std::size_t band = 0; band < a.band_count(); ++band) {
                const double u = a.band(band).at(x, y);
                const double v = b.band(band).at(x, y);
                dot += u * v;
                na += u * u;
                nb += v * v;
            }
            if (na == 0.0 || nb == 0.0)
                continue;
            double c = dot / std::sqrt(na * nb);
            c = std::clamp(c, -1.0, 1.0);
            sum += std::acos(c);
            ++used;
        }
    return used ? sum / static_cast<double>(used) * 180.0 / std::numbers::pi : 0.0;
}

// direct 2-D weighted-window SSIM, no separable shortcuts
double ref_ssim(const MultiBandImage& a, const MultiBandImage& b, int win, double sigma,
                double k1, double k2, double peak) {
    const double c1 = (k1 * peak) * (k1 * peak);
    const double c2 = (k2 * peak) * (k2 * peak);
    std::vector<double> g(win);
    const double c = (win - 1) / 2.0;
    double gsum = 0.0;
    for (int i = 0; i < win; ++i) {
        g[i] = std::exp(-(i - c) * (i - c) / (2.0 * sigma * sigma));
        gsum += g[i];
    }
    for (double& v : g)
        v /= gsum;
    double band_sum = 0.0;
    for (std::size_t band = 0; band < a.band_count(); ++band) {
        double acc = 0.0;
        std::size_t windows = 0;
        for (int oy = 0; oy + win <= a.height(); ++oy)
            for (int ox = 0; ox + win <= a.width(); ++ox) {
                double mx = 0.0, my = 0.0, exx = 0.0, eyy = 0.0, exy = 0.0;
                for (int j = 0; j < win; ++j)
                    for (int i = 0; i < win; ++i) {
                        const double w = g[i] * g[j];
                        const double u = a.band(band).at(ox + i, oy + j);
                        const double v = b.band(band).at(ox + i, oy + j);
                        mx += w * u;
                        my += w * v;
                        exx += w * u * u;
                        eyy += w * v * v;
                        exy += w * u * v;
                    }
                const double vx = exx - mx * mx;
                const double vy = eyy - my * my;
                const double cov = exy - mx * my;
                acc += ((2 * mx * my + c1) * (2 * cov + c2)) /
                       ((mx * mx + my * my + c1) * (vx + vy + c2));
                ++windows;
            }
        band_sum += acc / static_cast<double>(windows);
    }
    return band_sum / static_cast<double>(a.band_count());
}

} // namespace

TEST_CASE("rmse basics") {
    const auto a = from_values(2, 1, {{0.0f, 0.0f}});
    const auto b = from_values(2, 1, {{0.3f, 0.4f}});
    CHECK(rmse(a, a) == 0.0);
    CHECK(rmse(a, b) == doctest::Approx(std::sqrt(0.125)).epsilon(1e-7));
    const auto c = from_values(2, 1, {{0.51f, 0.41f}});
    const auto d = from_values(2, 1, {{0.5f, 0.4f}});
    CHECK(rmse(c, d) == doctest::Approx(0.01).epsilon(1e-5));
    CHECK(rmse(a, b) == rmse(b, a));
    CHECK_THROWS_AS(rmse(a, random_image(3, 1, 1, 0)), shape_error);
}

TEST_CASE("psnr basics") {
    const auto a = random_image(4, 4, 1, 1);
    CHECK(std::isinf(psnr(a, a)));
    std::vector<float> shifted(a.band(0).values().begin(), a.band(0).values().end());
    for (float& v : shifted)
        v += 0.1f;
    const auto b = from_values(4, 4, {shifted});
    CHECK(psnr(a, b) == doctest::Approx(20.0).epsilon(1e-5));
    for (float& v : shifted)
        v -= 0.09f; // net +0.01
    CHECK(psnr(a, from_values(4, 4, {shifted})) == doctest::Approx(40.0).epsilon(1e-4));
    CHECK_THROWS_AS(psnr(a, a, 0.0), parameter_error);
}

TEST_CASE("ssim identity, sensitivity, and window contract") {
    const auto a = random_image(16, 16, 1, 2);
    CHECK(ssim(a, a) == doctest::Approx(1.0).epsilon(1e-12));
    std::vector<float> inverted(a.band(0).values().begin(), a.band(0).values().end());
    for (float& v : inverted)
        v = 1.0f - v;
    CHECK(ssim(a, from_values(16, 16, {inverted})) < 1.0);
    CHECK_THROWS_AS(ssim(random_image(8, 8, 1, 3), random_image(8, 8, 1, 4)),
                    parameter_error); // smaller than the 11x11 window
    SsimParams even_window;
    even_window.window = 4;
    CHECK_THROWS_AS(ssim(a, a, even_window), parameter_error);
}

TEST_CASE("ssim agrees with the direct reference implementation") {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const auto a = random_image(64, 64, 1, 100 + seed);
        const auto b = random_image(64, 64, 1, 200 + seed);
        const double expected = ref_ssim(a, b, 11, 1.5, 0.01, 0.03, 1.0);
        CHECK(ssim(a, b) == doctest::Approx(expected).epsilon(1e-6));
    }
    SUBCASE("alternate window size") {
        const auto a = random_image(8, 8, 2, 7);
        const auto b = random_image(8, 8, 2, 8);
        SsimParams p;
        p.window = 5;
        CHECK(ssim(a, b, p) ==
              doctest::Approx(ref_ssim(a, b, 5, 1.5, 0.01, 0.03, 1.0)).epsilon(1e-9));
    }
}

TEST_CASE("cc basics") {
    const auto a = random_image(4, 4, 1, 5);
    std::vector<float> affine(a.band(0).values().begin(), a.band(0).values().end());
    for (float& v : affine)
        v = 2.0f * v + 1.0f;
    CHECK(cc(a, from_values(4, 4, {affine})) == doctest::Approx(1.0).epsilon(1e-9));
    std::vector<float> negated(a.band(0).values().begin(), a.band(0).values().end());
    for (float& v : negated)
        v = -v;
    CHECK(cc(a, from_values(4, 4, {negated})) == doctest::Approx(-1.0).epsilon(1e-9));

    const auto x = from_values(4, 1, {{1, 2, 3, 4}});
    const auto y = from_values(4, 1, {{1, 2, 4, 3}});
    CHECK(cc(x, y) == doctest::Approx(0.8).epsilon(1e-12));

    const auto constant = from_values(4, 4, {std::vector<float>(16, 0.5f)});
    CHECK_THROWS_AS(cc(constant, a), domain_error);
    CHECK(cc_per_band_mean(x, y) == doctest::Approx(0.8).epsilon(1e-12));

    SUBCASE("never leaves [-1, 1] even for bit-identical inputs") {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const auto img = random_image(8, 8, 2, 400 + seed);
            CHECK(cc(img, img) <= 1.0);
            CHECK(cc(img, img) >= -1.0);
        }
    }
}

TEST_CASE("sam basics") {
    const auto a = random_image(4, 4, 3, 9);
    SUBCASE("scale invariance") {
        std::vector<std::vector<float>> scaled;
        for (const auto& band : a.bands()) {
            std::vector<float> v(band.values().begin(), band.values().end());
            for (float& x : v)
                x *= 3.0f;
            scaled.push_back(std::move(v));
        }
        CHECK(sam(a, from_values(4, 4, std::move(scaled))) ==
              doctest::Approx(0.0).scale(1.0).epsilon(1e-3));
    }
    SUBCASE("orthogonal spectra give 90 degrees") {
        const auto u = from_values(1, 1, {{1.0f}, {0.0f}});
        const auto v = from_values(1, 1, {{0.0f}, {1.0f}});
        CHECK(sam(u, v) == doctest::Approx(90.0).epsilon(1e-12));
    }
    SUBCASE("45 degrees") {
        const auto u = from_values(1, 1, {{1.0f}, {1.0f}});
        const auto v = from_values(1, 1, {{1.0f}, {0.0f}});
        CHECK(sam(u, v) == doctest::Approx(45.0).epsilon(1e-12));
    }
    SUBCASE("zero-spectrum pixels are skipped and counted") {
        const auto u = from_values(2, 1, {{0.0f, 1.0f}, {0.0f, 1.0f}});
        const auto v = from_values(2, 1, {{1.0f, 1.0f}, {0.0f, 0.0f}});
        std::size_t skipped = 0;
        const double angle = sam(u, v, &skipped);
        CHECK(skipped == 1);
        CHECK(angle == doctest::Approx(45.0).epsilon(1e-12));
    }
    SUBCASE("single band is rejected") {
        CHECK_THROWS_AS(sam(random_image(2, 2, 1, 1), random_image(2, 2, 1, 2)),
                        parameter_error);
    }
}

TEST_CASE("four plain metrics match brute force on random stacks") {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        const auto a = random_image(8, 8, 3, 1000 + seed);
        const auto b = random_image(8, 8, 3, 2000 + seed);
        CHECK(rmse(a, b) == doctest::Approx(ref_rmse(a, b)).epsilon(1e-12));
        CHECK(psnr(a, b) == doctest::Approx(ref_psnr(a, b, 1.0)).epsilon(1e-12));
        CHECK(cc(a, b) == doctest::Approx(ref_cc(a, b)).epsilon(1e-9));
        CHECK(sam(a, b) == doctest::Approx(ref_sam(a, b)).epsilon(1e-9));
        // argument order must not matter for these three
        CHECK(rmse(a, b) == rmse(b, a));
        CHECK(psnr(a, b) == psnr(b, a));
        CHECK(sam(a, b) == sam(b, a));
    }
}

TEST_CASE("histogram overlap") {
    SUBCASE("identical samples give 1.0") {
        const auto a = random_image(16, 16, 1, 3);
        const auto ov = histogram_overlap(a.bands(), a.bands(), 256);
        CHECK(ov.rate == 1.0);
        CHECK(ov.bin_count == 256);
    }
    SUBCASE("disjoint ranges give 0.0") {
        const auto low = from_values(2, 2, {{0.0f, 0.1f, 0.2f, 0.1f}});
        const auto high = from_values(2, 2, {{0.8f, 0.9f, 1.0f, 0.9f}});
        CHECK(histogram_overlap(low.bands(), high.bands(), 16).rate == 0.0);
    }
    SUBCASE("normalization by the real histogram is asymmetric") {
        const auto real = from_values(4, 1, {{0.5f, 0.5f, 0.5f, 0.5f}});
        const auto gen = from_values(2, 1, {{0.5f, 0.5f}});
        CHECK(histogram_overlap(real.bands(), gen.bands(), 8).rate ==
              doctest::Approx(0.5));
        CHECK(histogram_overlap(gen.bands(), real.bands(), 8).rate ==
              doctest::Approx(1.0));
    }
    SUBCASE("partial overlap in between") {
        const auto real = from_values(4, 1, {{0.1f, 0.1f, 0.9f, 0.9f}});
        const auto gen = from_values(4, 1, {{0.1f, 0.1f, 0.1f, 0.1f}});
        const double rate = histogram_overlap(real.bands(), gen.bands(), 4).rate;
        CHECK(rate == doctest::Approx(0.5));
    }
    SUBCASE("empty inputs are rejected") {
        const auto a = random_image(2, 2, 1, 1);
        CHECK_THROWS_AS(histogram_overlap({}, a.bands(), 4), parameter_error);
        CHECK_THROWS_AS(histogram_overlap(a.bands(), {}, 4), parameter_error);
    }
}

TEST_CASE("evaluate_pair bundles the identity maxima") {
    const auto a = random_image(16, 16, 3, 77);
    const MetricReport report = evaluate_pair(a, a);
    CHECK(report.rmse == 0.0);
    CHECK(report.psnr_infinite);
    CHECK(report.ssim == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(report.cc == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(report.sam == 0.0);
    CHECK(report.sam_defined);

    const std::string text = report.to_text();
    CHECK(text.find("psnr = inf") != std::string::npos);
    CHECK(text.find("rmse = 0") != std::string::npos);

    SUBCASE("single-band pairs skip SAM") {
        const auto s = random_image(16, 16, 1, 78);
        const MetricReport r = evaluate_pair(s, s);
        CHECK_FALSE(r.sam_defined);
        CHECK(r.to_text().find("sam = -") != std::string::npos);
        CHECK(r.to_csv_row().find(",-") != std::string::npos);
    }
}
