#pragma once

#include <span>
#include <string>

#include "nimbus/raster.hpp"

namespace nimbus {

/// Root mean square error over all pixels and bands.
double rmse(const MultiBandImage& a, const MultiBandImage& b);

/// 10*log10(peak^2 / MSE); +infinity when MSE == 0.
double psnr(const MultiBandImage& a, const MultiBandImage& b, double peak = 1.0);

struct SsimParams {
    int window = 11;     // odd, >= 3
    double sigma = 1.5;  // Gaussian window std-dev
    double k1 = 0.01;
    double k2 = 0.03;
    double peak = 1.0;
};

/// Mean local SSIM over all fully interior Gaussian windows, averaged across
/// bands. Images smaller than the window are a parameter error.
double ssim(const MultiBandImage& a, const MultiBandImage& b, const SsimParams& params = {});

/// Pearson correlation over all pixels and bands (global). Constant inputs
/// are an undefined-correlation (domain) error.
double cc(const MultiBandImage& a, const MultiBandImage& b);

/// Mean of per-band Pearson correlations (variant; global cc is the default).
double cc_per_band_mean(const MultiBandImage& a, const MultiBandImage& b);

/// Mean per-pixel spectral angle in degrees. Requires >= 2 bands; pixels
/// where either spectrum is the zero vector are skipped and counted.
double sam(const MultiBandImage& a, const MultiBandImage& b,
           std::size_t* skipped_pixels = nullptr);

struct HistogramOverlap {
    double rate = 0.0; // [0, 1]
    int bin_count = 0;
    double lo = 0.0;   // shared range over both sample sets
    double hi = 0.0;
};

/// Overlap of the generated histogram with the real one over shared
/// equal-width bins: sum_k min(h_real, h_gen) / sum_k h_real. Normalization
/// by the real histogram makes this deliberately asymmetric.
HistogramOverlap histogram_overlap(std::span<const BandRaster> real,
                                   std::span<const BandRaster> gen,
                                   int bin_count = 256);

/// The five-metric bundle for one image pair.
struct MetricReport {
    double rmse = 0.0;
    double psnr = 0.0; // +inf marker when mse == 0
    double ssim = 0.0;
    double cc = 0.0;
    double sam = 0.0;
    bool psnr_infinite = false;
    bool sam_defined = true; // false for single-band inputs

    std::string to_text() const;
    std::string to_csv_row() const;
    static std::string csv_header();
};

MetricReport evaluate_pair(const MultiBandImage& reference, const MultiBandImage& test,
                           double peak = 1.0);

} // namespace nimbus
