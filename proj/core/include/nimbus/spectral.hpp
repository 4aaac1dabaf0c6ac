#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "nimbus/cloud.hpp"
#include "nimbus/raster.hpp"

namespace nimbus {

/// The scattering-law exponent model: gamma = a * ln(c_r), clamped to the
/// physical range [gamma_min, gamma_max].
struct GammaModel {
    double coefficient = -0.14;
    double gamma_min = 0.0;
    double gamma_max = 4.0;
};

/// Exponent for a reference radiance. c_r == 0 returns gamma_max (the value
/// is irrelevant downstream because the extrapolated radiance at 0 is 0);
/// negative c_r is a domain error.
double gamma_of(double c_r, const GammaModel& model = {});

/// Double-precision scalar kernel of the spectral extrapolation:
/// C_t = (lambda_r / lambda_t)^gamma(c_r) * c_r, with C_t(0) = 0.
double extrapolated_radiance(double c_r, double lambda_r, double lambda_t,
                             const GammaModel& model = {});

/// Per-pixel extrapolation of a cloud field to a target wavelength. The
/// output raster is stamped lambda_t; computation is double, storage float.
BandRaster extrapolate_band(const CloudField& c_r, double lambda_t,
                            const GammaModel& model = {});

/// One extrapolated band per profile band, in profile order.
MultiBandImage extrapolate_all(const CloudField& c_r, const SensorProfile& profile,
                               const GammaModel& model = {});

/// Solve the band-ratio relation for the exponent:
/// gamma = ln(c_i / c_r) / ln(lambda_r / lambda_i).
/// Non-positive radiance is a domain error; equal wavelengths are a
/// degenerate pair (domain error).
double invert_gamma(double c_r, double c_i, double lambda_i, double lambda_r);

/// One (c_r, gamma) scatter point.
struct GammaSample {
    double c_r = 0.0;
    double gamma = 0.0;

    bool operator==(const GammaSample&) const = default;
};

/// Inversion samples from pre-separated cloud radiance: for every pixel with
/// cirrus >= min_cr (and > 0) and positive band radiance, one sample per
/// non-reference band. Pixels failing the guard are skipped silently.
std::vector<GammaSample> collect_gamma_samples(const MultiBandImage& cloud_bands,
                                               const CloudField& cirrus,
                                               double min_cr);

enum class Aggregator { mode, median, mean };

const char* aggregator_name(Aggregator a);
Aggregator aggregator_from_name(const std::string& name);

/// Per-bin statistics of the local-statistics pass.
struct BinStat {
    double mean_cr = 0.0;
    double mode_gamma = 0.0;
    double median_gamma = 0.0;
    double mean_gamma = 0.0;
    std::size_t count = 0;
};

/// Result of the binned fit. `coefficient` is the origin-constrained
/// least-squares slope in (ln c_r, gamma) space for the chosen aggregator;
/// each aggregator's R^2 is reported against its own such fit. The
/// intercept fit is a diagnostic only and never feeds synthesis.
struct LsgfFit {
    Aggregator aggregator = Aggregator::mean;
    double coefficient = 0.0;
    double r_squared_mode = 0.0;
    double r_squared_median = 0.0;
    double r_squared_mean = 0.0;
    int bin_count = 0;                // requested number of subsets
    std::vector<BinStat> bin_stats;   // non-empty bins only
    double diagnostic_slope = 0.0;    // fit with intercept, chosen aggregator
    double diagnostic_intercept = 0.0;

    double r_squared(Aggregator a) const;
};

/// Local statistics and global fitting: split [min c_r, max c_r] into
/// bin_count equal-width subsets, aggregate gamma per subset (mode at 0.01
/// resolution, median, mean) together with the subset's mean c_r, then fit
/// a single a through the origin: a = sum(g*ln c) / sum((ln c)^2).
/// Fewer than 2 non-empty bins is an insufficient-data error.
LsgfFit lsgf_fit(std::span<const GammaSample> samples, int bin_count,
                 Aggregator aggregator);

/// CSV with a "c_r,gamma" header row.
void write_samples_csv(std::span<const GammaSample> samples,
                       const std::filesystem::path& path);
std::vector<GammaSample> read_samples_csv(const std::filesystem::path& path);

/// Key/value text report including coefficient, per-aggregator R^2 and the
/// bin table.
std::string fit_report(const LsgfFit& fit);

} // namespace nimbus
