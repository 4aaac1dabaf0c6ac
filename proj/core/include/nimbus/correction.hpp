#pragma once

#include <string>
#include <vector>

#include "nimbus/cloud.hpp"
#include "nimbus/raster.hpp"
#include "nimbus/spectral.hpp"

namespace nimbus {

/// Diagnostics of a model-driven correction pass.
struct CorrectionReport {
    std::string profile_name;
    double coefficient = -0.14;
    std::vector<double> band_cloud_mean;       // mean estimated cloud per band
    std::vector<double> band_clamped_fraction; // negatives clamped to 0, per band

    std::string to_text() const;
};

struct CorrectionResult {
    MultiBandImage corrected;
    CorrectionReport report;
};

/// Thin-cloud correction by cloud subtraction: per band,
/// out = max(0, cloudy - extrapolate_band(cirrus, lambda_t)), counting the
/// clamped pixels. The cirrus field must be co-registered with the cloudy
/// image and the band count must match the profile; no resampling is done.
CorrectionResult correct_thin_clouds(const MultiBandImage& cloudy,
                                     const CloudField& cirrus,
                                     const SensorProfile& profile,
                                     const GammaModel& model = {});

/// Per-band cloud estimate from the cirrus field (extrapolate_all exposed
/// for evaluation workflows).
MultiBandImage estimate_cloud(const CloudField& cirrus, const SensorProfile& profile,
                              const GammaModel& model = {});

} // namespace nimbus
