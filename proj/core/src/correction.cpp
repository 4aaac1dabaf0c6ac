#include "nimbus/correction.hpp"

#include <charconv>
#include <sstream>

namespace nimbus {

namespace {

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

} // namespace

std::string CorrectionReport::to_text() const {
    std::ostringstream out;
    out << "profile = " << profile_name << '\n';
    out << "coefficient = " << format_double(coefficient) << '\n';
    for (std::size_t b = 0; b < band_cloud_mean.size(); ++b) {
        out << "band" << b + 1 << "_cloud_mean = " << format_double(band_cloud_mean[b])
            << '\n';
        out << "band" << b + 1
            << "_clamped_fraction = " << format_double(band_clamped_fraction[b]) << '\n';
    }
    return out.str();
}

MultiBandImage estimate_cloud(const CloudField& cirrus, const SensorProfile& profile,
                              const GammaModel& model) {
    return extrapolate_all(cirrus, profile, model);
}

CorrectionResult correct_thin_clouds(const MultiBandImage& cloudy,
                                     const CloudField& cirrus,
                                     const SensorProfile& profile,
                                     const GammaModel& model) {
    profile.validate();
    if (cloudy.band_count() != profile.bands.size())
        throw shape_error("cloudy band count does not match the profile");
    if (cloudy.width() != cirrus.width() || cloudy.height() != cirrus.height())
        throw shape_error("cirrus field is not co-registered with the cloudy image "
                          "(resampling is not supported)");

    CorrectionResult result;
    result.report.profile_name = profile.name;
    result.report.coefficient = model.coefficient;
    std::vector<BandRaster> corrected;
    corrected.reserve(cloudy.band_count());
    for (std::size_t b = 0; b < cloudy.band_count(); ++b) {
        // subtract the float-rounded estimate exactly as extrapolate_band stores it
        const BandRaster estimate =
            extrapolate_band(cirrus, profile.bands[b].wavelength, model);
        auto est = estimate.values();
        auto obs = cloudy.band(b).values();
        std::vector<float> data(obs.size());
        double est_sum = 0.0;
        std::size_t clamped = 0;
        for (std::size_t i = 0; i < data.size(); ++i) {
            est_sum += est[i];
            const double d = static_cast<double>(obs[i]) - est[i];
            if (d < 0.0) {
                ++clamped;
                data[i] = 0.0f;
            } else {
                data[i] = static_cast<float>(d);
            }
        }
        result.report.band_cloud_mean.push_back(est_sum /
                                                static_cast<double>(data.size()));
        result.report.band_clamped_fraction.push_back(
            static_cast<double>(clamped) / static_cast<double>(data.size()));
        corrected.emplace_back(cloudy.width(), cloudy.height(),
                               cloudy.band(b).wavelength(), std::move(data));
    }
    result.corrected = MultiBandImage(std::move(corrected));
    return result;
}

} // namespace nimbus
