#include "nimbus/spectral.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace nimbus {

double gamma_of(double c_r, const GammaModel& model) {
    if (c_r < 0.0 || !std::isfinite(c_r))
        throw domain_error("reference radiance must be non-negative");
    if (c_r == 0.0)
        return model.gamma_max;
    return std::clamp(model.coefficient * std::log(c_r), model.gamma_min, model.gamma_max);
}

double extrapolated_radiance(double c_r, double lambda_r, double lambda_t,
                             const GammaModel& model) {
    if (!(lambda_t > 0.0))
        throw parameter_error("target wavelength must be positive");
    if (!(lambda_r > 0.0))
        throw parameter_error("reference wavelength must be positive");
    if (c_r == 0.0)
        return 0.0;
    return std::pow(lambda_r / lambda_t, gamma_of(c_r, model)) * c_r;
}

BandRaster extrapolate_band(const CloudField& c_r, double lambda_t,
                            const GammaModel& model) {
    if (!(lambda_t > 0.0))
        throw parameter_error("target wavelength must be positive");
    const BandRaster& in = c_r.raster();
    const double lambda_r = c_r.wavelength();
    std::vector<float> data(in.pixel_count());
    auto src = in.values();
    for (std::size_t i = 0; i < data.size(); ++i)
        data[i] = static_cast<float>(
            extrapolated_radiance(src[i], lambda_r, lambda_t, model));
    return BandRaster(in.width(), in.height(), lambda_t, std::move(data));
}

MultiBandImage extrapolate_all(const CloudField& c_r, const SensorProfile& profile,
                               const GammaModel& model) {
    profile.validate();
    std::vector<BandRaster> bands;
    bands.reserve(profile.bands.size());
    for (const auto& b : profile.bands)
        bands.push_back(extrapolate_band(c_r, b.wavelength, model));
    return MultiBandImage(std::move(bands));
}

double invert_gamma(double c_r, double c_i, double lambda_i, double lambda_r) {
    if (!(c_r > 0.0) || !(c_i > 0.0))
        throw domain_error("radiances must be positive to invert the band ratio");
    if (!(lambda_i > 0.0) || !(lambda_r > 0.0))
        throw parameter_error("wavelengths must be positive");
    if (lambda_i == lambda_r)
        throw domain_error("degenerate band pair: equal wavelengths");
    return std::log(c_i / c_r) / std::log(lambda_r / lambda_i);
}

std::vector<GammaSample> collect_gamma_samples(const MultiBandImage& cloud_bands,
                                               const CloudField& cirrus,
                                               double min_cr) {
    if (cloud_bands.empty())
        throw shape_error("no cloud bands to sample");
    if (cloud_bands.width() != cirrus.width() || cloud_bands.height() != cirrus.height())
        throw shape_error("cloud bands and cirrus field dimensions differ");
    const double lambda_r = cirrus.wavelength();
    for (const auto& band : cloud_bands.bands()) {
        if (!band.wavelength())
            throw validation_error("every cloud band needs a wavelength to invert");
    }

    std::vector<GammaSample> samples;
    auto ref = cirrus.raster().values();
    for (const auto& band : cloud_bands.bands()) {
        const double lambda_i = *band.wavelength();
        if (lambda_i == lambda_r)
            continue; // reference band carries no ratio information
        auto values = band.values();
        for (std::size_t p = 0; p < values.size(); ++p) {
            const double c_r = ref[p];
            const double c_i = values[p];
            if (c_r <= 0.0 || c_r < min_cr || c_i <= 0.0)
                continue;
            samples.push_back({c_r, invert_gamma(c_r, c_i, lambda_i, lambda_r)});
        }
    }
    return samples;
}

const char* aggregator_name(Aggregator a) {
    switch (a) {
    case Aggregator::mode: return "mode";
    case Aggregator::median: return "median";
    case Aggregator::mean: return "mean";
    }
    return "?";
}

Aggregator aggregator_from_name(const std::string& name) {
    if (name == "mode") return Aggregator::mode;
    if (name == "median") return Aggregator::median;
    if (name == "mean") return Aggregator::mean;
    throw parameter_error("unknown aggregator '" + name + "' (mode|median|mean)");
}

double LsgfFit::r_squared(Aggregator a) const {
    switch (a) {
    case Aggregator::mode: return r_squared_mode;
    case Aggregator::median: return r_squared_median;
    case Aggregator::mean: return r_squared_mean;
    }
    return 0.0;
}

namespace {

constexpr double kModeResolution = 0.01;

// Midpoint of the tallest 0.01-wide sub-bin (absolute grid), ties toward the
// lower gamma.
double mode_of(std::vector<double>& gammas) {
    std::map<std::int64_t, std::size_t> hist;
    for (double g : gammas)
        ++hist[static_cast<std::int64_t>(std::floor(g / kModeResolution))];
    std::int64_t best_key = hist.begin()->first;
    std::size_t best_count = 0;
    for (const auto& [key, count] : hist) { // keys ascend, so ties keep the lower
        if (count > best_count) {
            best_key = key;
            best_count = count;
        }
    }
    return (static_cast<double>(best_key) + 0.5) * kModeResolution;
}

double median_of(std::vector<double>& gammas) {
    std::sort(gammas.begin(), gammas.end());
    const std::size_t n = gammas.size();
    if (n % 2)
        return gammas[n / 2];
    return 0.5 * (gammas[n / 2 - 1] + gammas[n / 2]);
}

// Origin-constrained slope in (ln c, g) space plus its R^2 against the
// aggregated points.
struct OriginFit {
    double slope = 0.0;
    double r2 = 0.0;
};

OriginFit fit_through_origin(const std::vector<double>& ln_c, const std::vector<double>& g) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < ln_c.size(); ++i) {
        num += g[i] * ln_c[i];
        den += ln_c[i] * ln_c[i];
    }
    OriginFit fit;
    fit.slope = den > 0.0 ? num / den : 0.0;
    double mean_g = 0.0;
    for (double v : g)
        mean_g += v;
    mean_g /= static_cast<double>(g.size());
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double e = g[i] - fit.slope * ln_c[i];
        ss_res += e * e;
        const double d = g[i] - mean_g;
        ss_tot += d * d;
    }
    if (ss_tot > 0.0)
        fit.r2 = 1.0 - ss_res / ss_tot;
    else
        fit.r2 = ss_res > 0.0 ? 0.0 : 1.0;
    return fit;
}

} // namespace

LsgfFit lsgf_fit(std::span<const GammaSample> samples, int bin_count,
                 Aggregator aggregator) {
    if (bin_count < 2)
        throw parameter_error("bin_count must be >= 2");
    if (samples.empty())
        throw insufficient_data_error("no samples to fit");

    double lo = samples[0].c_r, hi = samples[0].c_r;
    for (const auto& s : samples) {
        if (!(s.c_r > 0.0))
            throw domain_error("gamma samples need positive reference radiance");
        lo = std::min(lo, s.c_r);
        hi = std::max(hi, s.c_r);
    }

    // Equal-width subsets of [lo, hi]; the top edge folds into the last bin.
    std::vector<std::vector<double>> bin_gamma(bin_count);
    std::vector<double> bin_cr_sum(bin_count, 0.0);
    const double width = hi - lo;
    for (const auto& s : samples) {
        int idx = 0;
        if (width > 0.0)
            idx = std::min(bin_count - 1,
                           static_cast<int>((s.c_r - lo) / width * bin_count));
        bin_gamma[idx].push_back(s.gamma);
        bin_cr_sum[idx] += s.c_r;
    }

    LsgfFit fit;
    fit.aggregator = aggregator;
    fit.bin_count = bin_count;
    std::vector<double> ln_c;
    std::vector<double> agg_mode, agg_median, agg_mean;
    for (int b = 0; b < bin_count; ++b) {
        auto& gammas = bin_gamma[b];
        if (gammas.empty())
            continue; // dropped, not interpolated
        BinStat stat;
        stat.count = gammas.size();
        stat.mean_cr = bin_cr_sum[b] / static_cast<double>(stat.count);
        double sum = 0.0;
        for (double g : gammas)
            sum += g;
        stat.mean_gamma = sum / static_cast<double>(stat.count);
        stat.mode_gamma = mode_of(gammas);
        stat.median_gamma = median_of(gammas);
        fit.bin_stats.push_back(stat);
        ln_c.push_back(std::log(stat.mean_cr));
        agg_mode.push_back(stat.mode_gamma);
        agg_median.push_back(stat.median_gamma);
        agg_mean.push_back(stat.mean_gamma);
    }
    if (fit.bin_stats.size() < 2)
        throw insufficient_data_error("fewer than 2 non-empty bins");

    const OriginFit f_mode = fit_through_origin(ln_c, agg_mode);
    const OriginFit f_median = fit_through_origin(ln_c, agg_median);
    const OriginFit f_mean = fit_through_origin(ln_c, agg_mean);
    fit.r_squared_mode = f_mode.r2;
    fit.r_squared_median = f_median.r2;
    fit.r_squared_mean = f_mean.r2;
    const std::vector<double>* chosen = &agg_mean;
    switch (aggregator) {
    case Aggregator::mode: fit.coefficient = f_mode.slope; chosen = &agg_mode; break;
    case Aggregator::median: fit.coefficient = f_median.slope; chosen = &agg_median; break;
    case Aggregator::mean: fit.coefficient = f_mean.slope; chosen = &agg_mean; break;
    }

    // Diagnostic ordinary least squares with intercept on the chosen points.
    {
        const auto& g = *chosen;
        const double n = static_cast<double>(g.size());
        double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            sx += ln_c[i];
            sy += g[i];
            sxx += ln_c[i] * ln_c[i];
            sxy += ln_c[i] * g[i];
        }
        const double den = n * sxx - sx * sx;
        if (den != 0.0) {
            fit.diagnostic_slope = (n * sxy - sx * sy) / den;
            fit.diagnostic_intercept = sy / n - fit.diagnostic_slope * sx / n;
        }
    }
    return fit;
}

namespace {

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

} // namespace

void write_samples_csv(std::span<const GammaSample> samples,
                       const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw io_error("cannot open " + path.string() + " for writing");
    out << "c_r,gamma\n";
    for (const auto& s : samples)
        out << format_double(s.c_r) << ',' << format_double(s.gamma) << '\n';
    if (!out)
        throw io_error("write failed: " + path.string());
}

std::vector<GammaSample> read_samples_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw io_error("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != "c_r,gamma")
        throw format_error(path.string() + ": expected header 'c_r,gamma'");
    std::vector<GammaSample> samples;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw format_error(path.string() + ":" + std::to_string(line_no) +
                               ": expected 'c_r,gamma'");
        GammaSample s;
        auto parse = [&](const char* first, const char* last, double& out_v) {
            auto [ptr, ec] = std::from_chars(first, last, out_v);
            if (ec != std::errc{} || ptr != last || !std::isfinite(out_v))
                throw format_error(path.string() + ":" + std::to_string(line_no) +
                                   ": bad number");
        };
        parse(line.data(), line.data() + comma, s.c_r);
        parse(line.data() + comma + 1, line.data() + line.size(), s.gamma);
        samples.push_back(s);
    }
    return samples;
}

std::string fit_report(const LsgfFit& fit) {
    std::ostringstream out;
    out << "aggregator = " << aggregator_name(fit.aggregator) << '\n';
    out << "coefficient = " << format_double(fit.coefficient) << '\n';
    out << "r_squared_mode = " << format_double(fit.r_squared_mode) << '\n';
    out << "r_squared_median = " << format_double(fit.r_squared_median) << '\n';
    out << "r_squared_mean = " << format_double(fit.r_squared_mean) << '\n';
    out << "bin_count = " << fit.bin_count << '\n';
    out << "bins_used = " << fit.bin_stats.size() << '\n';
    out << "diagnostic_slope = " << format_double(fit.diagnostic_slope) << '\n';
    out << "diagnostic_intercept = " << format_double(fit.diagnostic_intercept) << '\n';
    out << "# mean_cr\tmode_gamma\tmedian_gamma\tmean_gamma\tcount\n";
    for (const auto& b : fit.bin_stats) {
        out << format_double(b.mean_cr) << '\t' << format_double(b.mode_gamma) << '\t'
            << format_double(b.median_gamma) << '\t' << format_double(b.mean_gamma)
            << '\t' << b.count << '\n';
    }
    return out.str();
}

} // namespace nimbus
