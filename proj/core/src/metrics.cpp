#include "nimbus/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace nimbus {

namespace {

void require_same_shape(const MultiBandImage& a, const MultiBandImage& b) {
    if (a.band_count() != b.band_count())
        throw shape_error("band counts differ");
    if (a.width() != b.width() || a.height() != b.height())
        throw shape_error("dimensions differ");
    if (a.empty())
        throw shape_error("empty images");
}

double mse(const MultiBandImage& a, const MultiBandImage& b) {
    require_same_shape(a, b);
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t band = 0; band < a.band_count(); ++band) {
        auto va = a.band(band).values();
        auto vb = b.band(band).values();
        for (std::size_t i = 0; i < va.size(); ++i) {
            const double d = static_cast<double>(va[i]) - vb[i];
            sum += d * d;
        }
        n += va.size();
    }
    return sum / static_cast<double>(n);
}

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

} // namespace

double rmse(const MultiBandImage& a, const MultiBandImage& b) {
    return std::sqrt(mse(a, b));
}

double psnr(const MultiBandImage& a, const MultiBandImage& b, double peak) {
    if (!(peak > 0.0))
        throw parameter_error("peak must be > 0");
    const double m = mse(a, b);
    if (m == 0.0)
        return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(peak * peak / m);
}

namespace {

std::vector<double> gaussian_kernel(int window, double sigma) {
    std::vector<double> k(window);
    const double c = (window - 1) / 2.0;
    double sum = 0.0;
    for (int i = 0; i < window; ++i) {
        k[i] = std::exp(-(i - c) * (i - c) / (2.0 * sigma * sigma));
        sum += k[i];
    }
    for (double& v : k)
        v /= sum;
    return k;
}

// Separable Gaussian filter, valid region only: output is
// (w - window + 1) x (h - window + 1).
std::vector<double> filter_valid(const std::vector<double>& img, int w, int h,
                                 const std::vector<double>& kernel) {
    const int win = static_cast<int>(kernel.size());
    const int ow = w - win + 1;
    const int oh = h - win + 1;
    std::vector<double> horiz(static_cast<std::size_t>(ow) * h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (int k = 0; k < win; ++k)
                acc += kernel[k] * img[static_cast<std::size_t>(y) * w + x + k];
            horiz[static_cast<std::size_t>(y) * ow + x] = acc;
        }
    }
    std::vector<double> out(static_cast<std::size_t>(ow) * oh);
    for (int y = 0; y < oh; ++y) {
        for (int x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (int k = 0; k < win; ++k)
                acc += kernel[k] * horiz[static_cast<std::size_t>(y + k) * ow + x];
            out[static_cast<std::size_t>(y) * ow + x] = acc;
        }
    }
    return out;
}

} // namespace

double ssim(const MultiBandImage& a, const MultiBandImage& b, const SsimParams& params) {
    require_same_shape(a, b);
    if (params.window < 3 || params.window % 2 == 0)
        throw parameter_error("SSIM window must be odd and >= 3");
    if (a.width() < params.window || a.height() < params.window)
        throw parameter_error("image smaller than the SSIM window");
    if (!(params.sigma > 0.0) || !(params.peak > 0.0))
        throw parameter_error("SSIM sigma and peak must be > 0");

    const double c1 = (params.k1 * params.peak) * (params.k1 * params.peak);
    const double c2 = (params.k2 * params.peak) * (params.k2 * params.peak);
    const auto kernel = gaussian_kernel(params.window, params.sigma);
    const int w = a.width();
    const int h = a.height();

    double band_sum = 0.0;
    for (std::size_t band = 0; band < a.band_count(); ++band) {
        auto va = a.band(band).values();
        auto vb = b.band(band).values();
        std::vector<double> x(va.begin(), va.end());
        std::vector<double> y(vb.begin(), vb.end());
        std::vector<double> xx(x.size()), yy(x.size()), xy(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            xx[i] = x[i] * x[i];
            yy[i] = y[i] * y[i];
            xy[i] = x[i] * y[i];
        }
        const auto mu_x = filter_valid(x, w, h, kernel);
        const auto mu_y = filter_valid(y, w, h, kernel);
        const auto e_xx = filter_valid(xx, w, h, kernel);
        const auto e_yy = filter_valid(yy, w, h, kernel);
        const auto e_xy = filter_valid(xy, w, h, kernel);
        double acc = 0.0;
        for (std::size_t i = 0; i < mu_x.size(); ++i) {
            const double var_x = e_xx[i] - mu_x[i] * mu_x[i];
            const double var_y = e_yy[i] - mu_y[i] * mu_y[i];
            const double cov = e_xy[i] - mu_x[i] * mu_y[i];
            acc += ((2.0 * mu_x[i] * mu_y[i] + c1) * (2.0 * cov + c2)) /
                   ((mu_x[i] * mu_x[i] + mu_y[i] * mu_y[i] + c1) * (var_x + var_y + c2));
        }
        band_sum += acc / static_cast<double>(mu_x.size());
    }
    return band_sum / static_cast<double>(a.band_count());
}

namespace {

struct PearsonParts {
    double cov = 0.0;
    double var_a = 0.0;
    double var_b = 0.0;
};

PearsonParts pearson_parts(std::span<const float> a, std::span<const float> b,
                           double mean_a, double mean_b) {
    PearsonParts p;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - mean_a;
        const double db = b[i] - mean_b;
        p.cov += da * db;
        p.var_a += da * da;
        p.var_b += db * db;
    }
    return p;
}

} // namespace

double cc(const MultiBandImage& a, const MultiBandImage& b) {
    require_same_shape(a, b);
    double sum_a = 0.0, sum_b = 0.0;
    std::size_t n = 0;
    for (std::size_t band = 0; band < a.band_count(); ++band) {
        for (float v : a.band(band).values())
            sum_a += v;
        for (float v : b.band(band).values())
            sum_b += v;
        n += a.band(band).pixel_count();
    }
    const double mean_a = sum_a / static_cast<double>(n);
    const double mean_b = sum_b / static_cast<double>(n);
    PearsonParts total;
    for (std::size_t band = 0; band < a.band_count(); ++band) {
        const auto p =
            pearson_parts(a.band(band).values(), b.band(band).values(), mean_a, mean_b);
        total.cov += p.cov;
        total.var_a += p.var_a;
        total.var_b += p.var_b;
    }
    if (total.var_a == 0.0 || total.var_b == 0.0)
        throw domain_error("correlation undefined for constant input");
    // rounding can push the ratio a few ulp past the mathematical range
    return std::clamp(total.cov / std::sqrt(total.var_a * total.var_b), -1.0, 1.0);
}

double cc_per_band_mean(const MultiBandImage& a, const MultiBandImage& b) {
    require_same_shape(a, b);
    double sum = 0.0;
    for (std::size_t band = 0; band < a.band_count(); ++band) {
        sum += cc(MultiBandImage({a.band(band)}), MultiBandImage({b.band(band)}));
    }
    return sum / static_cast<double>(a.band_count());
}

double sam(const MultiBandImage& a, const MultiBandImage& b, std::size_t* skipped_pixels) {
    require_same_shape(a, b);
    if (a.band_count() < 2)
        throw parameter_error("SAM needs at least 2 bands");
    const std::size_t pixels = a.band(0).pixel_count();
    double sum = 0.0;
    std::size_t used = 0, skipped = 0;
    for (std::size_t p = 0; p < pixels; ++p) {
        double dot = 0.0, na = 0.0, nb = 0.0;
        for (std::size_t band = 0; band < a.band_count(); ++band) {
            const double u = a.band(band).values()[p];
            const double v = b.band(band).values()[p];
            dot += u * v;
            na += u * u;
            nb += v * v;
        }
        if (na == 0.0 || nb == 0.0) {
            ++skipped;
            continue;
        }
        const double cosine = std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0);
        sum += std::acos(cosine);
        ++used;
    }
    if (skipped_pixels)
        *skipped_pixels = skipped;
    if (used == 0)
        return 0.0;
    return sum / static_cast<double>(used) * 180.0 / std::numbers::pi;
}

HistogramOverlap histogram_overlap(std::span<const BandRaster> real,
                                   std::span<const BandRaster> gen,
                                   int bin_count) {
    if (real.empty() || gen.empty())
        throw parameter_error("histogram overlap needs non-empty sample sets");
    if (bin_count < 1)
        throw parameter_error("bin_count must be >= 1");

    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    auto widen = [&](std::span<const BandRaster> rasters) {
        for (const auto& r : rasters) {
            lo = std::min(lo, static_cast<double>(r.min_value()));
            hi = std::max(hi, static_cast<double>(r.max_value()));
        }
    };
    widen(real);
    widen(gen);

    std::vector<std::uint64_t> h_real(bin_count, 0), h_gen(bin_count, 0);
    auto accumulate = [&](std::span<const BandRaster> rasters,
                          std::vector<std::uint64_t>& hist) {
        for (const auto& r : rasters) {
            for (float v : r.values()) {
                int idx = 0;
                if (hi > lo)
                    idx = std::min(bin_count - 1,
                                   static_cast<int>((v - lo) / (hi - lo) * bin_count));
                ++hist[idx];
            }
        }
    };
    accumulate(real, h_real);
    accumulate(gen, h_gen);

    std::uint64_t overlap = 0, total_real = 0;
    for (int k = 0; k < bin_count; ++k) {
        overlap += std::min(h_real[k], h_gen[k]);
        total_real += h_real[k];
    }
    HistogramOverlap result;
    result.rate = static_cast<double>(overlap) / static_cast<double>(total_real);
    result.bin_count = bin_count;
    result.lo = lo;
    result.hi = hi;
    return result;
}

std::string MetricReport::to_text() const {
    std::ostringstream out;
    out << "rmse = " << format_double(rmse) << '\n';
    out << "psnr = " << (psnr_infinite ? "inf" : format_double(psnr)) << '\n';
    out << "ssim = " << format_double(ssim) << '\n';
    out << "cc = " << format_double(cc) << '\n';
    out << "sam = " << (sam_defined ? format_double(sam) : "-") << '\n';
    return out.str();
}

std::string MetricReport::csv_header() {
    return "rmse,psnr,ssim,cc,sam";
}

std::string MetricReport::to_csv_row() const {
    std::ostringstream out;
    out << format_double(rmse) << ',' << (psnr_infinite ? "inf" : format_double(psnr))
        << ',' << format_double(ssim) << ',' << format_double(cc) << ','
        << (sam_defined ? format_double(sam) : "-");
    return out.str();
}

MetricReport evaluate_pair(const MultiBandImage& reference, const MultiBandImage& test,
                           double peak) {
    MetricReport report;
    report.rmse = rmse(reference, test);
    report.psnr = psnr(reference, test, peak);
    report.psnr_infinite = std::isinf(report.psnr);
    report.ssim = ssim(reference, test, SsimParams{.peak = peak});
    report.cc = cc(reference, test);
    if (reference.band_count() >= 2) {
        report.sam = sam(reference, test);
        report.sam_defined = true;
    } else {
        report.sam = 0.0;
        report.sam_defined = false;
    }
    return report;
}

} // namespace nimbus
