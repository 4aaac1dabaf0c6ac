// nimbus command-line tool: cloud synthesis, paired-dataset construction,
// thin-cloud correction and evaluation over RAS1 rasters.
//
// Exit codes: 0 success, 2 usage, 3 I/O, 4 validation/domain.

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "nimbus/cloud.hpp"
#include "nimbus/config.hpp"
#include "nimbus/correction.hpp"
#include "nimbus/errors.hpp"
#include "nimbus/metrics.hpp"
#include "nimbus/pair_synth.hpp"
#include "nimbus/profiles.hpp"
#include "nimbus/ras1.hpp"
#include "nimbus/rng.hpp"
#include "nimbus/spectral.hpp"

namespace fs = std::filesystem;
using namespace nimbus;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitValidation = 4;

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::vector<fs::path> ras_files_in(const fs::path& dir) {
    if (!fs::is_directory(dir))
        throw io_error(dir.string() + " is not a directory");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".ras")
            files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    return files;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw io_error("cannot open " + path.string() + " for writing");
    out << text;
    if (!out)
        throw io_error("write failed: " + path.string());
}

Config load_config(const std::string& path) {
    if (path.empty())
        return Config{};
    return Config::load(path);
}

SensorProfile resolve_profile(const std::string& name, const Config& cfg) {
    auto p = find_profile(name, cfg.profiles);
    if (!p)
        throw validation_error("unknown sensor profile '" + name + "'");
    p->validate();
    return *p;
}

// ---------------------------------------------------------------- calibrate

struct CalibrateArgs {
    std::string in, out;
    double gain = 0.0, offset = 0.0, sun_elev = 0.0;
};

int cmd_calibrate(const CalibrateArgs& a) {
    const MultiBandImage dn = read_raster(a.in);
    CalibrationParams params{a.gain, a.offset, a.sun_elev};
    std::vector<BandRaster> bands;
    bands.reserve(dn.band_count());
    for (const auto& b : dn.bands())
        bands.push_back(calibrate_to_toa(b, params));
    write_raster(MultiBandImage(std::move(bands)), a.out);
    return 0;
}

// ------------------------------------------------------------------ prepare

struct PrepareArgs {
    std::string in_dir, out_dir, config;
    int patch_size = 512;
    int stride = 128;
    double threshold = 0.015;
    bool no_normalize = false;
    bool flags_set[3] = {false, false, false}; // patch, stride, threshold
};

int cmd_prepare(const PrepareArgs& a) {
    const Config cfg = load_config(a.config);
    PatchSpec spec = cfg.patch;
    if (a.flags_set[0]) spec.patch_size = a.patch_size;
    if (a.flags_set[1]) spec.stride = a.stride;
    if (a.flags_set[2]) spec.cleaning_threshold = static_cast<float>(a.threshold);
    spec.validate();

    fs::create_directories(a.out_dir);
    const auto inputs = ras_files_in(a.in_dir);
    std::string index;
    std::size_t kept = 0;
    for (const auto& file : inputs) {
        const MultiBandImage image = read_raster(file);
        if (image.band_count() != 1)
            throw validation_error(file.string() +
                                   ": prepare expects single-band rasters");
        const BandRaster& band = image.band(0);
        const auto anchors = patch_anchors(band.width(), band.height(), spec);
        const auto patches = extract_patches(band, spec);
        const int nx = band.width() >= spec.patch_size
                           ? (band.width() - spec.patch_size) / spec.stride + 1
                           : 0;
        for (std::size_t k = 0; k < patches.size(); ++k) {
            if (patches[k].max_value() < spec.cleaning_threshold)
                continue;
            const int row = nx > 0 ? static_cast<int>(k) / nx : 0;
            const int col = nx > 0 ? static_cast<int>(k) % nx : 0;
            BandRaster out_patch = a.no_normalize
                                       ? patches[k]
                                       : normalize_for_training(patches[k]);
            const std::string name = file.stem().string() + "_p" +
                                     std::to_string(row) + "_" + std::to_string(col) +
                                     ".ras";
            write_raster(MultiBandImage({std::move(out_patch)}),
                         fs::path(a.out_dir) / name);
            index += name + '\t' + std::to_string(anchors[k].x) + '\t' +
                     std::to_string(anchors[k].y) + '\n';
            ++kept;
        }
    }
    write_text(fs::path(a.out_dir) / "index.txt", index);
    if (inputs.empty())
        std::cerr << "warning: no .ras inputs in " << a.in_dir << '\n';
    std::cout << "patches written: " << kept << '\n';
    return 0;
}

// ----------------------------------------------------------------- fit-lsgf

struct FitArgs {
    std::string samples, out;
    int bins = 250;
    std::string aggregator = "mean";
};

int cmd_fit_lsgf(const FitArgs& a) {
    const auto samples = read_samples_csv(a.samples);
    const Aggregator chosen = aggregator_from_name(a.aggregator);
    const LsgfFit fit = lsgf_fit(samples, a.bins, chosen);
    const LsgfFit fit_mode = lsgf_fit(samples, a.bins, Aggregator::mode);
    const LsgfFit fit_median = lsgf_fit(samples, a.bins, Aggregator::median);
    const LsgfFit fit_mean = lsgf_fit(samples, a.bins, Aggregator::mean);

    std::string report = fit_report(fit);
    report += "coefficient_mode = " + format_double(fit_mode.coefficient) + '\n';
    report += "coefficient_median = " + format_double(fit_median.coefficient) + '\n';
    report += "coefficient_mean = " + format_double(fit_mean.coefficient) + '\n';
    if (!a.out.empty())
        write_text(a.out, report);
    else
        std::cout << report;
    return 0;
}

// -------------------------------------------------------------------- synth

struct SynthArgs {
    std::string profile, out_dir, ground, ingest, config, augment_op = "identity";
    std::uint64_t seed = 0;
    int width = 512, height = 512;
    double thickness = 1.0;
    std::optional<double> cap;
    bool no_parallax = false;
    bool clamp_export = false;
    std::optional<double> coefficient;
    FbmParams fbm_flags;
    bool fbm_set[6] = {false, false, false, false, false, false};
};

MultiBandImage clamp_unit(const MultiBandImage& image) {
    std::vector<BandRaster> bands;
    for (const auto& b : image.bands()) {
        std::vector<float> data(b.values().begin(), b.values().end());
        for (float& v : data)
            v = std::clamp(v, 0.0f, 1.0f);
        bands.emplace_back(b.width(), b.height(), b.wavelength(), std::move(data));
    }
    return MultiBandImage(std::move(bands));
}

int cmd_synth(const SynthArgs& a) {
    const Config cfg = load_config(a.config);
    const SensorProfile profile = resolve_profile(a.profile, cfg);
    GammaModel model = cfg.gamma;
    if (a.coefficient)
        model.coefficient = *a.coefficient;

    FbmParams fbm = cfg.fbm;
    if (a.fbm_set[0]) fbm.octaves = a.fbm_flags.octaves;
    if (a.fbm_set[1]) fbm.persistence = a.fbm_flags.persistence;
    if (a.fbm_set[2]) fbm.lacunarity = a.fbm_flags.lacunarity;
    if (a.fbm_set[3]) fbm.base_frequency = a.fbm_flags.base_frequency;
    if (a.fbm_set[4]) fbm.coverage_threshold = a.fbm_flags.coverage_threshold;
    if (a.fbm_set[5]) fbm.max_radiance = a.fbm_flags.max_radiance;
    fbm.seed = a.seed;

    std::optional<MultiBandImage> ground;
    int width = a.width, height = a.height;
    const AugmentOp op = augment_from_name(a.augment_op);
    if (!a.ground.empty()) {
        ground = augment(read_raster(a.ground), op);
        if (ground->band_count() != profile.bands.size())
            throw validation_error("ground band count does not match profile '" +
                                   profile.name + "'");
        width = ground->width();
        height = ground->height();
    }

    const CloudField field = a.ingest.empty()
                                 ? generate_fbm_cloud(width, height, fbm,
                                                      profile.reference_wavelength)
                                 : ingest_cloud(a.ingest, profile);
    const CloudField adjusted = adjust_thickness(field, a.thickness, a.cap);
    const MultiBandImage bands = extrapolate_all(adjusted, profile, model);
    const ParallaxOffsets offsets =
        a.no_parallax ? ParallaxOffsets{std::vector<BandOffset>(profile.bands.size())}
                      : sample_offsets(profile, sub_seed(a.seed, 2));
    const MultiBandImage cloud = apply_parallax(bands, offsets, profile);

    fs::create_directories(a.out_dir);
    write_raster(cloud, fs::path(a.out_dir) / "cloud.ras");

    DatasetManifest manifest;
    manifest.profile_name = profile.name;
    manifest.coefficient = model.coefficient;
    ManifestEntry entry;
    entry.ground_path = a.ground.empty() ? "-" : a.ground;
    entry.cloud_path = "cloud.ras";
    entry.cloudy_path = ground ? "cloudy.ras" : "-";
    entry.seed = a.seed;
    entry.thickness = a.thickness;
    entry.cap = a.cap;
    entry.offsets = offsets;
    entry.augment_op = op;

    if (ground) {
        MultiBandImage cloudy = composite(*ground, cloud);
        if (a.clamp_export)
            cloudy = clamp_unit(cloudy);
        write_raster(cloudy, fs::path(a.out_dir) / "cloudy.ras");
    }
    manifest.entries.push_back(entry);
    write_manifest(manifest, fs::path(a.out_dir) / "entry.tsv");
    return 0;
}

// ----------------------------------------------------------- build-dataset

struct BuildArgs {
    std::string grounds_dir, profile, out_dir, config;
    int n_pairs = 1;
    std::uint64_t seed = 0;
    double thickness_min = 1.0, thickness_max = 1.0;
    bool thickness_set[2] = {false, false};
    std::optional<double> cap;
    std::optional<double> coefficient;
};

int cmd_build_dataset(const BuildArgs& a) {
    const Config cfg = load_config(a.config);
    const SensorProfile profile = resolve_profile(a.profile, cfg);
    GammaModel model = cfg.gamma;
    if (a.coefficient)
        model.coefficient = *a.coefficient;

    const auto files = ras_files_in(a.grounds_dir);
    if (files.empty()) {
        std::cerr << "error: no ground rasters in " << a.grounds_dir << '\n';
        return kExitUsage;
    }
    std::vector<MultiBandImage> grounds;
    grounds.reserve(files.size());
    for (const auto& f : files)
        grounds.push_back(read_raster(f));

    DatasetParams params;
    params.n_pairs = a.n_pairs;
    params.base_seed = a.seed;
    params.thickness_min = a.thickness_set[0] ? a.thickness_min : cfg.thickness_min;
    params.thickness_max = a.thickness_set[1] ? a.thickness_max : cfg.thickness_max;
    params.cap = a.cap;
    params.output_dir = a.out_dir;

    FbmParams fbm = cfg.fbm;
    const double ref_wl = profile.reference_wavelength;
    const auto provider = [fbm, ref_wl](std::uint64_t seed, int w, int h) {
        FbmParams p = fbm;
        p.seed = seed;
        return generate_fbm_cloud(w, h, p, ref_wl);
    };
    const DatasetManifest manifest = build_dataset(grounds, profile, model, params, provider);
    std::cout << "pairs written: " << manifest.entries.size() << '\n';
    return 0;
}

// ------------------------------------------------------------------ correct

struct CorrectArgs {
    std::string cloudy, cirrus, profile, out, report, reference, config;
    std::optional<double> coefficient;
};

int cmd_correct(const CorrectArgs& a) {
    const Config cfg = load_config(a.config);
    const SensorProfile profile = resolve_profile(a.profile, cfg);
    GammaModel model = cfg.gamma;
    if (a.coefficient)
        model.coefficient = *a.coefficient;

    const MultiBandImage cloudy = read_raster(a.cloudy);
    const CloudField cirrus = ingest_cloud(a.cirrus, profile);
    const CorrectionResult result = correct_thin_clouds(cloudy, cirrus, profile, model);
    write_raster(result.corrected, a.out);

    std::string text = result.report.to_text();
    if (!a.reference.empty()) {
        const MultiBandImage reference = read_raster(a.reference);
        text += "rmse_vs_reference = " + format_double(rmse(reference, result.corrected)) +
                '\n';
    }
    if (!a.report.empty())
        write_text(a.report, text);
    std::cout << text;
    return 0;
}

// ----------------------------------------------------------------- evaluate

struct EvaluateArgs {
    std::string ref, test, csv, out, config;
    bool overlap = false;
    int bins = 256;
    double peak = 1.0;
    bool bins_set = false, peak_set = false;
};

int cmd_evaluate(const EvaluateArgs& a) {
    const Config cfg = load_config(a.config);
    const int bins = a.bins_set ? a.bins : cfg.overlap_bins;
    const double peak = a.peak_set ? a.peak : cfg.metric_peak;

    std::vector<std::pair<fs::path, fs::path>> pairs;
    if (fs::is_directory(a.ref) || fs::is_directory(a.test)) {
        if (!fs::is_directory(a.ref) || !fs::is_directory(a.test))
            throw validation_error("evaluate needs two files or two directories");
        for (const auto& rf : ras_files_in(a.ref)) {
            const fs::path tf = fs::path(a.test) / rf.filename();
            if (!fs::exists(tf))
                throw io_error("missing counterpart " + tf.string());
            pairs.emplace_back(rf, tf);
        }
        if (pairs.empty())
            throw validation_error("no .ras files to evaluate in " + a.ref);
    } else {
        pairs.emplace_back(a.ref, a.test);
    }

    std::string csv = "name," + MetricReport::csv_header() +
                      (a.overlap ? ",overlap" : "") + '\n';
    std::string text;
    std::vector<BandRaster> ref_bands, test_bands;
    double mean_rmse = 0.0;
    for (const auto& [rf, tf] : pairs) {
        const MultiBandImage ref_img = read_raster(rf);
        const MultiBandImage test_img = read_raster(tf);
        const MetricReport report = evaluate_pair(ref_img, test_img, peak);
        mean_rmse += report.rmse;
        csv += rf.filename().string() + ',' + report.to_csv_row();
        if (pairs.size() == 1)
            text += report.to_text();
        if (a.overlap) {
            for (const auto& b : ref_img.bands())
                ref_bands.push_back(b);
            for (const auto& b : test_img.bands())
                test_bands.push_back(b);
            if (pairs.size() == 1) {
                const auto ov = histogram_overlap(ref_bands, test_bands, bins);
                text += "overlap = " + format_double(ov.rate) + '\n';
                csv += ',' + format_double(ov.rate);
            } else {
                csv += ",-";
            }
        }
        csv += '\n';
    }
    if (pairs.size() > 1) {
        text += "pairs = " + std::to_string(pairs.size()) + '\n';
        text += "mean_rmse = " +
                format_double(mean_rmse / static_cast<double>(pairs.size())) + '\n';
        if (a.overlap) {
            const auto ov = histogram_overlap(ref_bands, test_bands, bins);
            text += "overlap = " + format_double(ov.rate) + '\n';
        }
    }
    if (!a.csv.empty())
        write_text(a.csv, csv);
    if (!a.out.empty())
        write_text(a.out, text);
    std::cout << text;
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"nimbus: physically consistent multi-spectral cloud synthesis, "
                 "paired-dataset construction, thin-cloud correction and evaluation"};
    app.require_subcommand(1);

    CalibrateArgs cal;
    auto* c_cal = app.add_subcommand("calibrate", "DN to TOA affine rescaling");
    c_cal->add_option("--in", cal.in, "input DN raster (RAS1)")->required();
    c_cal->add_option("--out", cal.out, "output TOA raster")->required();
    c_cal->add_option("--gain", cal.gain, "multiplicative rescale factor")->required();
    c_cal->add_option("--offset", cal.offset, "additive rescale term");
    c_cal->add_option("--sun-elev", cal.sun_elev, "sun elevation in degrees (0, 90]")
        ->required();

    PrepareArgs prep;
    auto* c_prep = app.add_subcommand("prepare", "patch extraction, cleaning, "
                                                 "optional normalization");
    c_prep->add_option("--in-dir", prep.in_dir, "directory of single-band rasters")
        ->required();
    c_prep->add_option("--out-dir", prep.out_dir, "patch output directory")->required();
    auto* o_ps = c_prep->add_option("--patch-size", prep.patch_size, "patch edge (512)");
    auto* o_st = c_prep->add_option("--stride", prep.stride, "anchor stride (128)");
    auto* o_th = c_prep->add_option("--threshold", prep.threshold,
                                    "cleaning threshold (0.015)");
    c_prep->add_flag("--no-normalize", prep.no_normalize, "keep raw radiance");
    c_prep->add_option("--config", prep.config, "config file");

    FitArgs fit;
    auto* c_fit = app.add_subcommand("fit-lsgf", "binned local statistics + global fit");
    c_fit->add_option("--samples", fit.samples, "2-column c_r,gamma CSV")->required();
    c_fit->add_option("--out", fit.out, "report path (default stdout)");
    c_fit->add_option("--bins", fit.bins, "number of equal-width subsets (250)");
    c_fit->add_option("--aggregator", fit.aggregator, "mode|median|mean (mean)");

    SynthArgs synth;
    auto* c_synth = app.add_subcommand("synth", "cloud synthesis for one scene");
    c_synth->add_option("--profile", synth.profile, "sensor profile name")->required();
    c_synth->add_option("--seed", synth.seed, "generation seed")->required();
    c_synth->add_option("--out-dir", synth.out_dir, "output directory")->required();
    c_synth->add_option("--ground", synth.ground, "clear ground raster to composite");
    c_synth->add_option("--ingest", synth.ingest, "external single-band cloud field");
    c_synth->add_option("--width", synth.width, "generated field width (512)");
    c_synth->add_option("--height", synth.height, "generated field height (512)");
    c_synth->add_option("--thickness", synth.thickness, "linear thickness scale (1)");
    double synth_cap = 0.0;
    auto* o_cap = c_synth->add_option("--cap", synth_cap, "thickness cap radiance");
    c_synth->add_option("--augment", synth.augment_op,
                        "identity|rot90|rot180|rot270|hflip|vflip|hflip_rot90|vflip_rot90");
    c_synth->add_flag("--no-parallax", synth.no_parallax, "force zero channel offsets");
    c_synth->add_flag("--clamp", synth.clamp_export, "clamp cloudy output to [0,1]");
    double synth_coeff = 0.0;
    auto* o_coeff = c_synth->add_option("--coefficient", synth_coeff,
                                        "gamma model coefficient (-0.14)");
    auto* o_oct = c_synth->add_option("--octaves", synth.fbm_flags.octaves, "fbm octaves");
    auto* o_per = c_synth->add_option("--persistence", synth.fbm_flags.persistence,
                                      "fbm persistence");
    auto* o_lac = c_synth->add_option("--lacunarity", synth.fbm_flags.lacunarity,
                                      "fbm lacunarity");
    auto* o_fr = c_synth->add_option("--base-freq", synth.fbm_flags.base_frequency,
                                     "fbm base frequency");
    auto* o_cov = c_synth->add_option("--coverage", synth.fbm_flags.coverage_threshold,
                                      "fbm coverage threshold");
    auto* o_mr = c_synth->add_option("--max-radiance", synth.fbm_flags.max_radiance,
                                     "fbm peak radiance");
    c_synth->add_option("--config", synth.config, "config file");

    BuildArgs build;
    auto* c_build = app.add_subcommand("build-dataset",
                                       "paired cloudy & cloud-free dataset");
    c_build->add_option("--grounds", build.grounds_dir, "directory of ground rasters")
        ->required();
    c_build->add_option("--profile", build.profile, "sensor profile name")->required();
    c_build->add_option("--n", build.n_pairs, "number of pairs")->required();
    c_build->add_option("--seed", build.seed, "base seed")->required();
    c_build->add_option("--out-dir", build.out_dir, "dataset directory")->required();
    auto* o_tmin = c_build->add_option("--thickness-min", build.thickness_min,
                                       "lower thickness scale (1)");
    auto* o_tmax = c_build->add_option("--thickness-max", build.thickness_max,
                                       "upper thickness scale (1)");
    double build_cap = 0.0;
    auto* o_bcap = c_build->add_option("--cap", build_cap, "thickness cap radiance");
    double build_coeff = 0.0;
    auto* o_bcoeff = c_build->add_option("--coefficient", build_coeff,
                                         "gamma model coefficient (-0.14)");
    c_build->add_option("--config", build.config, "config file");

    CorrectArgs corr;
    auto* c_corr = app.add_subcommand("correct", "model-driven thin-cloud correction");
    c_corr->add_option("--cloudy", corr.cloudy, "cloudy multi-band raster")->required();
    c_corr->add_option("--cirrus", corr.cirrus, "co-registered cirrus band")->required();
    c_corr->add_option("--profile", corr.profile, "sensor profile name")->required();
    c_corr->add_option("--out", corr.out, "corrected raster path")->required();
    c_corr->add_option("--report", corr.report, "report path (also printed)");
    c_corr->add_option("--reference", corr.reference, "clear reference for an RMSE line");
    double corr_coeff = 0.0;
    auto* o_ccoeff = c_corr->add_option("--coefficient", corr_coeff,
                                        "gamma model coefficient (-0.14)");
    c_corr->add_option("--config", corr.config, "config file");

    EvaluateArgs eval;
    auto* c_eval = app.add_subcommand("evaluate", "five-metric comparison");
    c_eval->add_option("--ref", eval.ref, "reference raster or directory")->required();
    c_eval->add_option("--test", eval.test, "test raster or directory")->required();
    c_eval->add_flag("--overlap", eval.overlap, "add the histogram-overlap rate");
    auto* o_bins = c_eval->add_option("--bins", eval.bins, "overlap bins (256)");
    auto* o_peak = c_eval->add_option("--peak", eval.peak, "PSNR/SSIM peak (1.0)");
    c_eval->add_option("--csv", eval.csv, "CSV output path");
    c_eval->add_option("--out", eval.out, "report path (also printed)");
    c_eval->add_option("--config", eval.config, "config file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    prep.flags_set[0] = o_ps->count() > 0;
    prep.flags_set[1] = o_st->count() > 0;
    prep.flags_set[2] = o_th->count() > 0;
    if (o_cap->count()) synth.cap = synth_cap;
    if (o_coeff->count()) synth.coefficient = synth_coeff;
    synth.fbm_set[0] = o_oct->count() > 0;
    synth.fbm_set[1] = o_per->count() > 0;
    synth.fbm_set[2] = o_lac->count() > 0;
    synth.fbm_set[3] = o_fr->count() > 0;
    synth.fbm_set[4] = o_cov->count() > 0;
    synth.fbm_set[5] = o_mr->count() > 0;
    build.thickness_set[0] = o_tmin->count() > 0;
    build.thickness_set[1] = o_tmax->count() > 0;
    if (o_bcap->count()) build.cap = build_cap;
    if (o_bcoeff->count()) build.coefficient = build_coeff;
    if (o_ccoeff->count()) corr.coefficient = corr_coeff;
    eval.bins_set = o_bins->count() > 0;
    eval.peak_set = o_peak->count() > 0;

    try {
        if (c_cal->parsed()) return cmd_calibrate(cal);
        if (c_prep->parsed()) return cmd_prepare(prep);
        if (c_fit->parsed()) return cmd_fit_lsgf(fit);
        if (c_synth->parsed()) return cmd_synth(synth);
        if (c_build->parsed()) return cmd_build_dataset(build);
        if (c_corr->parsed()) return cmd_correct(corr);
        if (c_eval->parsed()) return cmd_evaluate(eval);
    } catch (const io_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
