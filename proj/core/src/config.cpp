#include "nimbus/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace nimbus {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos)
        return "";
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_number(const std::string& value, const std::string& where) {
    double v = 0.0;
    const std::string t = trim(value);
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size())
        throw format_error(where + ": bad number '" + value + "'");
    return v;
}

int parse_int(const std::string& value, const std::string& where) {
    const double v = parse_number(value, where);
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v)
        throw format_error(where + ": expected an integer, got '" + value + "'");
    return i;
}

std::vector<SensorBand> parse_bands(const std::string& value, const std::string& where) {
    std::vector<SensorBand> bands;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        const auto colon = item.find(':');
        if (colon == std::string::npos)
            throw format_error(where + ": band entries look like name:wavelength");
        bands.push_back({trim(item.substr(0, colon)),
                         parse_number(item.substr(colon + 1), where)});
    }
    return bands;
}

} // namespace

Config Config::parse(const std::string& text, const std::string& origin) {
    Config cfg;
    std::istringstream in(text);
    std::string line;
    std::string section;
    SensorProfile* profile = nullptr;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string where = origin + ":" + std::to_string(line_no);
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';')
            continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw format_error(where + ": unterminated section header");
            section = trim(t.substr(1, t.size() - 2));
            profile = nullptr;
            if (section.starts_with("profile ")) {
                SensorProfile p;
                p.name = trim(section.substr(8));
                if (p.name.empty())
                    throw format_error(where + ": profile section needs a name");
                cfg.profiles.push_back(p);
                profile = &cfg.profiles.back();
            }
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw format_error(where + ": expected 'key = value'");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));

        if (profile) {
            if (key == "bands")
                profile->bands = parse_bands(value, where);
            else if (key == "reference_wavelength")
                profile->reference_wavelength = parse_number(value, where);
            else if (key == "max_parallax_offset")
                profile->max_parallax_offset = parse_int(value, where);
            else
                throw format_error(where + ": unknown profile key '" + key + "'");
        } else if (section == "gamma") {
            if (key == "coefficient")
                cfg.gamma.coefficient = parse_number(value, where);
            else if (key == "gamma_min")
                cfg.gamma.gamma_min = parse_number(value, where);
            else if (key == "gamma_max")
                cfg.gamma.gamma_max = parse_number(value, where);
            else
                throw format_error(where + ": unknown gamma key '" + key + "'");
        } else if (section == "fbm") {
            if (key == "octaves")
                cfg.fbm.octaves = parse_int(value, where);
            else if (key == "persistence")
                cfg.fbm.persistence = parse_number(value, where);
            else if (key == "lacunarity")
                cfg.fbm.lacunarity = parse_number(value, where);
            else if (key == "base_frequency")
                cfg.fbm.base_frequency = parse_number(value, where);
            else if (key == "coverage_threshold")
                cfg.fbm.coverage_threshold = parse_number(value, where);
            else if (key == "max_radiance")
                cfg.fbm.max_radiance = parse_number(value, where);
            else
                throw format_error(where + ": unknown fbm key '" + key + "'");
        } else if (section == "patch") {
            if (key == "patch_size")
                cfg.patch.patch_size = parse_int(value, where);
            else if (key == "stride")
                cfg.patch.stride = parse_int(value, where);
            else if (key == "cleaning_threshold")
                cfg.patch.cleaning_threshold = static_cast<float>(parse_number(value, where));
            else
                throw format_error(where + ": unknown patch key '" + key + "'");
        } else if (section == "dataset") {
            if (key == "thickness_min")
                cfg.thickness_min = parse_number(value, where);
            else if (key == "thickness_max")
                cfg.thickness_max = parse_number(value, where);
            else
                throw format_error(where + ": unknown dataset key '" + key + "'");
        } else if (section == "metrics") {
            if (key == "peak")
                cfg.metric_peak = parse_number(value, where);
            else if (key == "overlap_bins")
                cfg.overlap_bins = parse_int(value, where);
            else
                throw format_error(where + ": unknown metrics key '" + key + "'");
        } else {
            throw format_error(where + ": key outside a known section");
        }
    }
    for (const auto& p : cfg.profiles)
        p.validate();
    return cfg;
}

Config Config::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw io_error("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path.string());
}

} // namespace nimbus
