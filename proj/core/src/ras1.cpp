#include "nimbus/ras1.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace nimbus {

namespace {

// One LF-terminated ASCII header line; the LF is consumed and dropped.
std::string read_header_line(std::istream& in, const std::string& origin) {
    std::string line;
    char ch;
    while (in.get(ch)) {
        if (ch == '\n')
            return line;
        line.push_back(ch);
        if (line.size() > 4096)
            throw format_error(origin + ": header line too long");
    }
    throw format_error(origin + ": unterminated header line");
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t pos = 0;
    while (pos <= line.size()) {
        std::size_t next = line.find(' ', pos);
        if (next == std::string::npos)
            next = line.size();
        fields.push_back(line.substr(pos, next - pos));
        pos = next + 1;
    }
    return fields;
}

int parse_dim(const std::string& s, const std::string& origin, const char* what) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || v < 1)
        throw format_error(origin + ": bad " + what + " '" + s + "'");
    return v;
}

double parse_wavelength(const std::string& s, const std::string& origin) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !(v > 0.0) || !std::isfinite(v))
        throw format_error(origin + ": bad wavelength '" + s + "'");
    return v;
}

// Shortest decimal that round-trips the double.
std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

float decode_f32le(const unsigned char* p) {
    std::uint32_t u = static_cast<std::uint32_t>(p[0]) |
                      static_cast<std::uint32_t>(p[1]) << 8 |
                      static_cast<std::uint32_t>(p[2]) << 16 |
                      static_cast<std::uint32_t>(p[3]) << 24;
    return std::bit_cast<float>(u);
}

void encode_f32le(float v, unsigned char* p) {
    std::uint32_t u = std::bit_cast<std::uint32_t>(v);
    p[0] = static_cast<unsigned char>(u & 0xFF);
    p[1] = static_cast<unsigned char>((u >> 8) & 0xFF);
    p[2] = static_cast<unsigned char>((u >> 16) & 0xFF);
    p[3] = static_cast<unsigned char>((u >> 24) & 0xFF);
}

} // namespace

MultiBandImage read_raster(std::istream& in, const std::string& origin) {
    const std::string line1 = read_header_line(in, origin);
    auto fields = split_fields(line1);
    if (fields.size() != 4 || fields[0] != "RAS1")
        throw format_error(origin + ": not a RAS1 header");
    const int width = parse_dim(fields[1], origin, "width");
    const int height = parse_dim(fields[2], origin, "height");
    const int band_count = parse_dim(fields[3], origin, "band count");

    const std::string line2 = read_header_line(in, origin);
    auto wl_fields = split_fields(line2);
    if (wl_fields.size() != static_cast<std::size_t>(band_count))
        throw format_error(origin + ": wavelength count does not match band count");
    std::vector<std::optional<double>> wavelengths;
    wavelengths.reserve(band_count);
    for (const auto& f : wl_fields) {
        if (f == "-")
            wavelengths.push_back(std::nullopt);
        else
            wavelengths.push_back(parse_wavelength(f, origin));
    }

    const std::size_t per_band = static_cast<std::size_t>(width) * height;
    std::vector<unsigned char> raw(per_band * 4);
    std::vector<BandRaster> bands;
    bands.reserve(band_count);
    for (int b = 0; b < band_count; ++b) {
        in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
        if (static_cast<std::size_t>(in.gcount()) != raw.size())
            throw truncation_error(origin + ": payload shorter than header declares");
        std::vector<float> data(per_band);
        for (std::size_t i = 0; i < per_band; ++i) {
            data[i] = decode_f32le(raw.data() + i * 4);
            if (!std::isfinite(data[i]))
                throw validation_error(origin + ": payload contains NaN or Inf");
        }
        bands.emplace_back(width, height, wavelengths[b], std::move(data));
    }
    return MultiBandImage(std::move(bands));
}

void write_raster(const MultiBandImage& image, std::ostream& out) {
    if (image.empty())
        throw validation_error("cannot write an image with no bands");
    out << "RAS1 " << image.width() << ' ' << image.height() << ' '
        << image.band_count() << '\n';
    for (std::size_t b = 0; b < image.band_count(); ++b) {
        if (b)
            out << ' ';
        const auto wl = image.band(b).wavelength();
        out << (wl ? format_double(*wl) : "-");
    }
    out << '\n';
    std::vector<unsigned char> raw;
    for (const auto& band : image.bands()) {
        raw.resize(band.pixel_count() * 4);
        auto values = band.values();
        for (std::size_t i = 0; i < values.size(); ++i)
            encode_f32le(values[i], raw.data() + i * 4);
        out.write(reinterpret_cast<const char*>(raw.data()),
                  static_cast<std::streamsize>(raw.size()));
    }
    if (!out)
        throw io_error("raster write failed");
}

MultiBandImage read_raster(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw io_error("cannot open " + path.string());
    return read_raster(in, path.string());
}

void write_raster(const MultiBandImage& image, const std::filesystem::path& path) {
    std::ostringstream buf(std::ios::binary);
    write_raster(image, buf);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw io_error("cannot open " + path.string() + " for writing");
    const std::string bytes = buf.str();
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw io_error("write failed: " + path.string());
}

} // namespace nimbus
