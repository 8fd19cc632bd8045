#include "swarmheat/pgm.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace swarmheat {

namespace {

[[noreturn]] void malformed(const std::string& what) {
    throw std::runtime_error("malformed PGM: " + what);
}

void skip_space_and_comments(std::istream& in) {
    while (true) {
        const int c = in.peek();
        if (c == '#') {
            std::string line;
            std::getline(in, line);
        } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f') {
            in.get();
        } else {
            return;
        }
    }
}

unsigned long read_header_int(std::istream& in, const char* field) {
    skip_space_and_comments(in);
    std::string digits;
    while (std::isdigit(in.peek())) digits.push_back(static_cast<char>(in.get()));
    if (digits.empty() || digits.size() > 9) malformed(std::string("bad ") + field);
    return std::stoul(digits);
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& s, const std::string& key) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw std::runtime_error("snapshot sidecar: bad value for '" + key + "'");
    return v;
}

}  // namespace

GrayImage read_pgm(std::istream& in) {
    char magic[2] = {0, 0};
    if (!in.read(magic, 2) || magic[0] != 'P' || (magic[1] != '2' && magic[1] != '5'))
        malformed("expected P2 or P5 magic number");
    const bool binary = magic[1] == '5';

    GrayImage img;
    img.width = read_header_int(in, "width");
    img.height = read_header_int(in, "height");
    const unsigned long maxval = read_header_int(in, "maxval");
    if (img.width == 0 || img.height == 0) malformed("zero image size");
    if (maxval == 0 || maxval > 65535) malformed("maxval must be in 1..65535");
    img.maxval = static_cast<std::uint32_t>(maxval);
    const std::size_t count = img.width * img.height;
    img.pixels.resize(count);

    if (binary) {
        const int sep = in.get();
        if (!(sep == ' ' || sep == '\t' || sep == '\n' || sep == '\r'))
            malformed("missing whitespace after maxval");
        const std::size_t bytes_per = maxval > 255 ? 2 : 1;
        std::vector<unsigned char> raw(count * bytes_per);
        if (!in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size())))
            malformed("truncated raster");
        for (std::size_t k = 0; k < count; ++k) {
            const unsigned v = bytes_per == 2 ? (unsigned(raw[2 * k]) << 8) | raw[2 * k + 1] : raw[k];
            if (v > maxval) malformed("sample exceeds maxval");
            img.pixels[k] = static_cast<std::uint16_t>(v);
        }
    } else {
        for (std::size_t k = 0; k < count; ++k) {
            skip_space_and_comments(in);
            if (!std::isdigit(in.peek())) malformed("truncated raster");
            const unsigned long v = read_header_int(in, "sample");
            if (v > maxval) malformed("sample exceeds maxval");
            img.pixels[k] = static_cast<std::uint16_t>(v);
        }
    }
    return img;
}

GrayImage read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open image '" + path.string() + "'");
    try {
        return read_pgm(in);
    } catch (const std::runtime_error& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
}

void write_pgm_p5(std::ostream& out, const GrayImage& img) {
    out << "P5\n" << img.width << ' ' << img.height << '\n' << img.maxval << '\n';
    const bool wide = img.maxval > 255;
    std::vector<char> raw;
    raw.reserve(img.pixels.size() * (wide ? 2 : 1));
    for (std::uint16_t v : img.pixels) {
        if (wide) raw.push_back(static_cast<char>(v >> 8));
        raw.push_back(static_cast<char>(v & 0xff));
    }
    out.write(raw.data(), static_cast<std::streamsize>(raw.size()));
}

void write_pgm_p2(std::ostream& out, const GrayImage& img) {
    out << "P2\n" << img.width << ' ' << img.height << '\n' << img.maxval << '\n';
    for (std::size_t r = 0; r < img.height; ++r) {
        for (std::size_t c = 0; c < img.width; ++c) out << (c ? " " : "") << img.at(c, r);
        out << '\n';
    }
}

void write_pgm(const std::filesystem::path& path, const GrayImage& img, bool binary) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write image '" + path.string() + "'");
    binary ? write_pgm_p5(out, img) : write_pgm_p2(out, img);
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

std::filesystem::path sidecar_path(const std::filesystem::path& pgm_path) {
    return std::filesystem::path(pgm_path.string() + ".txt");
}

void write_snapshot(const std::filesystem::path& path, const ScalarField& field) {
    const auto s = field.samples();
    const auto [lo, hi] = std::minmax_element(s.begin(), s.end());
    SnapshotMapping map{*lo, *hi, 65535};

    GrayImage img;
    img.width = field.nx();
    img.height = field.ny();
    img.maxval = map.maxval;
    img.pixels.resize(s.size());
    const double range = map.max - map.min;
    for (std::size_t j = 0; j < field.ny(); ++j) {
        const std::size_t row = field.ny() - 1 - j;
        for (std::size_t i = 0; i < field.nx(); ++i) {
            const double v = field.at(i, j);
            double g = range > 0.0 ? std::round((v - map.min) / range * map.maxval) : 0.0;
            g = std::clamp(g, 0.0, static_cast<double>(map.maxval));
            img.pixels[row * img.width + i] = static_cast<std::uint16_t>(g);
        }
    }
    write_pgm(path, img, true);

    std::ofstream side(sidecar_path(path));
    if (!side) throw std::runtime_error("cannot write sidecar for '" + path.string() + "'");
    const Domain& d = field.domain();
    side << "# field snapshot: value = min + gray * (max - min) / maxval\n"
         << "format = pgm-p5\n"
         << "maxval = " << map.maxval << '\n'
         << "min = " << format_double(map.min) << '\n'
         << "max = " << format_double(map.max) << '\n'
         << "nx = " << field.nx() << '\n'
         << "ny = " << field.ny() << '\n'
         << "lower_x = " << format_double(d.lower.x) << '\n'
         << "lower_y = " << format_double(d.lower.y) << '\n'
         << "length_x = " << format_double(d.length_x) << '\n'
         << "length_y = " << format_double(d.length_y) << '\n';
}

ScalarField read_snapshot(const std::filesystem::path& path) {
    std::ifstream side(sidecar_path(path));
    if (!side) throw std::runtime_error("missing snapshot sidecar for '" + path.string() + "'");
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(side, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find(" = ");
        if (eq == std::string::npos) throw std::runtime_error("snapshot sidecar: bad line '" + line + "'");
        kv[line.substr(0, eq)] = line.substr(eq + 3);
    }
    auto get = [&](const std::string& key) {
        const auto it = kv.find(key);
        if (it == kv.end()) throw std::runtime_error("snapshot sidecar: missing '" + key + "'");
        return parse_double(it->second, key);
    };
    SnapshotMapping map{get("min"), get("max"), static_cast<std::uint32_t>(get("maxval"))};
    Domain d{{get("lower_x"), get("lower_y")}, get("length_x"), get("length_y")};

    const GrayImage img = read_pgm(path);
    if (img.width != static_cast<std::size_t>(get("nx")) ||
        img.height != static_cast<std::size_t>(get("ny")) || img.maxval != map.maxval)
        throw std::runtime_error("snapshot sidecar does not match image header");

    ScalarField f(d, img.width, img.height);
    const double range = map.max - map.min;
    for (std::size_t j = 0; j < img.height; ++j) {
        const std::size_t row = img.height - 1 - j;
        for (std::size_t i = 0; i < img.width; ++i) {
            const std::uint32_t g = img.at(i, row);
            double v = map.min;
            if (g == map.maxval) v = map.max;
            else if (g > 0) v = map.min + (static_cast<double>(g) / map.maxval) * range;
            f.at(i, j) = v;
        }
    }
    return f;
}

}  // namespace swarmheat
