#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "swarmheat/field.hpp"

namespace swarmheat {

/// Grayscale raster, row 0 at the top.
struct GrayImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::uint32_t maxval = 255;
    std::vector<std::uint16_t> pixels;

    std::uint16_t at(std::size_t col, std::size_t row) const { return pixels[row * width + col]; }
};

/// Parses P2 (ASCII) and P5 (binary, 8- or 16-bit big-endian) graymaps with
/// maxval <= 65535. Comments are allowed wherever the header allows whitespace.
GrayImage read_pgm(std::istream& in);
GrayImage read_pgm(const std::filesystem::path& path);

void write_pgm_p5(std::ostream& out, const GrayImage& img);
void write_pgm_p2(std::ostream& out, const GrayImage& img);
void write_pgm(const std::filesystem::path& path, const GrayImage& img, bool binary = true);

/// Affine value-to-gray mapping of a field snapshot:
///   gray = round((v - min) / (max - min) * maxval),  v = min + gray * (max - min) / maxval.
struct SnapshotMapping {
    double min = 0.0;
    double max = 1.0;
    std::uint32_t maxval = 65535;
};

/// Writes `<path>` as a 16-bit P5 image plus `<path>.txt` holding the mapping,
/// resolution and domain. Reading the pair back yields the quantized field, and
/// writing that again reproduces both files byte for byte.
void write_snapshot(const std::filesystem::path& path, const ScalarField& field);
ScalarField read_snapshot(const std::filesystem::path& path);

std::filesystem::path sidecar_path(const std::filesystem::path& pgm_path);

}  // namespace swarmheat
