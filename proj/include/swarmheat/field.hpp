#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "swarmheat/geometry.hpp"

namespace swarmheat {

/// Scalar function sampled at the cell centers of an nx-by-ny grid over a
/// rectangular domain. Storage is row-major with row j at y-index j (j = 0 is
/// the bottom row). Queries use bilinear interpolation between cell centers and
/// clamp to the boundary, so the interpolant is constant in the half cell
/// between the outermost centers and the walls.
class ScalarField {
public:
    ScalarField() = default;
    ScalarField(Domain domain, std::size_t nx, std::size_t ny, double fill = 0.0);
    ScalarField(Domain domain, std::size_t nx, std::size_t ny, std::vector<double> samples);

    /// Samples fn at every cell center.
    static ScalarField from_function(Domain domain, std::size_t nx, std::size_t ny,
                                     const std::function<double(Vec2)>& fn);

    const Domain& domain() const { return domain_; }
    std::size_t nx() const { return nx_; }
    std::size_t ny() const { return ny_; }
    std::size_t size() const { return samples_.size(); }
    double dx() const { return domain_.length_x / static_cast<double>(nx_); }
    double dy() const { return domain_.length_y / static_cast<double>(ny_); }
    double cell_area() const { return dx() * dy(); }

    Vec2 cell_center(std::size_t i, std::size_t j) const {
        return {domain_.lower.x + (static_cast<double>(i) + 0.5) * dx(),
                domain_.lower.y + (static_cast<double>(j) + 0.5) * dy()};
    }

    double& at(std::size_t i, std::size_t j) { return samples_[j * nx_ + i]; }
    double at(std::size_t i, std::size_t j) const { return samples_[j * nx_ + i]; }
    std::span<double> samples() { return samples_; }
    std::span<const double> samples() const { return samples_; }

    bool normalized() const { return normalized_; }
    void set_normalized(bool flag) { normalized_ = flag; }

    bool same_grid(const ScalarField& o) const;

private:
    Domain domain_{};
    std::size_t nx_ = 0;
    std::size_t ny_ = 0;
    std::vector<double> samples_;
    bool normalized_ = false;
};

/// Bilinear interpolation of the cell-center samples at x (clamped to the domain).
double sample_field(const ScalarField& f, Vec2 x);

/// Gradient of the bilinear interpolant. On a cell edge the one-sided gradients of
/// the two adjacent cells are averaged; the clamped half cells count as flat.
Vec2 sample_field_gradient(const ScalarField& f, Vec2 x);

/// Midpoint-rule integral: cell area times the sample sum.
double integrate_field(const ScalarField& f);

/// Divides by the integral and marks the field normalized. Throws if the integral
/// is not positive.
ScalarField normalize(ScalarField f);

/// Raises every sample to at least floor * uniform_level, then renormalizes.
/// A field with zero mass becomes uniform when floor > 0.
ScalarField apply_density_floor(ScalarField f, double floor);

/// a - b sample by sample; both fields must share the grid.
ScalarField subtract(const ScalarField& a, const ScalarField& b);

struct ImageDensityOptions {
    double floor = 1e-3;  // fraction of the uniform level
    bool invert = false;  // dark = dense when set
};

/// Turns a grayscale PGM image into a normalized density over `domain`. The grid
/// resolution equals the image size; image row 0 is the top of the domain.
ScalarField ingest_image(const std::filesystem::path& path, const Domain& domain,
                         const ImageDensityOptions& options = {});

struct GaussianBump {
    Vec2 center;
    double sigma = 0.1;
    double weight = 1.0;
};

/// Normalized mixture of isotropic Gaussians sampled on an n-by-n grid and floored.
ScalarField gaussian_mixture_density(const Domain& domain, std::size_t n,
                                     std::span<const GaussianBump> bumps, double floor);

ScalarField uniform_density(const Domain& domain, std::size_t n);

}  // namespace swarmheat
