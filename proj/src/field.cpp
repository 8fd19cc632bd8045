#include "swarmheat/field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "swarmheat/pgm.hpp"

namespace swarmheat {

ScalarField::ScalarField(Domain domain, std::size_t nx, std::size_t ny, double fill)
    : ScalarField(domain, nx, ny, std::vector<double>(nx * ny, fill)) {}

ScalarField::ScalarField(Domain domain, std::size_t nx, std::size_t ny, std::vector<double> samples)
    : domain_(domain), nx_(nx), ny_(ny), samples_(std::move(samples)) {
    domain_.validate();
    if (nx == 0 || ny == 0) throw std::invalid_argument("field resolution must be positive");
    if (samples_.size() != nx * ny)
        throw std::invalid_argument("field sample count does not match resolution");
}

ScalarField ScalarField::from_function(Domain domain, std::size_t nx, std::size_t ny,
                                       const std::function<double(Vec2)>& fn) {
    ScalarField f(domain, nx, ny);
    for (std::size_t j = 0; j < ny; ++j)
        for (std::size_t i = 0; i < nx; ++i) f.at(i, j) = fn(f.cell_center(i, j));
    return f;
}

bool ScalarField::same_grid(const ScalarField& o) const {
    return nx_ == o.nx_ && ny_ == o.ny_ && domain_.lower == o.domain_.lower &&
           domain_.length_x == o.domain_.length_x && domain_.length_y == o.domain_.length_y;
}

namespace {

struct Axis {
    std::size_t i0 = 0;   // left interpolation node
    double t = 0.0;       // weight of node i0 + 1
    double raw = 0.0;     // unclamped continuous index
};

Axis locate(double coord, double lower, double spacing, std::size_t n) {
    Axis a;
    a.raw = (coord - lower) / spacing - 0.5;
    if (n == 1) return a;
    const double c = std::clamp(a.raw, 0.0, static_cast<double>(n - 1));
    const auto i = static_cast<std::size_t>(std::floor(c));
    a.i0 = std::min(i, n - 2);
    a.t = c - static_cast<double>(a.i0);
    return a;
}

}  // namespace

double sample_field(const ScalarField& f, Vec2 x) {
    const Vec2 p = f.domain().clamp(x);
    const Axis ax = locate(p.x, f.domain().lower.x, f.dx(), f.nx());
    const Axis ay = locate(p.y, f.domain().lower.y, f.dy(), f.ny());
    const std::size_t i1 = f.nx() == 1 ? ax.i0 : ax.i0 + 1;
    const std::size_t j1 = f.ny() == 1 ? ay.i0 : ay.i0 + 1;
    const double bottom = (1.0 - ax.t) * f.at(ax.i0, ay.i0) + ax.t * f.at(i1, ay.i0);
    const double top = (1.0 - ax.t) * f.at(ax.i0, j1) + ax.t * f.at(i1, j1);
    return (1.0 - ay.t) * bottom + ay.t * top;
}

Vec2 sample_field_gradient(const ScalarField& f, Vec2 x) {
    const Vec2 p = f.domain().clamp(x);
    const Axis ax = locate(p.x, f.domain().lower.x, f.dx(), f.nx());
    const Axis ay = locate(p.y, f.domain().lower.y, f.dy(), f.ny());

    // Slope along x inside interpolation cell c (c = -1 and c = nx-1 are the flat
    // clamped margins).
    auto slope_x = [&](long c) {
        if (c < 0 || c >= static_cast<long>(f.nx()) - 1) return 0.0;
        const auto i = static_cast<std::size_t>(c);
        const std::size_t j1 = f.ny() == 1 ? ay.i0 : ay.i0 + 1;
        return ((1.0 - ay.t) * (f.at(i + 1, ay.i0) - f.at(i, ay.i0)) +
                ay.t * (f.at(i + 1, j1) - f.at(i, j1))) /
               f.dx();
    };
    auto slope_y = [&](long c) {
        if (c < 0 || c >= static_cast<long>(f.ny()) - 1) return 0.0;
        const auto j = static_cast<std::size_t>(c);
        const std::size_t i1 = f.nx() == 1 ? ax.i0 : ax.i0 + 1;
        return ((1.0 - ax.t) * (f.at(ax.i0, j + 1) - f.at(ax.i0, j)) +
                ax.t * (f.at(i1, j + 1) - f.at(i1, j))) /
               f.dy();
    };
    auto directional = [](double raw, auto&& slope) {
        const double fl = std::floor(raw);
        const long c = static_cast<long>(fl);
        if (raw == fl) return 0.5 * (slope(c - 1) + slope(c));
        return slope(c);
    };
    return {directional(ax.raw, slope_x), directional(ay.raw, slope_y)};
}

double integrate_field(const ScalarField& f) {
    const auto s = f.samples();
    return std::accumulate(s.begin(), s.end(), 0.0) * f.cell_area();
}

ScalarField normalize(ScalarField f) {
    const double mass = integrate_field(f);
    if (!(mass > 0.0) || !std::isfinite(mass))
        throw std::invalid_argument("field cannot be normalized: integral is not positive");
    for (double& v : f.samples()) v /= mass;
    f.set_normalized(true);
    return f;
}

ScalarField apply_density_floor(ScalarField f, double floor) {
    if (floor < 0.0 || !std::isfinite(floor))
        throw std::invalid_argument("density floor must be nonnegative");
    const double level = floor * f.domain().uniform_level();
    for (double& v : f.samples()) v = std::max(v, level);
    return normalize(std::move(f));
}

ScalarField subtract(const ScalarField& a, const ScalarField& b) {
    if (!a.same_grid(b)) throw std::invalid_argument("fields are on different grids");
    ScalarField out = a;
    out.set_normalized(false);
    auto o = out.samples();
    const auto bs = b.samples();
    for (std::size_t k = 0; k < o.size(); ++k) o[k] -= bs[k];
    return out;
}

ScalarField ingest_image(const std::filesystem::path& path, const Domain& domain,
                         const ImageDensityOptions& options) {
    const GrayImage img = read_pgm(path);
    ScalarField f(domain, img.width, img.height);
    const double scale = 1.0 / static_cast<double>(img.maxval);
    for (std::size_t j = 0; j < img.height; ++j) {
        const std::size_t row = img.height - 1 - j;
        for (std::size_t i = 0; i < img.width; ++i) {
            const double v = static_cast<double>(img.at(i, row)) * scale;
            f.at(i, j) = options.invert ? 1.0 - v : v;
        }
    }
    if (integrate_field(f) <= 0.0) {
        if (options.floor <= 0.0)
            throw std::invalid_argument("image '" + path.string() +
                                        "' has no intensity and the density floor is 0");
        return apply_density_floor(std::move(f), options.floor);
    }
    f = normalize(std::move(f));
    if (options.floor > 0.0) f = apply_density_floor(std::move(f), options.floor);
    return f;
}

ScalarField gaussian_mixture_density(const Domain& domain, std::size_t n,
                                     std::span<const GaussianBump> bumps, double floor) {
    if (bumps.empty()) throw std::invalid_argument("gaussian mixture needs at least one component");
    for (const auto& b : bumps)
        if (!(b.sigma > 0.0) || !(b.weight > 0.0))
            throw std::invalid_argument("gaussian mixture components need sigma > 0 and weight > 0");
    ScalarField f = ScalarField::from_function(domain, n, n, [&](Vec2 x) {
        double v = 0.0;
        for (const auto& b : bumps) {
            const double s2 = b.sigma * b.sigma;
            v += b.weight / (2.0 * std::numbers::pi * s2) * std::exp(-norm2(x - b.center) / (2.0 * s2));
        }
        return v;
    });
    return apply_density_floor(normalize(std::move(f)), floor);
}

ScalarField uniform_density(const Domain& domain, std::size_t n) {
    ScalarField f(domain, n, n, domain.uniform_level());
    f.set_normalized(true);
    return f;
}

}  // namespace swarmheat
