#include "swarmheat/kernels.hpp"

#include <algorithm>
#include <array>
#include <numbers>
#include <random>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace swarmheat {

namespace {

constexpr double kQuadTol = 1e-13;
constexpr unsigned kQuadDepth = 20;

template <class F>
double integrate_1d(F&& f, double a, double b) {
    if (!(b > a)) return 0.0;
    double err = 0.0;
    double l1 = 0.0;
    const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        f, a, b, kQuadDepth, kQuadTol, &err, &l1);
    if (!std::isfinite(value) || err > 1e-9 * std::max(1.0, l1))
        throw std::runtime_error("kernel quadrature did not converge");
    return value;
}

}  // namespace

Kernel::Kernel(std::string name, KernelKind kind, int dimension, double cutoff, double scale)
    : name_(std::move(name)), kind_(kind), dimension_(dimension), cutoff_(cutoff), scale_(scale) {
    if (dimension != 1 && dimension != 2)
        throw std::invalid_argument("kernel dimension must be 1 or 2");
    params_.kind = kind;
    params_.cutoff2 = std::isfinite(cutoff) ? cutoff * cutoff
                                            : std::numeric_limits<double>::infinity();
    if (kind == KernelKind::gaussian) {
        if (!(scale > 0.0)) throw std::invalid_argument("gaussian kernel scale must be positive");
        const double a = 1.0 / (2.0 * scale * scale);
        params_.exponent = a;
        double mass = 0.0;
        if (dimension == 1) {
            mass = std::sqrt(std::numbers::pi / a);
            if (std::isfinite(cutoff)) mass *= std::erf(std::sqrt(a) * cutoff);
        } else {
            mass = std::numbers::pi / a;
            if (std::isfinite(cutoff)) mass *= -std::expm1(-a * cutoff * cutoff);
        }
        params_.norm = 1.0 / mass;
    } else {
        params_.exponent = 0.0;
        params_.norm = dimension == 1 ? 0.75 : 2.0 / std::numbers::pi;
    }
}

Kernel Kernel::gaussian(int dimension, double cutoff, double scale) {
    if (!(cutoff > 0.0) || std::isnan(cutoff)) cutoff = std::numeric_limits<double>::infinity();
    return Kernel("gaussian", KernelKind::gaussian, dimension, cutoff, scale);
}

Kernel Kernel::epanechnikov(int dimension) {
    return Kernel("epanechnikov", KernelKind::epanechnikov, dimension, 1.0, 1.0);
}

Kernel Kernel::from_name(std::string_view name, double cutoff) {
    if (name == "gaussian") return gaussian(2, cutoff);
    if (name == "epanechnikov") return epanechnikov(2);
    throw std::invalid_argument("unknown kernel '" + std::string(name) + "'");
}

double Kernel::support_radius() const {
    return kind_ == KernelKind::gaussian ? std::numeric_limits<double>::infinity() : 1.0;
}

double Kernel::integration_radius() const {
    if (std::isfinite(cutoff_)) return cutoff_;
    return 40.0 * scale_;
}

void Kernel::check_dimension(std::size_t n) const {
    if (n != static_cast<std::size_t>(dimension_))
        throw std::invalid_argument("argument dimension " + std::to_string(n) +
                                    " does not match kernel dimension " +
                                    std::to_string(dimension_));
}

double Kernel::eval(std::span<const double> u) const {
    check_dimension(u.size());
    double r2 = 0.0;
    for (double c : u) r2 += c * c;
    return eval_radial(r2);
}

void Kernel::gradient(std::span<const double> u, std::span<double> out) const {
    check_dimension(u.size());
    check_dimension(out.size());
    double r2 = 0.0;
    for (double c : u) r2 += c * c;
    const double g = gradient_factor(r2);
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = g * u[i];
}

double Kernel::eval(double u) const {
    const std::array<double, 1> a{u};
    return eval(std::span<const double>(a));
}

double Kernel::eval(Vec2 u) const {
    const std::array<double, 2> a{u.x, u.y};
    return eval(std::span<const double>(a));
}

double Kernel::gradient(double u) const {
    check_dimension(1);
    return gradient_factor(u * u) * u;
}

Vec2 Kernel::gradient(Vec2 u) const {
    check_dimension(2);
    return gradient_factor(norm2(u)) * u;
}

double kernel_profile(const Kernel& k, double x) {
    if (k.dimension() == 1) return k.eval_radial(x * x);
    const double r = k.integration_radius();
    const double w = std::sqrt(std::max(0.0, r * r - x * x));
    return integrate_1d([&](double y) { return k.eval_radial(x * x + y * y); }, -w, w);
}

namespace {

// int_0^{2 pi} cos^j(theta) d theta
double angular_factor(int j) {
    if (j % 2 != 0) return 0.0;
    double f = 2.0 * std::numbers::pi;
    for (int i = 1; i <= j / 2; ++i) f *= (2.0 * i - 1.0) / (2.0 * i);
    return f;
}

// int over the plane of x^j g(|u|^2) in polar coordinates.
template <class G>
double radial_moment(G&& g, int j, double radius) {
    const double a = angular_factor(j);
    if (a == 0.0) return 0.0;
    return a * integrate_1d([&](double r) { return g(r * r) * std::pow(r, j + 1); }, 0.0, radius);
}

}  // namespace

double kernel_moment(const Kernel& k, int j) {
    if (j < 0) throw std::invalid_argument("moment index must be nonnegative");
    const double r = k.integration_radius();
    if (k.dimension() == 2)
        return radial_moment([&](double r2) { return k.eval_radial(r2); }, j, r);
    return integrate_1d([&](double x) { return std::pow(x, j) * k.eval_radial(x * x); }, -r, r);
}

double kernel_integral(const Kernel& k) { return kernel_moment(k, 0); }

double kernel_roughness(const Kernel& k) {
    const double r = k.integration_radius();
    auto sq = [&](double r2) {
        const double v = k.eval_radial(r2);
        return v * v;
    };
    if (k.dimension() == 1) return integrate_1d([&](double x) { return sq(x * x); }, -r, r);
    return radial_moment(sq, 0, r);
}

int detect_order(const Kernel& k, int max_order, double tol) {
    for (int j = 1; j <= max_order; ++j)
        if (std::abs(kernel_moment(k, j)) > tol) return j;
    return 0;
}

bool AdmissibilityReport::passed(double tol) const {
    return std::abs(integral - 1.0) <= tol && std::isfinite(sup) && std::isfinite(abs_integral) &&
           tail_moment <= tol && max_symmetry_error <= 1e-12 * sup && unimodal &&
           detected_order == 2;
}

AdmissibilityReport check_admissibility(const Kernel& k, std::uint64_t seed) {
    AdmissibilityReport rep;
    const double r = k.integration_radius();
    rep.integral = kernel_integral(k);
    rep.abs_integral = rep.integral;  // K >= 0 everywhere
    rep.detected_order = detect_order(k);

    const double tail_start = 10.0;
    if (r > tail_start) {
        rep.tail_moment =
            2.0 * integrate_1d([&](double x) { return std::abs(x * kernel_profile(k, x)); },
                               tail_start, r);
    }

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coord(-r, r);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    const double peak = k.dimension() == 1 ? k.eval(0.0) : k.eval(Vec2{0.0, 0.0});
    rep.sup = peak;
    for (int i = 0; i < 1000; ++i) {
        if (k.dimension() == 1) {
            const double u = coord(rng);
            rep.sup = std::max(rep.sup, k.eval(u));
            rep.max_symmetry_error = std::max(rep.max_symmetry_error, std::abs(k.eval(u) - k.eval(-u)));
        } else {
            const Vec2 u{coord(rng), coord(rng)};
            const double th = angle(rng);
            const Vec2 rot{std::cos(th) * u.x - std::sin(th) * u.y,
                           std::sin(th) * u.x + std::cos(th) * u.y};
            const double v = k.eval(u);
            rep.sup = std::max(rep.sup, v);
            rep.max_symmetry_error = std::max(
                {rep.max_symmetry_error, std::abs(v - k.eval(-u)), std::abs(v - k.eval(rot))});
        }
    }

    // Non-increasing along rays; maximum at the origin.
    rep.unimodal = rep.sup <= peak;
    for (int ray = 0; ray < 16 && rep.unimodal; ++ray) {
        const double th = 2.0 * std::numbers::pi * ray / 16.0;
        double prev = peak;
        for (int s = 1; s <= 400; ++s) {
            const double rad = r * s / 400.0;
            const double v = k.dimension() == 1
                                 ? k.eval(ray % 2 ? rad : -rad)
                                 : k.eval(Vec2{rad * std::cos(th), rad * std::sin(th)});
            if (v > prev) {
                rep.unimodal = false;
                break;
            }
            prev = v;
        }
    }
    return rep;
}

double select_bandwidth(const BandwidthPolicy& policy, std::size_t n_agents, int dimension,
                        int order) {
    if (n_agents == 0) throw std::invalid_argument("bandwidth selection needs N >= 1");
    if (policy.mode == BandwidthPolicy::Mode::fixed) {
        if (!(policy.h > 0.0) || !std::isfinite(policy.h))
            throw std::invalid_argument("fixed bandwidth h must be positive");
        return policy.h;
    }
    if (!(policy.sigma_hat > 0.0) || !std::isfinite(policy.sigma_hat))
        throw std::invalid_argument("rule-of-thumb bandwidth needs sigma_hat > 0 (co-located sample)");
    if (!(policy.c_nu > 0.0)) throw std::invalid_argument("bandwidth constant c_nu must be positive");
    const double exponent = -1.0 / (2.0 * order + dimension);
    return policy.sigma_hat * policy.c_nu * std::pow(static_cast<double>(n_agents), exponent);
}

double sample_sigma(std::span<const Vec2> points) {
    const std::size_t n = points.size();
    if (n < 2) return 0.0;
    Vec2 mean{};
    for (const Vec2& p : points) mean += p;
    mean = mean / static_cast<double>(n);
    double sx = 0.0, sy = 0.0;
    for (const Vec2& p : points) {
        sx += (p.x - mean.x) * (p.x - mean.x);
        sy += (p.y - mean.y) * (p.y - mean.y);
    }
    const double var = 0.5 * (sx + sy) / static_cast<double>(n - 1);
    return std::sqrt(var);
}

}  // namespace swarmheat
