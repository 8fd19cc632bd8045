#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>

#include "swarmheat/geometry.hpp"

namespace swarmheat {

enum class KernelKind : std::uint8_t { gaussian, epanechnikov };

/// Flat parameter block consumed by the SIMD accumulation kernels.
/// K(u) = norm * exp(-exponent * |u|^2)          (gaussian)
/// K(u) = norm * (1 - |u|^2)                     (epanechnikov)
/// Both are zero for |u|^2 > cutoff2.
struct KernelParams {
    KernelKind kind = KernelKind::gaussian;
    double norm = 0.0;
    double exponent = 0.0;
    double cutoff2 = std::numeric_limits<double>::infinity();
};

/// Radially symmetric smoothing kernel in normalized-argument form: the
/// bandwidth h is applied by the caller as h^-d K((x - r) / h).
///
/// Gaussian kernels may be truncated at a cutoff radius; the truncated kernel
/// is renormalized so it still integrates to one. Epanechnikov kernels have
/// compact support on the unit ball and their gradient at |u| = 1 uses the
/// interior one-sided value.
class Kernel {
public:
    /// The default is the kernel used for the swarm experiments:
    /// K(u) = (2/pi) exp(-2 u'u) in two dimensions (scale 1/2), cut at |u| = 3.
    static Kernel gaussian(int dimension = 2, double cutoff = 3.0, double scale = 0.5);
    static Kernel epanechnikov(int dimension = 2);
    /// Looks up "gaussian" or "epanechnikov". cutoff <= 0 or inf means untruncated
    /// (ignored for compact kernels).
    static Kernel from_name(std::string_view name, double cutoff = 3.0);

    const std::string& name() const { return name_; }
    KernelKind kind() const { return kind_; }
    int dimension() const { return dimension_; }
    int order() const { return 2; }
    /// Radius (in bandwidth units) beyond which the mathematical kernel vanishes.
    double support_radius() const;
    /// Radius beyond which eval() returns exactly zero.
    double cutoff_radius() const { return cutoff_; }
    bool has_finite_cutoff() const { return std::isfinite(cutoff_); }
    /// Radius that bounds every nonzero value, used for quadrature.
    double integration_radius() const;
    KernelParams params() const { return params_; }

    double eval(std::span<const double> u) const;
    void gradient(std::span<const double> u, std::span<double> out) const;

    double eval(double u) const;
    double eval(Vec2 u) const;
    double gradient(double u) const;
    Vec2 gradient(Vec2 u) const;

    /// Value as a function of the squared radius.
    double eval_radial(double r2) const {
        if (r2 > params_.cutoff2) return 0.0;
        if (kind_ == KernelKind::gaussian) return params_.norm * std::exp(-params_.exponent * r2);
        return r2 <= 1.0 ? params_.norm * (1.0 - r2) : 0.0;
    }
    /// g(r2) such that grad K(u) = g(r2) * u.
    double gradient_factor(double r2) const {
        if (r2 > params_.cutoff2) return 0.0;
        if (kind_ == KernelKind::gaussian)
            return -2.0 * params_.exponent * params_.norm * std::exp(-params_.exponent * r2);
        return r2 <= 1.0 ? -2.0 * params_.norm : 0.0;
    }

private:
    Kernel(std::string name, KernelKind kind, int dimension, double cutoff, double scale);
    void check_dimension(std::size_t n) const;

    std::string name_;
    KernelKind kind_;
    int dimension_;
    double cutoff_;
    double scale_;
    KernelParams params_;
};

/// j-th moment of the kernel's one-dimensional marginal profile,
/// kappa_j = int x^j p(x) dx, by adaptive quadrature.
double kernel_moment(const Kernel& k, int j);

/// R(K) = int K(u)^2 du over the kernel's dimension.
double kernel_roughness(const Kernel& k);

/// int K(u) du over the kernel's dimension.
double kernel_integral(const Kernel& k);

/// Index of the first nonzero moment with j >= 1.
int detect_order(const Kernel& k, int max_order = 6, double tol = 1e-9);

/// Evaluates the kernel's marginal profile p(x) (equal to K for d = 1).
double kernel_profile(const Kernel& k, double x);

struct AdmissibilityReport {
    double integral = 0.0;
    double sup = 0.0;
    double abs_integral = 0.0;
    double tail_moment = 0.0;       // int_{|x|>10} |x p(x)| dx of the profile
    double max_symmetry_error = 0.0;
    bool unimodal = false;
    int detected_order = 0;

    bool passed(double tol = 1e-6) const;
};

/// Numerically checks boundedness, integrability, tail decay, normalization,
/// radial symmetry and unimodality.
AdmissibilityReport check_admissibility(const Kernel& k, std::uint64_t seed = 1);

struct BandwidthPolicy {
    enum class Mode : std::uint8_t { fixed, rule_of_thumb };
    Mode mode = Mode::fixed;
    double h = 0.05;
    double sigma_hat = 1.0;
    double c_nu = 1.0;

    static BandwidthPolicy fixed(double h) { return {Mode::fixed, h, 1.0, 1.0}; }
    static BandwidthPolicy rule_of_thumb(double sigma_hat, double c_nu = 1.0) {
        return {Mode::rule_of_thumb, 0.0, sigma_hat, c_nu};
    }
};

/// Fixed mode: h. Rule of thumb: sigma_hat * C * N^(-1/(2 nu + d)).
double select_bandwidth(const BandwidthPolicy& policy, std::size_t n_agents, int dimension,
                        int order = 2);

/// sqrt of the mean per-axis sample variance (unbiased).
double sample_sigma(std::span<const Vec2> points);

}  // namespace swarmheat
