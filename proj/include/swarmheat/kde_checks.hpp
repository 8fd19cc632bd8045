#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "swarmheat/kde.hpp"
#include "swarmheat/kernels.hpp"

namespace swarmheat {

/// Kernels shipped with the library, in a fixed order.
std::vector<Kernel> shipped_kernels();

struct GradientCheckReport {
    std::size_t probes = 0;
    std::size_t redrawn = 0;  // probes moved away from a truncation circle
    double max_relative_error = 0.0;
};

/// Compares the analytic KDE gradient with central differences at random
/// probes. The relative error is |g - g_fd| / max(|g|, 1e-2 f_hat / h).
GradientCheckReport gradient_fd_check(const Kernel& k, std::size_t n_agents, double h,
                                      std::size_t probes, std::uint64_t seed);

struct ConsistencyReport {
    std::vector<std::size_t> sizes;
    std::vector<double> mean_abs_error;  // averaged over seeds
    bool strictly_decreasing = false;
};

/// Mean absolute error of the estimate against a known bivariate Gaussian at
/// fixed probes, for growing sample sizes and the rule-of-thumb bandwidth.
ConsistencyReport consistency_trend(const Kernel& k, const std::vector<std::size_t>& sizes,
                                    std::size_t probes, const std::vector<std::uint64_t>& seeds,
                                    unsigned threads = 1);

struct GridAgreementReport {
    std::size_t probes = 0;
    std::size_t query_mismatches = 0;
    double max_same_kernel_error = 0.0;  // grid vs brute with the truncated kernel
    double max_bound_ratio = 0.0;        // |grid - untruncated| / truncation bound
};

/// Grid-accelerated estimates against brute force, plus neighbor query sets
/// against a plain distance filter.
GridAgreementReport grid_agreement_check(std::size_t n_agents, double h, std::size_t probes,
                                         std::uint64_t seed);

/// Upper bound on |f_truncated - f_untruncated| for the default Gaussian:
/// tau * (f_truncated + K(0) / h^2) with tau the truncated mass fraction.
double truncation_bound(const Kernel& truncated, double f_truncated, double h);

}  // namespace swarmheat
