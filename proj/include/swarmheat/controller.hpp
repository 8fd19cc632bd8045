#pragma once

#include <limits>

#include "swarmheat/field.hpp"
#include "swarmheat/kde.hpp"

namespace swarmheat {

/// Heat-equation feedback law v = -D grad(Phi) / f, with the density in the
/// denominator clamped from below by f_floor and an optional speed cap.
struct ControlLaw {
    enum class Denominator { estimate, desired };

    double D = 5.0;
    double f_floor = 1e-2;
    double v_max = std::numeric_limits<double>::infinity();
    Denominator denominator = Denominator::estimate;

    void validate() const;
};

/// Density error Phi = f_hat - f_desired and its gradient at x.
struct DensityError {
    double phi = 0.0;
    Vec2 gradient{};
};

DensityError density_error(const DensityEstimate& est, const ScalarField& desired, Vec2 x);

/// -D * grad_phi / max(density, f_floor), then capped at v_max.
Vec2 velocity(const ControlLaw& law, Vec2 grad_phi, double density);

/// Velocity of an agent at x given its local estimate; picks the denominator
/// according to law.denominator.
Vec2 agent_velocity(const ControlLaw& law, const DensityEstimate& est, const ScalarField& desired,
                    Vec2 x);

}  // namespace swarmheat
