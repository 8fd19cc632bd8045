#include "swarmheat/controller.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace swarmheat {

void ControlLaw::validate() const {
    if (!(D > 0.0) || !std::isfinite(D)) throw std::invalid_argument("control.D must be positive");
    if (!(f_floor > 0.0) || !std::isfinite(f_floor))
        throw std::invalid_argument("control.f_floor must be positive");
    if (!(v_max > 0.0)) throw std::invalid_argument("control.v_max must be positive");
}

DensityError density_error(const DensityEstimate& est, const ScalarField& desired, Vec2 x) {
    return {est.value - sample_field(desired, x), est.gradient - sample_field_gradient(desired, x)};
}

Vec2 velocity(const ControlLaw& law, Vec2 grad_phi, double density) {
    Vec2 v = (-law.D / std::max(density, law.f_floor)) * grad_phi;
    if (std::isfinite(law.v_max)) {
        const double speed = norm(v);
        if (speed > law.v_max) v *= law.v_max / speed;
    }
    return v;
}

Vec2 agent_velocity(const ControlLaw& law, const DensityEstimate& est, const ScalarField& desired,
                    Vec2 x) {
    const DensityError err = density_error(est, desired, x);
    const double density = law.denominator == ControlLaw::Denominator::estimate
                               ? est.value
                               : sample_field(desired, x);
    return velocity(law, err.gradient, density);
}

}  // namespace swarmheat
