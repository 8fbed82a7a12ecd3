#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sncf/core/rng.hpp"

namespace sncf {

/// One draw from the von Mises-Fisher distribution with unit mean direction
/// mu and concentration kappa > 0 (Wood's rejection sampler).
std::vector<double> sample_vmf(std::span<const double> mu, double kappa, Rng& rng);

/// Uniformly random unit vector orthogonal to the unit vector mu.
std::vector<double> random_tangent(std::span<const double> mu, Rng& rng);

/// A unit vector at a random angle in [0, half_angle] from the unit vector axis,
/// with the angle drawn as half_angle * sqrt(u).
std::vector<double> random_cap_direction(std::span<const double> axis, double half_angle, Rng& rng);

/// Expected mean resultant length A_d(kappa) = I_{d/2}(kappa) / I_{d/2-1}(kappa).
double vmf_mean_resultant_length(std::size_t d, double kappa);

}  // namespace sncf
