#pragma once

#include <cstdint>

#include "weakident/types.hpp"

namespace weakident {

struct NoiseSpec {
    double sigma_nsr = 0.0; // noise-to-signal ratio, >= 0
    std::uint64_t seed = 0;
};

/// Per-variable noise scale: sigma_nsr times the root mean square of the
/// midrange-centered clean data, midrange = (max + min)/2.
double noise_sigma_for(const Eigen::ArrayXd& clean, double sigma_nsr);

/// Adds i.i.d. Gaussian noise with the scale above, one seeded substream per
/// variable. sigma_nsr = 0 returns the input unchanged.
ObservationSet add_noise(const ObservationSet& clean, const NoiseSpec& spec);

} // namespace weakident
