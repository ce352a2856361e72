#include "weakident/noise.hpp"

#include <cmath>

#include "weakident/errors.hpp"
#include "weakident/rng.hpp"

namespace weakident {

double noise_sigma_for(const Eigen::ArrayXd& clean, double sigma_nsr) {
    const double midrange = 0.5 * (clean.maxCoeff() + clean.minCoeff());
    const double rms = std::sqrt((clean - midrange).square().mean());
    return sigma_nsr * rms;
}

ObservationSet add_noise(const ObservationSet& clean, const NoiseSpec& spec) {
    if (spec.sigma_nsr < 0.0) throw InputError("noise", "sigma_nsr must be >= 0");
    if (spec.sigma_nsr == 0.0) return clean;

    ObservationSet noisy = clean;
    for (int v = 0; v < clean.num_vars(); ++v) {
        const double sigma =
            noise_sigma_for(clean.values[static_cast<std::size_t>(v)], spec.sigma_nsr);
        if (sigma == 0.0) continue; // degenerate (constant) signal
        Rng rng(derive_stream(spec.seed, static_cast<std::uint64_t>(v)));
        auto& field = noisy.values[static_cast<std::size_t>(v)];
        for (Eigen::Index i = 0; i < field.size(); ++i) field[i] += sigma * rng.gaussian();
    }
    return noisy;
}

} // namespace weakident
