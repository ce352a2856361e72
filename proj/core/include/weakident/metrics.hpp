#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <vector>

#include "weakident/test_function.hpp"
#include "weakident/types.hpp"
#include "weakident/weak_system.hpp"

namespace weakident {

struct ErrorReport {
    double e2 = 0.0;
    double e_inf = 0.0;
    double tpr = 0.0;
    double ppv = 0.0;
    double e_res = 0.0;
    std::optional<double> e_dyn;
};

/// Coefficient and support recovery errors for one variable or a stacked
/// system. c_true and c_hat carry one vector per dependent variable; e_res is
/// the relative weak-form residual over the supplied system. Throws when the
/// true coefficient vector is identically zero.
ErrorReport error_report(const std::vector<Coefficients>& c_true,
                         const std::vector<Coefficients>& c_hat, const WeakSystem& system,
                         std::optional<double> e_dyn = std::nullopt);

/// Mean squared deviation of a forward-simulated trajectory from the clean
/// one, truncated just before blow-up (any |state| above 1e6 times the clean
/// trajectory's max).
double dynamic_error(const ObservationSet& forward, const ObservationSet& clean);

struct NoiseErrorEstimate {
    Eigen::VectorXd s_h_star;            // per-row variance factors
    Eigen::VectorXd empirical_variance;  // Monte-Carlo Var(e_h^noise)
    Eigen::VectorXd ratio;               // empirical / (sigma^2 S_h*)
    double s_bar_star = 0.0;
    double max_bound_ratio = 0.0;        // max |e_h| / (S_bar* |Omega_h| eps)
};

/// Empirical check of the weak-form noise-error estimate: per-row variance
/// factors from the clean data and true model vs. Monte-Carlo variances over
/// seeded noise draws. Single dependent variable, spatial_dims <= 1.
NoiseErrorEstimate theorem1_validation(const ObservationSet& clean, const Coefficients& true_model,
                                       const Dictionary& dict, const TestFunction& tf,
                                       const std::vector<Center>& centers, double sigma,
                                       int mc_trials, std::uint64_t seed = 12345);

} // namespace weakident
