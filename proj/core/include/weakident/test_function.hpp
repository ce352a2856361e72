#pragma once

#include <Eigen/Dense>

#include <vector>

#include "weakident/dictionary.hpp"
#include "weakident/types.hpp"

namespace weakident {

// Defaults for the test-function design. tau_hat couples the support width to
// the data's transition frequency; tau_decay bounds the kernel value at the
// last interior sample. 2.1 / 5e-10 reproduce the (m, p) = (17, 10) pair for
// the Kuramoto-Sivashinsky reference data at k* = 24.
inline constexpr double kTauHatDefault = 2.1;
inline constexpr double kTauDecayDefault = 5e-10;
inline constexpr int kMaxSmoothness = 60;

struct AxisTestFunction {
    int m = 1;       // support half-width in grid points
    int p = 2;       // smoothness exponent
    double spacing = 1.0;
};

/// Separable localized polynomial bump prod_axis (1 - (s/(m*spacing))^2)^p,
/// one factor per axis (spatial axes first, time last). Each factor is
/// normalized so its order-0 samples sum (times the spacing) to 1.
class TestFunction {
public:
    TestFunction() = default; // empty; only meaningful after construction below
    explicit TestFunction(std::vector<AxisTestFunction> axes);

    int num_axes() const { return static_cast<int>(axes_.size()); }
    const AxisTestFunction& axis(int a) const { return axes_[static_cast<std::size_t>(a)]; }
    int m(int a) const { return axis(a).m; }
    int p(int a) const { return axis(a).p; }
    double spacing(int a) const { return axis(a).spacing; }

    /// Every axis must satisfy 2m+1 <= axis point count.
    void validate_against(const GridSpec& grid) const;

private:
    std::vector<AxisTestFunction> axes_;
};

/// Samples the d-th analytic derivative of the axis factor at the 2m+1 grid
/// offsets -m..m, including the order-0 normalization constant. Rejects
/// d >= p (the derivative would not vanish at the support boundary).
Eigen::VectorXd sample_test_function(const TestFunction& tf, int axis, int derivative_order);

struct SpectrumChangepoint {
    int k_star = 1;
    Eigen::VectorXd cumulative; // cumulative |FFT| over modes 0..floor(N/2)
    double fit_cost = 0.0;
    bool fallback = false; // flat-spectrum fallback was taken
};

/// Junction of the cumulative averaged |FFT| along `axis`, fitted with a
/// one-junction piecewise-linear function. Magnitudes are averaged over all
/// other indices and pooled across variables.
SpectrumChangepoint transition_frequency(const ObservationSet& data, int axis);

struct TestFunctionChoice {
    int m = 1;
    int p = 2;
    bool clamped = false; // no p <= p_max satisfied the decay bound
};

/// Smallest p > max_derivative + 1 whose paired support width
/// m = round(tau_hat * sqrt(2p+3) * axis_count / (2*pi*k_star)) satisfies
/// (1 - ((m-1)/m)^2)^p <= tau_decay, with m clamped to [1, (axis_count-1)/2].
TestFunctionChoice choose_m_p(int k_star, int axis_count, double spacing, int max_derivative,
                              double tau_hat = kTauHatDefault,
                              double tau_decay = kTauDecayDefault,
                              int p_max = kMaxSmoothness);

struct AxisDesign {
    SpectrumChangepoint changepoint;
    TestFunctionChoice choice;
};

/// Per-axis spectrum changepoints plus (m, p) selection for a dataset; the
/// returned designs are ordered like the grid axes. `max_interior_margin`
/// additionally caps m so at least a few interior centers remain.
std::vector<AxisDesign> design_test_function(const ObservationSet& data, const Dictionary& dict,
                                             double tau_hat = kTauHatDefault,
                                             double tau_decay = kTauDecayDefault);

TestFunction make_test_function(const GridSpec& grid, const std::vector<AxisDesign>& designs);

} // namespace weakident
