#pragma once

#include <Eigen/Dense>

namespace weakident {

/// Weighted fit of a continuous one-junction piecewise-linear function
/// r(x) = y0 + b1*(x - j)      for x <= j
///      = y0 + b2*(x - j)      for x >  j
/// over the points (0, y[0]) .. (n-1, y[n-1]). Junction candidates are every
/// interior index; ties resolve to the lowest index. Entries with weight 0
/// are skipped.
struct SegmentedFit {
    int junction = 0;
    double cost = 0.0;
    double single_line_cost = 0.0; // weighted straight-line fit, for fallbacks
    Eigen::Vector3d params{0, 0, 0}; // y0, b1, b2
};

SegmentedFit fit_one_junction(const Eigen::VectorXd& y, const Eigen::VectorXd& weights);

} // namespace weakident
