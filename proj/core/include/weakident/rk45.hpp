#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace weakident {

using OdeRhs = std::function<void(double, const Eigen::VectorXd&, Eigen::VectorXd&)>;

struct Rk45Options {
    double rtol = 1e-10;
    double atol = 1e-10;
    double h_init = 0.0;   // 0 = choose automatically
    double h_min = 1e-14;
    long max_steps = 50'000'000;
};

/// Adaptive Dormand-Prince 5(4) with a 4th-order dense interpolant. Samples
/// the solution at the strictly increasing times `ts` (ts[0] >= t0). Throws
/// NumericalError on step-size underflow or non-finite states.
Eigen::MatrixXd integrate_dense(const OdeRhs& rhs, double t0, const Eigen::VectorXd& y0,
                                const std::vector<double>& ts, const Rk45Options& opts = {});

struct DenseResult {
    Eigen::MatrixXd samples; // ts.size() rows; rows at or beyond `completed` are zero
    int completed = 0;
};

/// Like integrate_dense but stops quietly at blow-up or step underflow and
/// reports how many samples were reached (used for dynamic-error truncation).
DenseResult integrate_dense_partial(const OdeRhs& rhs, double t0, const Eigen::VectorXd& y0,
                                    const std::vector<double>& ts, const Rk45Options& opts = {});

} // namespace weakident
