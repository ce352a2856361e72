#include "weakident/rk45.hpp"

#include <algorithm>
#include <cmath>

#include "weakident/errors.hpp"

namespace weakident {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                 e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                 e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;
// Dense-output weights (Hairer's CONTD5).
constexpr double d1 = -12715105075.0 / 11282082432.0;
constexpr double d3 = 87487479700.0 / 32700410799.0;
constexpr double d4 = -10690763975.0 / 1880347072.0;
constexpr double d5 = 701980252875.0 / 199316789632.0;
constexpr double d6 = -1453857185.0 / 822651844.0;
constexpr double d7 = 69997945.0 / 29380423.0;

} // namespace

DenseResult integrate_dense_partial(const OdeRhs& rhs, double t0, const Eigen::VectorXd& y0,
                                    const std::vector<double>& ts, const Rk45Options& opts) {
    const int dim = static_cast<int>(y0.size());
    const int nout = static_cast<int>(ts.size());
    DenseResult result;
    result.samples = Eigen::MatrixXd::Zero(nout, dim);
    Eigen::MatrixXd& out = result.samples;
    if (nout == 0) return result;
    for (int i = 1; i < nout; ++i)
        if (ts[static_cast<std::size_t>(i)] <= ts[static_cast<std::size_t>(i - 1)])
            throw InputError("ode", "sample times must be strictly increasing");
    if (ts[0] < t0) throw InputError("ode", "sample times precede t0");

    Eigen::VectorXd y = y0, k1(dim), k2(dim), k3(dim), k4(dim), k5(dim), k6(dim), k7(dim);
    Eigen::VectorXd ytmp(dim), ynew(dim), yerr(dim);
    double t = t0;
    int next = 0;
    if (ts[0] == t0) {
        out.row(0) = y0.transpose();
        next = 1;
    }
    const double t_end = ts[static_cast<std::size_t>(nout - 1)];

    rhs(t, y, k1);

    auto weighted_rms = [&](const Eigen::VectorXd& err, const Eigen::VectorXd& ya,
                            const Eigen::VectorXd& yb) {
        double acc = 0.0;
        for (int i = 0; i < dim; ++i) {
            const double sc = opts.atol + opts.rtol * std::max(std::abs(ya[i]), std::abs(yb[i]));
            const double q = err[i] / sc;
            acc += q * q;
        }
        return std::sqrt(acc / dim);
    };

    double h = opts.h_init;
    if (h <= 0.0) {
        const double d0 = y.norm() / std::sqrt(static_cast<double>(dim));
        const double dd1 = k1.norm() / std::sqrt(static_cast<double>(dim));
        h = (d0 < 1e-8 || dd1 < 1e-8) ? 1e-6 : 0.01 * d0 / dd1;
        h = std::min(h, (t_end - t0) > 0 ? (t_end - t0) / 10.0 : 1e-6);
        h = std::max(h, opts.h_min);
    }

    for (long step = 0; step < opts.max_steps && next < nout; ++step) {
        if (t + h > t_end) h = t_end - t;
        if (h < opts.h_min) break; // step underflow: stop where we are

        ytmp = y + h * (a21 * k1);
        rhs(t + h / 5.0, ytmp, k2);
        ytmp = y + h * (a31 * k1 + a32 * k2);
        rhs(t + 3.0 * h / 10.0, ytmp, k3);
        ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
        rhs(t + 4.0 * h / 5.0, ytmp, k4);
        ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        rhs(t + 8.0 * h / 9.0, ytmp, k5);
        ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        rhs(t + h, ytmp, k6);
        ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        rhs(t + h, ynew, k7);
        yerr = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        if (!ynew.allFinite()) {
            h *= 0.25;
            if (h < opts.h_min) break;
            continue;
        }
        const double err = weighted_rms(yerr, y, ynew);
        if (err <= 1.0) {
            // Emit dense samples covered by this step.
            while (next < nout && ts[static_cast<std::size_t>(next)] <= t + h) {
                const double theta = (ts[static_cast<std::size_t>(next)] - t) / h;
                const Eigen::VectorXd dy = ynew - y;
                const Eigen::VectorXd r3 = h * k1 - dy;
                const Eigen::VectorXd r4 = dy - h * k7 - r3;
                const Eigen::VectorXd r5 =
                    h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
                out.row(next) =
                    (y + theta * (dy + (1.0 - theta) * (r3 + theta * (r4 + (1.0 - theta) * r5))))
                        .transpose();
                ++next;
            }
            t += h;
            y = ynew;
            k1 = k7; // FSAL
            const double factor =
                err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
            h *= factor;
        } else {
            h *= std::clamp(0.9 * std::pow(err, -0.2), 0.2, 1.0);
        }
    }
    result.completed = next;
    return result;
}

Eigen::MatrixXd integrate_dense(const OdeRhs& rhs, double t0, const Eigen::VectorXd& y0,
                                const std::vector<double>& ts, const Rk45Options& opts) {
    DenseResult r = integrate_dense_partial(rhs, t0, y0, ts, opts);
    if (r.completed < static_cast<int>(ts.size()))
        throw NumericalError("ode integration stopped early (step underflow or budget)");
    return std::move(r.samples);
}

} // namespace weakident
