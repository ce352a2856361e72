#include "weakident/changepoint.hpp"

#include <limits>

#include "weakident/errors.hpp"

namespace weakident {
namespace {

double line_fit_cost(const Eigen::VectorXd& y, const Eigen::VectorXd& w) {
    // Weighted least squares of y ~ a + b*x.
    double s0 = 0, sx = 0, sxx = 0, sy = 0, sxy = 0;
    for (int i = 0; i < y.size(); ++i) {
        const double wi = w[i];
        if (wi == 0.0) continue;
        const double x = static_cast<double>(i);
        s0 += wi;
        sx += wi * x;
        sxx += wi * x * x;
        sy += wi * y[i];
        sxy += wi * x * y[i];
    }
    const double det = s0 * sxx - sx * sx;
    double a = 0, b = 0;
    if (det != 0.0) {
        a = (sxx * sy - sx * sxy) / det;
        b = (s0 * sxy - sx * sy) / det;
    } else if (s0 > 0.0) {
        a = sy / s0;
    }
    double cost = 0;
    for (int i = 0; i < y.size(); ++i) {
        if (w[i] == 0.0) continue;
        const double r = y[i] - (a + b * i);
        cost += w[i] * r * r;
    }
    return cost;
}

} // namespace

SegmentedFit fit_one_junction(const Eigen::VectorXd& y, const Eigen::VectorXd& weights) {
    const int n = static_cast<int>(y.size());
    if (n < 3) throw InputError("changepoint", "need at least 3 points");
    if (weights.size() != n) throw InputError("changepoint", "weight length mismatch");

    SegmentedFit best;
    best.cost = std::numeric_limits<double>::infinity();
    best.single_line_cost = line_fit_cost(y, weights);

    for (int j = 1; j < n - 1; ++j) {
        // Design columns: 1, (x-j)*[x<=j], (x-j)*[x>j]; 3x3 weighted normal
        // equations solved directly.
        Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
        Eigen::Vector3d atb = Eigen::Vector3d::Zero();
        for (int i = 0; i < n; ++i) {
            const double wi = weights[i];
            if (wi == 0.0) continue;
            Eigen::Vector3d row(1.0, 0.0, 0.0);
            const double d = static_cast<double>(i - j);
            (i <= j ? row[1] : row[2]) = d;
            ata.noalias() += wi * row * row.transpose();
            atb.noalias() += wi * row * y[i];
        }
        const Eigen::Vector3d p = ata.fullPivLu().solve(atb);
        double cost = 0;
        for (int i = 0; i < n; ++i) {
            const double wi = weights[i];
            if (wi == 0.0) continue;
            const double d = static_cast<double>(i - j);
            const double r = y[i] - (p[0] + (i <= j ? p[1] : p[2]) * d);
            cost += wi * r * r;
        }
        if (cost < best.cost) {
            best.cost = cost;
            best.junction = j;
            best.params = p;
        }
    }
    return best;
}

} // namespace weakident
