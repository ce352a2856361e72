#include "weakident/test_function.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "weakident/changepoint.hpp"
#include "weakident/errors.hpp"
#include "fft_util.hpp"

namespace weakident {
namespace {

// d-th derivative of (1-y^2)^p factored as (1-y^2)^(p-d) * q_d(y). Returns
// the coefficients of q_d (ascending powers). The factored form keeps the
// boundary zeros exact for every d < p.
std::vector<double> derivative_poly(int p, int d) {
    std::vector<double> q{1.0};
    for (int k = 0; k < d; ++k) {
        // q_{k+1} = -2(p-k) y q_k + (1-y^2) q_k'
        std::vector<double> next(q.size() + 1, 0.0);
        for (std::size_t i = 0; i < q.size(); ++i) {
            next[i + 1] += -2.0 * (p - k) * q[i];
            if (i >= 1) next[i - 1] += static_cast<double>(i) * q[i];
            if (i + 1 < next.size()) next[i + 1] -= static_cast<double>(i) * q[i];
        }
        q = std::move(next);
    }
    return q;
}

double eval_poly(const std::vector<double>& c, double y) {
    double v = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) v = v * y + c[i];
    return v;
}

} // namespace

TestFunction::TestFunction(std::vector<AxisTestFunction> axes) : axes_(std::move(axes)) {
    if (axes_.empty()) throw InputError("test_function", "at least one axis required");
    for (const auto& a : axes_) {
        if (a.m < 1) throw InputError("test_function", "m must be >= 1");
        if (a.p < 2) throw InputError("test_function", "p must be >= 2");
        if (a.spacing <= 0.0) throw InputError("test_function", "spacing must be > 0");
    }
}

void TestFunction::validate_against(const GridSpec& grid) const {
    if (num_axes() != grid.num_axes())
        throw InputError("test_function", "axis count does not match grid");
    for (int a = 0; a < num_axes(); ++a)
        if (2 * m(a) + 1 > grid.axis_count(a))
            throw InputError("test_function", "test function support exceeds axis");
}

Eigen::VectorXd sample_test_function(const TestFunction& tf, int axis, int derivative_order) {
    const auto& ax = tf.axis(axis);
    if (derivative_order < 0 || derivative_order >= ax.p)
        throw InputError("test_function",
                         "derivative order must satisfy d < p for boundary vanishing");

    const int m = ax.m;
    const int n = 2 * m + 1;
    Eigen::VectorXd out(n);

    // Order-0 normalization: spacing * sum of samples = 1 on this axis.
    double sum0 = 0.0;
    for (int j = -m; j <= m; ++j) {
        const double y = static_cast<double>(j) / m;
        sum0 += std::pow(1.0 - y * y, ax.p);
    }
    const double norm = 1.0 / (ax.spacing * sum0);

    const std::vector<double> q = derivative_poly(ax.p, derivative_order);
    const double a_inv = 1.0 / (m * ax.spacing); // d/ds = a_inv * d/dy
    const double scale = norm * std::pow(a_inv, derivative_order);
    for (int j = -m; j <= m; ++j) {
        const double y = static_cast<double>(j) / m;
        const double envelope = std::pow(1.0 - y * y, ax.p - derivative_order);
        out[j + m] = scale * envelope * eval_poly(q, y);
    }
    return out;
}

SpectrumChangepoint transition_frequency(const ObservationSet& data, int axis) {
    const GridSpec& g = data.grid;
    const int n = g.axis_count(axis);
    if (n < 8) throw InputError("test_function", "axis length must be >= 8");

    std::array<int, 3> dims{1, 1, 1};
    for (int a = 0; a < g.num_axes(); ++a) dims[static_cast<std::size_t>(a)] = g.axis_count(a);

    detail::RealFft1D fft(n);
    const int nmodes = fft.spectrum_size();
    Eigen::VectorXd avg = Eigen::VectorXd::Zero(nmodes);
    std::vector<double> line(static_cast<std::size_t>(n));
    std::vector<std::complex<double>> spec(static_cast<std::size_t>(nmodes));
    long line_count = 0;

    for (const auto& field : data.values) {
        detail::for_each_line(dims, g.num_axes(), axis, [&](std::int64_t base, std::int64_t stride) {
            for (int i = 0; i < n; ++i) line[static_cast<std::size_t>(i)] = field[base + i * stride];
            fft.forward(line.data(), spec.data());
            for (int k = 0; k < nmodes; ++k) avg[k] += std::abs(spec[static_cast<std::size_t>(k)]);
            ++line_count;
        });
    }
    avg /= static_cast<double>(line_count);

    SpectrumChangepoint cp;
    cp.cumulative.resize(nmodes);
    double run = 0.0;
    for (int k = 0; k < nmodes; ++k) {
        run += avg[k];
        cp.cumulative[k] = run;
    }

    const SegmentedFit fit =
        fit_one_junction(cp.cumulative, Eigen::VectorXd::Ones(nmodes));
    cp.fit_cost = fit.cost;
    if (fit.single_line_cost - fit.cost < 0.05 * fit.single_line_cost) {
        cp.fallback = true;
        cp.k_star = std::max(1, n / 10);
    } else {
        cp.k_star = fit.junction;
    }
    cp.k_star = std::clamp(cp.k_star, 1, std::max(1, n / 2 - 1));
    return cp;
}

TestFunctionChoice choose_m_p(int k_star, int axis_count, double spacing, int max_derivative,
                              double tau_hat, double tau_decay, int p_max) {
    (void)spacing; // cancels in the support-width relation
    if (axis_count < 7) throw InputError("test_function", "no admissible support width");
    if (k_star < 1) throw InputError("test_function", "k_star must be >= 1");

    const int m_hi = std::max(1, (axis_count - 1) / 2);
    TestFunctionChoice out;
    for (int p = max_derivative + 2; p <= p_max; ++p) {
        const double m_raw =
            tau_hat * std::sqrt(2.0 * p + 3.0) * axis_count / (2.0 * std::numbers::pi * k_star);
        const int m = std::clamp(static_cast<int>(std::llround(m_raw)), 1, m_hi);
        out = TestFunctionChoice{m, p, false};
        const double decay = std::pow((2.0 * m - 1.0) / (static_cast<double>(m) * m), p);
        if (decay <= tau_decay) return out;
    }
    out.clamped = true;
    return out;
}

std::vector<AxisDesign> design_test_function(const ObservationSet& data, const Dictionary& dict,
                                             double tau_hat, double tau_decay) {
    const GridSpec& g = data.grid;
    std::vector<AxisDesign> designs;
    for (int a = 0; a < g.num_axes(); ++a) {
        AxisDesign d;
        d.changepoint = transition_frequency(data, a);
        const int max_d = g.is_time_axis(a) ? 1 : dict.max_alpha(a);
        d.choice = choose_m_p(d.changepoint.k_star, g.axis_count(a), g.axis_spacing(a), max_d,
                              tau_hat, tau_decay);
        // Keep the bulk of each axis as interior so the subsampled system
        // retains enough independent rows; low-frequency data would otherwise
        // drive the support width toward the half-axis clamp.
        const int m_cap = std::max(1, std::min(g.axis_count(a) / 6, (g.axis_count(a) - 8) / 2));
        if (d.choice.m > m_cap) {
            d.choice.m = m_cap;
            d.choice.clamped = true;
        }
        designs.push_back(std::move(d));
    }
    return designs;
}

TestFunction make_test_function(const GridSpec& grid, const std::vector<AxisDesign>& designs) {
    std::vector<AxisTestFunction> axes;
    for (int a = 0; a < grid.num_axes(); ++a) {
        const auto& d = designs[static_cast<std::size_t>(a)];
        axes.push_back(AxisTestFunction{d.choice.m, d.choice.p, grid.axis_spacing(a)});
    }
    return TestFunction(std::move(axes));
}

} // namespace weakident
