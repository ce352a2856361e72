#include "weakident/regions.hpp"

#include <algorithm>
#include <cmath>

#include "weakident/changepoint.hpp"
#include "weakident/errors.hpp"
#include "correlator.hpp"

namespace weakident {

Eigen::VectorXd ScaleTable::narrow_means(const std::vector<int>& row_indices) const {
    Eigen::VectorXd means = Eigen::VectorXd::Zero(s.cols());
    if (row_indices.empty()) return means;
    for (int h : row_indices) means += s.row(h).transpose();
    return means / static_cast<double>(row_indices.size());
}

ScaleTable leading_scales(const ObservationSet& data, const Dictionary& dict,
                          const TestFunction& tf, const CenterGrid& centers) {
    data.validate();
    tf.validate_against(data.grid);

    const GridSpec& g = data.grid;
    const int H = centers.rows();
    const int L = dict.size();
    const int sd = g.spatial_dims;
    const double cellvol = g.cell_volume();

    ScaleTable table;
    table.s.resize(H, L);

    detail::SeparableCorrelator corr(g, centers);
    std::vector<Eigen::VectorXd> kernel0;
    for (int a = 0; a <= sd; ++a) kernel0.push_back(sample_test_function(tf, a, 0));

    for (int l = 0; l < L; ++l) {
        const FeatureSpec& f = dict.feature(l);
        const int degree = f.total_degree();
        if (degree == 0) {
            table.s.col(l).setOnes();
            continue;
        }
        // Lower the exponent of the variable with the largest power
        // (ties break to the first variable).
        std::vector<int> lowered = f.beta;
        int vmax = 0;
        for (std::size_t v = 1; v < lowered.size(); ++v)
            if (lowered[v] > lowered[static_cast<std::size_t>(vmax)]) vmax = static_cast<int>(v);
        lowered[static_cast<std::size_t>(vmax)] -= 1;

        Eigen::ArrayXd field = detail::monomial_field(data, lowered);
        if (!field.isFinite().all())
            throw NumericalError("monomial field overflow at feature index " + std::to_string(l));

        std::vector<Eigen::VectorXd> ker;
        for (int a = 0; a < sd; ++a)
            ker.push_back(sample_test_function(tf, a, f.alpha[static_cast<std::size_t>(a)]));
        ker.push_back(kernel0[static_cast<std::size_t>(sd)]);

        table.s.col(l) = degree * (cellvol * corr.apply(field, ker)).cwiseAbs();
    }

    table.column_means_full = table.s.colwise().mean();
    return table;
}

std::vector<int> features_of_interest(int num_vars, int spatial_dims, const Dictionary& dict) {
    std::vector<FeatureSpec> wanted;
    auto add = [&wanted](std::vector<int> alpha, std::vector<int> beta) {
        wanted.push_back(FeatureSpec{std::move(alpha), std::move(beta)});
    };

    if (spatial_dims == 0) {
        // Degree-2 pure monomials of each variable.
        for (int v = 0; v < num_vars; ++v) {
            std::vector<int> beta(static_cast<std::size_t>(num_vars), 0);
            beta[static_cast<std::size_t>(v)] = 2;
            add({}, std::move(beta));
        }
    } else if (spatial_dims == 1 && num_vars == 1) {
        add({1}, {2});
    } else if (spatial_dims == 1 && num_vars == 2) {
        add({1}, {2, 0});
        add({1}, {0, 2});
    } else if (spatial_dims == 2 && num_vars == 1) {
        add({1, 0}, {2});
        add({0, 1}, {2});
        add({1, 1}, {3});
    } else if (spatial_dims == 2 && num_vars == 2) {
        add({1, 0}, {2, 0});
        add({0, 1}, {2, 0});
        add({1, 0}, {0, 2});
        add({0, 1}, {0, 2});
        add({1, 0}, {2, 1});
        add({0, 1}, {1, 2});
    } else {
        throw InputError("feature", "no feature-of-interest set for this variable count");
    }

    std::vector<int> indices;
    for (const auto& f : wanted) indices.push_back(dict.index_of(f));
    return indices;
}

DynamicRegionSet select_regions(const ScaleTable& scales, const std::vector<int>& foi, int bins) {
    if (foi.empty()) throw InputError("regions", "need at least one feature of interest");
    if (bins < 3) throw InputError("regions", "need at least 3 histogram bins");

    const int H = static_cast<int>(scales.s.rows());
    DynamicRegionSet out;
    out.bins = bins;
    out.sbar = Eigen::VectorXd::Zero(H);
    for (int l : foi) out.sbar += scales.s.col(l).cwiseAbs();
    out.sbar /= static_cast<double>(foi.size());

    const double lo = out.sbar.minCoeff();
    const double hi = out.sbar.maxCoeff();
    if (hi <= lo) {
        out.degenerate = true;
        out.gamma = lo;
        out.indices.resize(static_cast<std::size_t>(H));
        for (int h = 0; h < H; ++h) out.indices[static_cast<std::size_t>(h)] = h;
        return out;
    }

    const double width = (hi - lo) / bins;
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(bins);
    for (int h = 0; h < H; ++h) {
        int bin = static_cast<int>((out.sbar[h] - lo) / width);
        bin = std::clamp(bin, 0, bins - 1); // right-closed last bin
        counts[bin] += 1.0;
    }

    Eigen::VectorXd cumulative(bins);
    double run = 0.0;
    for (int j = 0; j < bins; ++j) {
        run += counts[j];
        cumulative[j] = run;
    }
    // Relative squared error; cumulative counts of zero are skipped.
    Eigen::VectorXd weights(bins);
    for (int j = 0; j < bins; ++j)
        weights[j] = cumulative[j] > 0.0 ? 1.0 / (cumulative[j] * cumulative[j]) : 0.0;

    const SegmentedFit fit = fit_one_junction(cumulative, weights);
    out.gamma = lo + fit.junction * width; // left edge of the junction bin

    for (int h = 0; h < H; ++h)
        if (out.sbar[h] >= out.gamma) out.indices.push_back(h);
    return out;
}

} // namespace weakident
