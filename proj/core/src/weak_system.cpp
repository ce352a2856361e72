#include "weakident/weak_system.hpp"

#include <cmath>
#include <map>

#include "weakident/errors.hpp"
#include "correlator.hpp"

namespace weakident {

CenterGrid subsample_centers(const GridSpec& grid, const TestFunction& tf,
                             const SubsampleSpec& spec) {
    grid.validate();
    tf.validate_against(grid);

    CenterGrid cg;
    for (int a = 0; a < grid.num_axes(); ++a) {
        const int count = grid.axis_count(a);
        const int m = tf.m(a);
        if (count <= 2 * m + 1)
            throw InputError("subsample", "no interior centers: axis count <= 2m+1");
        const int target = spec.target_for_axis(grid, a);
        if (target < 1) throw InputError("subsample", "target must be >= 1");
        const int stride = std::max(1, count / target);
        const int interior = count - 2 * m - 1;
        const int n = (interior + stride - 1) / stride + 1;

        std::vector<int> pos(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j)
            pos[static_cast<std::size_t>(j)] =
                m + static_cast<int>(std::llround(static_cast<double>(j) * interior / (n - 1)));
        cg.per_axis.push_back(std::move(pos));
    }

    const auto& ax = cg.per_axis;
    const int sd = grid.spatial_dims;
    const auto& tpos = ax[static_cast<std::size_t>(sd)];
    for (int tp : tpos) {
        if (sd == 0) {
            cg.centers.push_back(Center{0, 0, tp});
        } else if (sd == 1) {
            for (int xp : ax[0]) cg.centers.push_back(Center{xp, 0, tp});
        } else {
            for (int yp : ax[1])
                for (int xp : ax[0]) cg.centers.push_back(Center{xp, yp, tp});
        }
    }
    return cg;
}

namespace {

// Per-(axis, derivative-order) kernel cache for one assembly pass.
class KernelCache {
public:
    explicit KernelCache(const TestFunction& tf) : tf_(tf) {}
    const Eigen::VectorXd& get(int axis, int order) {
        auto key = std::make_pair(axis, order);
        auto it = cache_.find(key);
        if (it == cache_.end())
            it = cache_.emplace(key, sample_test_function(tf_, axis, order)).first;
        return it->second;
    }

private:
    const TestFunction& tf_;
    std::map<std::pair<int, int>, Eigen::VectorXd> cache_;
};

} // namespace

WeakSystem assemble(const ObservationSet& data, const Dictionary& dict, const TestFunction& tf,
                    const CenterGrid& centers) {
    data.validate();
    tf.validate_against(data.grid);
    if (dict.num_vars() != data.num_vars())
        throw InputError("assemble", "dictionary/data variable count mismatch");
    if (dict.spatial_dims() != data.grid.spatial_dims)
        throw InputError("assemble", "dictionary/data dimensionality mismatch");

    const GridSpec& g = data.grid;
    const int H = centers.rows();
    const int L = dict.size();
    const double cellvol = g.cell_volume();
    const int sd = g.spatial_dims;

    WeakSystem ws;
    ws.W.resize(H, L);
    ws.rows = centers.centers;
    ws.dict = dict;
    ws.tf = tf;
    ws.grid = g;

    detail::SeparableCorrelator corr(g, centers);
    KernelCache kernels(tf);

    // Features with equal beta are contiguous in dictionary order, so each
    // monomial field is built once per group.
    int l = 0;
    while (l < L) {
        const std::vector<int>& beta = dict.feature(l).beta;
        int end = l;
        while (end < L && dict.feature(end).beta == beta) ++end;

        Eigen::ArrayXd field = detail::monomial_field(data, beta);
        if (!field.isFinite().all())
            throw NumericalError("monomial field overflow at feature index " + std::to_string(l));

        for (int f = l; f < end; ++f) {
            const FeatureSpec& spec = dict.feature(f);
            std::vector<Eigen::VectorXd> ker;
            for (int a = 0; a < sd; ++a)
                ker.push_back(kernels.get(a, spec.alpha[static_cast<std::size_t>(a)]));
            ker.push_back(kernels.get(sd, 0));
            const double sign = spec.total_derivative() % 2 == 0 ? 1.0 : -1.0;
            ws.W.col(f) = sign * cellvol * corr.apply(field, ker);
        }
        l = end;
    }

    // b_h = -sum U * dphi/dt * cellvol, one right-hand side per variable.
    std::vector<Eigen::VectorXd> tker;
    for (int a = 0; a < sd; ++a) tker.push_back(kernels.get(a, 0));
    tker.push_back(kernels.get(sd, 1));
    for (int v = 0; v < data.num_vars(); ++v)
        ws.b.push_back(-cellvol * corr.apply(data.values[static_cast<std::size_t>(v)], tker));

    for (const auto& bv : ws.b)
        if (!bv.allFinite()) throw NumericalError("non-finite right-hand side");
    if (!ws.W.allFinite()) throw NumericalError("non-finite feature matrix");
    return ws;
}

namespace {

double direct_sum(const ObservationSet& data, const std::vector<int>* beta, int var,
                  const std::vector<int>& orders, const TestFunction& tf, const Center& c) {
    const GridSpec& g = data.grid;
    const int sd = g.spatial_dims;
    std::vector<Eigen::VectorXd> ker;
    for (int a = 0; a <= sd; ++a)
        ker.push_back(sample_test_function(tf, a, orders[static_cast<std::size_t>(a)]));

    const int mx = sd >= 1 ? tf.m(0) : 0;
    const int my = sd == 2 ? tf.m(1) : 0;
    const int mt = tf.m(sd);

    double acc = 0.0;
    for (int ot = -mt; ot <= mt; ++ot) {
        const double kt = ker[static_cast<std::size_t>(sd)][ot + mt];
        for (int oy = -my; oy <= my; ++oy) {
            const double ky = sd == 2 ? ker[1][oy + my] : 1.0;
            for (int ox = -mx; ox <= mx; ++ox) {
                const double kx = sd >= 1 ? ker[0][ox + mx] : 1.0;
                const std::int64_t idx = g.flat_index(c.ix + ox, c.iy + oy, c.it + ot);
                double val;
                if (beta) {
                    val = 1.0;
                    for (std::size_t v = 0; v < beta->size(); ++v)
                        for (int k = 0; k < (*beta)[v]; ++k) val *= data.values[v][idx];
                } else {
                    val = data.values[static_cast<std::size_t>(var)][idx];
                }
                acc += val * kx * ky * kt;
            }
        }
    }
    return acc * g.cell_volume();
}

} // namespace

double direct_quadrature_reference(const ObservationSet& data, const FeatureSpec& feature,
                                   const TestFunction& tf, const Center& center) {
    const int sd = data.grid.spatial_dims;
    std::vector<int> orders(feature.alpha.begin(), feature.alpha.end());
    orders.push_back(0); // order-0 time factor
    const double sign = feature.total_derivative() % 2 == 0 ? 1.0 : -1.0;
    (void)sd;
    return sign * direct_sum(data, &feature.beta, -1, orders, tf, center);
}

double direct_time_rhs_reference(const ObservationSet& data, int var, const TestFunction& tf,
                                 const Center& center) {
    std::vector<int> orders(static_cast<std::size_t>(data.grid.spatial_dims), 0);
    orders.push_back(1);
    return -direct_sum(data, nullptr, var, orders, tf, center);
}

} // namespace weakident
