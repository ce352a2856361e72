#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <map>
#include <memory>
#include <vector>

#include "weakident/types.hpp"
#include "weakident/weak_system.hpp"
#include "fft_util.hpp"

namespace weakident::detail {

/// Correlates a full data field with a separable kernel via zero-padded FFT,
/// axis by axis, shrinking each processed axis to its subsampled center
/// positions. out(h) = sum_offsets field(center_h + offset) * prod kernel.
class SeparableCorrelator {
public:
    SeparableCorrelator(const GridSpec& grid, const CenterGrid& centers)
        : grid_(grid), centers_(centers) {}

    Eigen::VectorXd apply(const Eigen::ArrayXd& field,
                          const std::vector<Eigen::VectorXd>& kernels) const {
        const int na = grid_.num_axes();
        std::array<int, 3> dims{1, 1, 1};
        for (int a = 0; a < na; ++a) dims[static_cast<std::size_t>(a)] = grid_.axis_count(a);

        std::vector<double> cur(field.data(), field.data() + field.size());
        for (int axis = 0; axis < na; ++axis)
            cur = correlate_axis(cur, dims, na, axis, kernels[static_cast<std::size_t>(axis)]);

        return Eigen::Map<const Eigen::VectorXd>(cur.data(),
                                                 static_cast<Eigen::Index>(cur.size()));
    }

private:
    RealFft1D& plan_for(int size) const {
        auto it = plans_.find(size);
        if (it == plans_.end())
            it = plans_.emplace(size, std::make_unique<RealFft1D>(size)).first;
        return *it->second;
    }

    // Correlates along `axis` and replaces that dimension with the center
    // positions. `dims` is updated in place.
    std::vector<double> correlate_axis(const std::vector<double>& in, std::array<int, 3>& dims,
                                       int num_axes, int axis,
                                       const Eigen::VectorXd& kernel) const {
        const auto& positions = centers_.per_axis[static_cast<std::size_t>(axis)];
        const int n = dims[static_cast<std::size_t>(axis)];
        const int m = (static_cast<int>(kernel.size()) - 1) / 2;
        const int pad = next_fast_size(n + 2 * m);
        RealFft1D& fft = plan_for(pad);
        const int nspec = fft.spectrum_size();

        // Correlation = circular convolution with the index-reversed kernel.
        std::vector<double> kbuf(static_cast<std::size_t>(pad), 0.0);
        kbuf[0] = kernel[m];
        for (int u = 1; u <= m; ++u) {
            kbuf[static_cast<std::size_t>(u)] = kernel[m - u];
            kbuf[static_cast<std::size_t>(pad - u)] = kernel[m + u];
        }
        std::vector<std::complex<double>> kspec(static_cast<std::size_t>(nspec));
        fft.forward(kbuf.data(), kspec.data());

        std::array<std::int64_t, 3> in_stride{1, dims[0],
                                              static_cast<std::int64_t>(dims[0]) * dims[1]};
        std::array<int, 3> out_dims = dims;
        out_dims[static_cast<std::size_t>(axis)] = static_cast<int>(positions.size());
        std::array<std::int64_t, 3> out_stride{1, out_dims[0],
                                               static_cast<std::int64_t>(out_dims[0]) * out_dims[1]};

        std::int64_t total_out = 1;
        for (int a = 0; a < num_axes; ++a) total_out *= out_dims[static_cast<std::size_t>(a)];
        std::vector<double> out(static_cast<std::size_t>(total_out), 0.0);

        // Outer axes: everything except `axis`, at most two of them.
        std::array<int, 2> osize{1, 1};
        std::array<std::int64_t, 2> oin{0, 0}, oout{0, 0};
        int n_outer = 0;
        for (int a = 0; a < num_axes; ++a) {
            if (a == axis) continue;
            osize[static_cast<std::size_t>(n_outer)] = dims[static_cast<std::size_t>(a)];
            oin[static_cast<std::size_t>(n_outer)] = in_stride[static_cast<std::size_t>(a)];
            oout[static_cast<std::size_t>(n_outer)] = out_stride[static_cast<std::size_t>(a)];
            ++n_outer;
        }

        std::vector<double> linebuf(static_cast<std::size_t>(pad));
        std::vector<std::complex<double>> fspec(static_cast<std::size_t>(nspec));
        std::vector<double> lineout(static_cast<std::size_t>(pad));
        const std::int64_t st_in = in_stride[static_cast<std::size_t>(axis)];
        const std::int64_t st_out = out_stride[static_cast<std::size_t>(axis)];

        for (int j = 0; j < osize[1]; ++j) {
            for (int i = 0; i < osize[0]; ++i) {
                const std::int64_t base_in = j * oin[1] + i * oin[0];
                const std::int64_t base_out = j * oout[1] + i * oout[0];
                for (int t = 0; t < n; ++t)
                    linebuf[static_cast<std::size_t>(t)] = in[static_cast<std::size_t>(base_in + t * st_in)];
                std::fill(linebuf.begin() + n, linebuf.end(), 0.0);
                fft.forward(linebuf.data(), fspec.data());
                for (int k = 0; k < nspec; ++k) fspec[static_cast<std::size_t>(k)] *= kspec[static_cast<std::size_t>(k)];
                fft.inverse(fspec.data(), lineout.data());
                for (std::size_t pi = 0; pi < positions.size(); ++pi)
                    out[static_cast<std::size_t>(base_out + static_cast<std::int64_t>(pi) * st_out)] =
                        lineout[static_cast<std::size_t>(positions[pi])];
            }
        }

        dims = out_dims;
        return out;
    }

    const GridSpec& grid_;
    const CenterGrid& centers_;
    mutable std::map<int, std::unique_ptr<RealFft1D>> plans_;
};

/// Monomial field prod_v values_v^(beta_v); ones for the empty monomial.
inline Eigen::ArrayXd monomial_field(const ObservationSet& data, const std::vector<int>& beta) {
    Eigen::ArrayXd field = Eigen::ArrayXd::Ones(data.grid.total_points());
    for (std::size_t v = 0; v < beta.size(); ++v)
        for (int k = 0; k < beta[v]; ++k) field *= data.values[v];
    return field;
}

} // namespace weakident::detail
