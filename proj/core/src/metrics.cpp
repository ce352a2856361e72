#include "weakident/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "weakident/errors.hpp"
#include "weakident/rng.hpp"

namespace weakident {

ErrorReport error_report(const std::vector<Coefficients>& c_true,
                         const std::vector<Coefficients>& c_hat, const WeakSystem& system,
                         std::optional<double> e_dyn) {
    if (c_true.size() != c_hat.size() || c_true.empty())
        throw InputError("metrics", "coefficient vector count mismatch");
    for (std::size_t v = 0; v < c_true.size(); ++v)
        if (c_true[v].values.size() != c_hat[v].values.size())
            throw InputError("metrics", "coefficient vector length mismatch");

    double true_sq = 0.0, diff_sq = 0.0, e_inf = 0.0;
    long n_true = 0, n_found = 0, n_both = 0;
    for (std::size_t v = 0; v < c_true.size(); ++v) {
        const auto& t = c_true[v].values;
        const auto& h = c_hat[v].values;
        true_sq += t.squaredNorm();
        diff_sq += (t - h).squaredNorm();
        for (Eigen::Index l = 0; l < t.size(); ++l) {
            const bool in_true = t[l] != 0.0;
            const bool in_found = h[l] != 0.0;
            n_true += in_true;
            n_found += in_found;
            n_both += in_true && in_found;
            if (in_true) e_inf = std::max(e_inf, std::abs(t[l] - h[l]) / std::abs(t[l]));
        }
    }
    if (true_sq == 0.0) throw InputError("metrics", "true coefficients are identically zero");

    ErrorReport r;
    r.e2 = std::sqrt(diff_sq / true_sq);
    r.e_inf = e_inf;
    r.tpr = n_true > 0 ? static_cast<double>(n_both) / n_true : 0.0;
    r.ppv = n_found > 0 ? static_cast<double>(n_both) / n_found : 0.0;

    double res_sq = 0.0, b_sq = 0.0;
    for (std::size_t v = 0; v < c_hat.size(); ++v) {
        res_sq += (system.W * c_hat[v].values - system.b[v]).squaredNorm();
        b_sq += system.b[v].squaredNorm();
    }
    r.e_res = b_sq > 0.0 ? std::sqrt(res_sq / b_sq) : 0.0;
    r.e_dyn = e_dyn;
    return r;
}

double dynamic_error(const ObservationSet& forward, const ObservationSet& clean) {
    if (forward.num_vars() != clean.num_vars())
        throw InputError("metrics", "trajectory variable count mismatch");
    const Eigen::Index n = clean.values[0].size();

    double clean_max = 0.0;
    for (const auto& f : clean.values) clean_max = std::max(clean_max, f.abs().maxCoeff());
    const double blowup = 1e6 * std::max(clean_max, 1.0);

    // Compare up to just before the first blow-up sample.
    Eigen::Index cutoff = std::min<Eigen::Index>(n, forward.values[0].size());
    for (const auto& f : forward.values)
        for (Eigen::Index i = 0; i < cutoff; ++i)
            if (!std::isfinite(f[i]) || std::abs(f[i]) > blowup) {
                cutoff = std::min(cutoff, i);
                break;
            }
    if (cutoff == 0) return std::numeric_limits<double>::infinity();

    double acc = 0.0;
    for (int v = 0; v < clean.num_vars(); ++v)
        acc += (forward.values[static_cast<std::size_t>(v)].head(cutoff) -
                clean.values[static_cast<std::size_t>(v)].head(cutoff))
                   .square()
                   .sum();
    return acc / static_cast<double>(cutoff * clean.num_vars());
}

NoiseErrorEstimate theorem1_validation(const ObservationSet& clean, const Coefficients& true_model,
                                       const Dictionary& dict, const TestFunction& tf,
                                       const std::vector<Center>& centers, double sigma,
                                       int mc_trials, std::uint64_t seed) {
    clean.validate();
    if (clean.num_vars() != 1 || clean.grid.spatial_dims > 1)
        throw InputError("metrics", "theorem validation covers one variable in 0D/1D");
    tf.validate_against(clean.grid);

    const GridSpec& g = clean.grid;
    const int sd = g.spatial_dims;
    const Eigen::ArrayXd& u = clean.values[0];
    const double cellvol = g.cell_volume();
    const int mt = tf.m(sd);
    const int mx = sd == 1 ? tf.m(0) : 0;
    const int region_points = (2 * mx + 1) * (2 * mt + 1);

    const std::vector<int> support = true_model.support();
    std::vector<Eigen::VectorXd> kx_for; // spatial kernel per support feature
    for (int l : support)
        kx_for.push_back(sd == 1 ? sample_test_function(tf, 0, dict.feature(l).alpha[0])
                                 : Eigen::VectorXd::Ones(1));
    const Eigen::VectorXd kt0 = sample_test_function(tf, sd, 0);
    const Eigen::VectorXd kt1 = sample_test_function(tf, sd, 1);
    const Eigen::VectorXd kx0 = sd == 1 ? sample_test_function(tf, 0, 0) : Eigen::VectorXd::Ones(1);

    const int H = static_cast<int>(centers.size());
    NoiseErrorEstimate est;
    est.s_h_star.resize(H);
    est.empirical_variance.resize(H);
    est.ratio.resize(H);

    // G(h, j) multiplies epsilon_j in the noise-linear expansion of e_h.
    std::vector<Eigen::ArrayXd> G(static_cast<std::size_t>(H));
    double sbar = 0.0;
    for (int h = 0; h < H; ++h) {
        const Center& c = centers[static_cast<std::size_t>(h)];
        Eigen::ArrayXd gh = Eigen::ArrayXd::Zero(region_points);
        int idx = 0;
        for (int ot = -mt; ot <= mt; ++ot) {
            for (int ox = -mx; ox <= mx; ++ox, ++idx) {
                const std::int64_t flat = g.flat_index(c.ix + ox, 0, c.it + ot);
                double val = kx0[ox + mx] * kt1[ot + mt]; // the b-side term
                for (std::size_t s = 0; s < support.size(); ++s) {
                    const FeatureSpec& f = dict.feature(support[s]);
                    const int beta = f.beta[0];
                    if (beta == 0) continue;
                    const double sign = f.total_derivative() % 2 == 0 ? 1.0 : -1.0;
                    const double upow = beta >= 2 ? std::pow(u[flat], beta - 1) : 1.0;
                    val += sign * true_model.values[support[s]] * beta * upow *
                           kx_for[s][ox + mx] * kt0[ot + mt];
                }
                gh[idx] = val;
                sbar = std::max(sbar, std::abs(val));
            }
        }
        est.s_h_star[h] = cellvol * cellvol * gh.square().sum();
        G[static_cast<std::size_t>(h)] = std::move(gh);
    }
    est.s_bar_star = sbar;

    // Monte-Carlo with an independent noise substream per row: per-row
    // variances do not need a jointly consistent field.
    est.max_bound_ratio = 0.0;
    for (int h = 0; h < H; ++h) {
        const Center& c = centers[static_cast<std::size_t>(h)];
        Rng rng(derive_stream(seed, static_cast<std::uint64_t>(h)));
        double sum = 0.0, sum_sq = 0.0;
        Eigen::ArrayXd eps(region_points);
        for (int trial = 0; trial < mc_trials; ++trial) {
            for (int i = 0; i < region_points; ++i) eps[i] = sigma * rng.gaussian();
            // e_h^noise computed exactly from the full expansion, not just the
            // linear term: sum over region of feature differences.
            double e = 0.0;
            int idx = 0;
            for (int ot = -mt; ot <= mt; ++ot) {
                for (int ox = -mx; ox <= mx; ++ox, ++idx) {
                    const std::int64_t flat = g.flat_index(c.ix + ox, 0, c.it + ot);
                    double val = eps[idx] * kx0[ox + mx] * kt1[ot + mt];
                    for (std::size_t s = 0; s < support.size(); ++s) {
                        const FeatureSpec& f = dict.feature(support[s]);
                        const int beta = f.beta[0];
                        if (beta == 0) continue;
                        const double sign = f.total_derivative() % 2 == 0 ? 1.0 : -1.0;
                        const double diff =
                            std::pow(u[flat] + eps[idx], beta) - std::pow(u[flat], beta);
                        val += sign * true_model.values[support[s]] * diff * kx_for[s][ox + mx] *
                               kt0[ot + mt];
                    }
                    e += val;
                }
            }
            e *= cellvol;
            sum += e;
            sum_sq += e * e;
            const double eps_max = eps.abs().maxCoeff();
            if (sbar > 0.0 && eps_max > 0.0)
                est.max_bound_ratio = std::max(
                    est.max_bound_ratio,
                    std::abs(e) / (sbar * cellvol * region_points * eps_max));
        }
        const double mean = sum / mc_trials;
        est.empirical_variance[h] = sum_sq / mc_trials - mean * mean;
        const double expected = sigma * sigma * est.s_h_star[h];
        est.ratio[h] = expected > 0.0 ? est.empirical_variance[h] / expected
                                      : (est.empirical_variance[h] == 0.0 ? 1.0 : 0.0);
    }
    return est;
}

} // namespace weakident
