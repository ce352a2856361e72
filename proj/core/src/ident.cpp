#include "weakident/ident.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "weakident/errors.hpp"
#include "weakident/rng.hpp"

namespace weakident {

IdentResult weak_ident(const ObservationSet& data, const IdentOptions& opts) {
    data.validate();
    if (opts.reg.trim_threshold <= 0.0 || opts.reg.trim_threshold >= 1.0)
        throw InputError("config", "trim threshold must be in (0, 1)");
    if (opts.reg.cv_lambda <= 0.0 || opts.reg.cv_lambda >= 1.0)
        throw InputError("config", "cv lambda must be in (0, 1)");

    const GridSpec& grid = data.grid;
    const int sd = grid.spatial_dims;

    Dictionary dict = opts.explicit_features
                          ? Dictionary::from_features(data.num_vars(), sd, opts.alpha_cap,
                                                      opts.beta_cap, *opts.explicit_features)
                          : Dictionary::build(data.num_vars(), sd, opts.alpha_cap, opts.beta_cap);

    const std::vector<AxisDesign> designs =
        design_test_function(data, dict, opts.tau_hat, opts.tau_decay);
    const TestFunction tf = make_test_function(grid, designs);

    IdentResult result;
    for (const auto& d : designs)
        result.axes.push_back(AxisDiagnostics{d.changepoint.k_star, d.changepoint.fallback,
                                              d.choice.m, d.choice.p, d.choice.clamped});
    result.var_names =
        data.var_names.empty() ? default_var_names(data.num_vars(), sd) : data.var_names;

    std::vector<int> foi;
    if (opts.foi_override) {
        for (const auto& f : *opts.foi_override) foi.push_back(dict.index_of(f));
    } else {
        foi = features_of_interest(data.num_vars(), sd, dict);
    }

    // Assemble; for PDE data grow the subsample target until the highly
    // dynamic set is large enough.
    int target = opts.subsample_target;
    WeakSystem ws;
    ScaleTable scales;
    DynamicRegionSet regions;
    CenterGrid centers;
    for (int attempt = 0;; ++attempt) {
        centers = subsample_centers(grid, tf, SubsampleSpec::uniform(target));
        ws = assemble(data, dict, tf, centers);
        scales = leading_scales(data, dict, tf, centers);
        regions = select_regions(scales, foi, opts.ns_bins);
        if (sd == 0 || regions.size() >= opts.min_dynamic_rows ||
            attempt >= opts.max_subsample_retries)
            break;
        target += 20;
        result.warnings.push_back("dynamic set below " + std::to_string(opts.min_dynamic_rows) +
                                  " rows; subsample target raised to " + std::to_string(target));
    }
    result.subsample_target_used = target;
    for (int a = 0; a < grid.num_axes(); ++a) result.center_counts.push_back(centers.count(a));

    const ColumnNormalized cn = column_normalize(ws.W);
    const int K = std::min({opts.reg.max_sparsity, dict.size(), ws.num_rows()});

    // Time-block labels for the CV partitions.
    const auto& tcenters = centers.per_axis[static_cast<std::size_t>(sd)];
    const int num_blocks = std::max(2, std::min(opts.reg.cv_blocks,
                                                static_cast<int>(tcenters.size())));
    const int t_lo = tcenters.front(), t_hi = tcenters.back();
    std::vector<int> row_block(static_cast<std::size_t>(ws.num_rows()), 0);
    for (int h = 0; h < ws.num_rows(); ++h) {
        const int t = ws.rows[static_cast<std::size_t>(h)].it;
        row_block[static_cast<std::size_t>(h)] =
            std::min(num_blocks - 1, (t - t_lo) * num_blocks / std::max(1, t_hi - t_lo + 1));
    }

    for (int v = 0; v < data.num_vars(); ++v) {
        VariableResult vr;
        vr.var = v;
        vr.name = result.var_names[static_cast<std::size_t>(v)];
        const Eigen::VectorXd& b = ws.b[static_cast<std::size_t>(v)];
        const double b_norm = b.norm();
        if (b_norm == 0.0) {
            vr.coeffs.values = Eigen::VectorXd::Zero(dict.size());
            vr.cv_error = 0.0;
            result.warnings.push_back("variable " + vr.name + " has a zero right-hand side");
            result.vars.push_back(std::move(vr));
            continue;
        }
        const Eigen::VectorXd b_unit = b / b_norm;

        // Narrow rows of every column, error-normalized: used to steer the
        // expand step of the per-sparsity refinement and to screen small
        // supports exhaustively.
        const Eigen::VectorXd nmeans = scales.narrow_means(regions.indices);
        const double nmax = nmeans.maxCoeff();
        Eigen::MatrixXd Wn_all(regions.size(), dict.size());
        Eigen::VectorXd bn_rows(regions.size());
        for (int r = 0; r < regions.size(); ++r) {
            const int h = regions.indices[static_cast<std::size_t>(r)];
            for (int l = 0; l < dict.size(); ++l)
                Wn_all(r, l) = ws.W(h, l) / std::max(nmeans[l], nmax > 0 ? 1e-12 * nmax : 1.0);
            bn_rows[r] = b[h];
        }
        Eigen::VectorXd wn_norms(dict.size());
        for (int l = 0; l < dict.size(); ++l) wn_norms[l] = Wn_all.col(l).norm();

        // Best narrow-residual subsets of size 1..3, found exhaustively via
        // the Gram matrix. Greedy pursuit proposals are unreliable when the
        // dictionary is strongly collinear (monomials of trajectory data);
        // for these small supports a complete search is cheap.
        std::vector<int> narrow_blocks(static_cast<std::size_t>(regions.size()));
        for (int r = 0; r < regions.size(); ++r)
            narrow_blocks[static_cast<std::size_t>(r)] =
                row_block[static_cast<std::size_t>(regions.indices[static_cast<std::size_t>(r)])];
        const std::vector<std::vector<int>> screened =
            screen_small_subsets(Wn_all, bn_rows, std::min(3, K), narrow_blocks);

        for (int k = 1; k <= K; ++k) {
            CandidateModel model;
            model.sparsity = k;
            try {
                // Trims the least-contributing feature one at a time until
                // every score clears the threshold; at most |support|-1
                // removals.
                auto trim_stable = [&](std::vector<int> support, NarrowFitResult& fit,
                                       std::vector<std::vector<int>>* history, int* trims) {
                    fit = narrow_fit(ws.W, b, support, regions, scales);
                    while (support.size() > 1) {
                        const Eigen::VectorXd scores =
                            contribution_scores(fit.W_narrow_scaled, fit.c_tilde);
                        std::vector<int> next =
                            trim_once(support, scores, opts.reg.trim_threshold);
                        if (next.size() == support.size()) break;
                        support = std::move(next);
                        if (history) history->push_back(support);
                        if (trims) ++*trims;
                        fit = narrow_fit(ws.W, b, support, regions, scales);
                    }
                    return support;
                };
                auto cv_of = [&](const std::vector<int>& support) {
                    return cross_validation_error(
                        ws.W, b, support, regions, scales, opts.reg.cv_lambda,
                        opts.reg.cv_trials,
                        derive_stream(opts.reg.seed, static_cast<std::uint64_t>(v),
                                      static_cast<std::uint64_t>(k)),
                        row_block, num_blocks);
                };

                // Expand-and-prune refinement after trimming: the pursuit
                // proposal comes from the full system, but on strongly
                // collinear dictionaries it can miss; re-extend the trimmed
                // support with the column most correlated with the narrow
                // residual and keep the change only when cross-validation
                // improves.
                auto refine = [&](std::vector<int> support, NarrowFitResult& fit, double& cv,
                                  std::vector<std::vector<int>>* history, int* trims) {
                    support = trim_stable(std::move(support), fit, history, trims);
                    cv = cv_of(support);
                    for (int round = 0; round < k; ++round) {
                        Eigen::VectorXd resid(Wn_all.rows());
                        for (int r = 0; r < Wn_all.rows(); ++r) {
                            const int h = regions.indices[static_cast<std::size_t>(r)];
                            double pred = 0.0;
                            for (int l : support) pred += ws.W(h, l) * fit.coeffs.values[l];
                            resid[r] = b[h] - pred;
                        }
                        int best_l = -1;
                        double best_corr = 0.0;
                        for (int l = 0; l < dict.size(); ++l) {
                            if (wn_norms[l] == 0.0 ||
                                std::find(support.begin(), support.end(), l) != support.end())
                                continue;
                            const double corr = std::abs(Wn_all.col(l).dot(resid)) / wn_norms[l];
                            if (corr > best_corr) {
                                best_corr = corr;
                                best_l = l;
                            }
                        }
                        if (best_l < 0) break;
                        std::vector<int> extended = support;
                        extended.insert(
                            std::lower_bound(extended.begin(), extended.end(), best_l), best_l);
                        NarrowFitResult fit2;
                        std::vector<int> refined = trim_stable(extended, fit2, nullptr, nullptr);
                        if (refined == support) break;
                        const double cv2 = cv_of(refined);
                        if (cv2 >= cv * (1.0 - 1e-9)) break;
                        support = std::move(refined);
                        fit = std::move(fit2);
                        cv = cv2;
                        if (history) history->push_back(support);
                    }
                    return support;
                };

                std::vector<int> sp_support = subspace_pursuit(cn.W, b_unit, k);
                model.support_history.push_back(sp_support);
                NarrowFitResult fit;
                double cv = 0.0;
                std::vector<int> support = refine(std::move(sp_support), fit, cv,
                                                  &model.support_history,
                                                  &model.trim_iterations);

                // Companion proposals, kept only when they cross-validate
                // strictly better: greedy forward selection, and for small k
                // the exhaustive cross-block screen.
                std::vector<std::vector<int>> alternates;
                alternates.push_back(matching_pursuit(cn.W, b_unit, k));
                for (const auto& s : screened)
                    if (static_cast<int>(s.size()) == k) alternates.push_back(s);
                std::set<std::vector<int>> tried{support};
                for (auto& alt : alternates) {
                    if (!tried.insert(alt).second) continue;
                    NarrowFitResult alt_fit;
                    double alt_cv = 0.0;
                    std::vector<int> alt_refined =
                        refine(std::move(alt), alt_fit, alt_cv, nullptr, nullptr);
                    if (alt_cv < cv) {
                        support = std::move(alt_refined);
                        fit = std::move(alt_fit);
                        cv = alt_cv;
                        model.support_history.push_back(support);
                    }
                }

                model.support = support;
                model.coeffs = fit.coeffs;
                model.cv_error = cv;
            } catch (const std::exception& e) {
                model.failed = true;
                model.failure = e.what();
            }
            vr.models.push_back(std::move(model));
        }

        // Minimum-CV model wins; ties resolve to the smallest sparsity.
        double best_cv = std::numeric_limits<double>::infinity();
        int best_k = 0;
        for (const auto& m : vr.models) {
            if (m.failed) continue;
            if (m.cv_error < best_cv) {
                best_cv = m.cv_error;
                best_k = m.sparsity;
            }
        }
        if (best_k == 0)
            throw NumericalError("every sparsity level failed for variable " + vr.name);
        const CandidateModel& best = vr.models[static_cast<std::size_t>(best_k - 1)];
        vr.best_sparsity = best_k;
        vr.coeffs = best.coeffs;
        vr.cv_error = best.cv_error;
        vr.support = best.support;
        result.vars.push_back(std::move(vr));
    }

    result.system = std::move(ws);
    result.regions = std::move(regions);
    return result;
}

} // namespace weakident
