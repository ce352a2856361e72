#include "weakident/regression.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "weakident/errors.hpp"
#include "weakident/rng.hpp"

namespace weakident {

ColumnNormalized column_normalize(const Eigen::MatrixXd& W) {
    ColumnNormalized out;
    out.norms = W.colwise().norm();
    for (int l = 0; l < W.cols(); ++l)
        if (out.norms[l] == 0.0)
            throw NumericalError("zero column in feature matrix (degenerate feature " +
                                 std::to_string(l) + ")");
    out.W = W.array().rowwise() / out.norms.transpose().array();
    return out;
}

Eigen::VectorXd solve_least_squares(const Eigen::MatrixXd& A, const Eigen::VectorXd& rhs,
                                    bool* regularized) {
    if (regularized) *regularized = false;
    // Equilibrate columns first; least-squares solutions are exactly
    // column-scale covariant, and this keeps rank detection meaningful when
    // error normalization spreads column magnitudes over many decades.
    Eigen::VectorXd norms = A.colwise().norm();
    Eigen::VectorXd safe = norms;
    for (int i = 0; i < safe.size(); ++i)
        if (safe[i] == 0.0) safe[i] = 1.0;
    const Eigen::MatrixXd Aeq = A.array().rowwise() / safe.transpose().array();

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Aeq);
    Eigen::VectorXd x;
    if (qr.rank() == Aeq.cols()) {
        x = qr.solve(rhs);
    } else {
        if (regularized) *regularized = true;
        double max_sq = 0.0;
        for (int i = 0; i < Aeq.cols(); ++i) max_sq = std::max(max_sq, Aeq.col(i).squaredNorm());
        const double ridge = 1e-10 * std::max(max_sq, 1.0);
        Eigen::MatrixXd gram = Aeq.transpose() * Aeq;
        gram.diagonal().array() += ridge;
        x = gram.ldlt().solve(Aeq.transpose() * rhs);
    }
    return x.array() / safe.array();
}

namespace {

// Indices of the k largest |values|, lowest index first among ties.
std::vector<int> top_k_by_magnitude(const Eigen::VectorXd& values, int k) {
    std::vector<int> idx(static_cast<std::size_t>(values.size()));
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&values](int a, int b) {
        const double ma = std::abs(values[a]), mb = std::abs(values[b]);
        if (ma != mb) return ma > mb;
        return a < b;
    });
    idx.resize(static_cast<std::size_t>(std::min<std::size_t>(idx.size(), static_cast<std::size_t>(k))));
    std::sort(idx.begin(), idx.end());
    return idx;
}

Eigen::MatrixXd gather_columns(const Eigen::MatrixXd& W, const std::vector<int>& cols) {
    Eigen::MatrixXd sub(W.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < cols.size(); ++i) sub.col(static_cast<Eigen::Index>(i)) = W.col(cols[i]);
    return sub;
}

} // namespace

std::vector<int> subspace_pursuit(const Eigen::MatrixXd& Wn, const Eigen::VectorXd& b_unit,
                                  int k) {
    const int L = static_cast<int>(Wn.cols());
    if (k < 1) throw InputError("regression", "sparsity must be >= 1");
    if (k > L || k > Wn.rows()) throw InputError("regression", "sparsity exceeds system size");
    if (k == L) {
        std::vector<int> all(static_cast<std::size_t>(L));
        std::iota(all.begin(), all.end(), 0);
        return all;
    }

    auto residual_for = [&](const std::vector<int>& support, Eigen::VectorXd& coeffs) {
        const Eigen::MatrixXd sub = gather_columns(Wn, support);
        coeffs = solve_least_squares(sub, b_unit);
        return (b_unit - sub * coeffs).eval();
    };

    std::vector<int> support = top_k_by_magnitude(Wn.transpose() * b_unit, k);
    Eigen::VectorXd coeffs;
    Eigen::VectorXd resid = residual_for(support, coeffs);
    double resid_norm = resid.norm();

    for (int iter = 0; iter < 20; ++iter) {
        // Expand by the k columns most correlated with the residual.
        const std::vector<int> extra = top_k_by_magnitude(Wn.transpose() * resid, k);
        std::vector<int> merged = support;
        merged.insert(merged.end(), extra.begin(), extra.end());
        std::sort(merged.begin(), merged.end());
        merged.erase(std::unique(merged.begin(), merged.end()), merged.end());

        const Eigen::MatrixXd sub = gather_columns(Wn, merged);
        const Eigen::VectorXd x = solve_least_squares(sub, b_unit);
        const std::vector<int> keep = top_k_by_magnitude(x, k);
        std::vector<int> candidate(keep.size());
        for (std::size_t i = 0; i < keep.size(); ++i)
            candidate[i] = merged[static_cast<std::size_t>(keep[i])];
        std::sort(candidate.begin(), candidate.end());

        Eigen::VectorXd cand_coeffs;
        const Eigen::VectorXd cand_resid = residual_for(candidate, cand_coeffs);
        const double cand_norm = cand_resid.norm();
        if (cand_norm >= resid_norm * (1.0 - 1e-12)) break;
        support = std::move(candidate);
        resid = cand_resid;
        resid_norm = cand_norm;
    }
    return support;
}

std::vector<int> matching_pursuit(const Eigen::MatrixXd& Wn, const Eigen::VectorXd& b_unit,
                                  int k) {
    const int L = static_cast<int>(Wn.cols());
    if (k < 1) throw InputError("regression", "sparsity must be >= 1");
    if (k > L || k > Wn.rows()) throw InputError("regression", "sparsity exceeds system size");

    std::vector<int> support;
    Eigen::VectorXd resid = b_unit;
    for (int step = 0; step < k; ++step) {
        int best = -1;
        double best_corr = -1.0;
        for (int l = 0; l < L; ++l) {
            if (std::find(support.begin(), support.end(), l) != support.end()) continue;
            const double corr = std::abs(Wn.col(l).dot(resid));
            if (corr > best_corr) {
                best_corr = corr;
                best = l;
            }
        }
        support.insert(std::lower_bound(support.begin(), support.end(), best), best);
        const Eigen::MatrixXd sub = gather_columns(Wn, support);
        resid = b_unit - sub * solve_least_squares(sub, b_unit);
    }
    return support;
}

namespace {

// Gram pieces of one row group.
struct GroupGram {
    Eigen::MatrixXd G;
    Eigen::VectorXd g;
    double bb = 0.0;
};

// Cross-residual of the subset solved on `fit`, evaluated on `score`;
// infinity when the subset is numerically singular on the fit side.
template <int N>
double cross_residual(const GroupGram& fit, const GroupGram& score, const std::array<int, N>& idx) {
    Eigen::Matrix<double, N, N> A;
    Eigen::Matrix<double, N, 1> rhs;
    for (int a = 0; a < N; ++a) {
        rhs[a] = fit.g[idx[static_cast<std::size_t>(a)]];
        for (int c = 0; c < N; ++c)
            A(a, c) = fit.G(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(c)]);
    }
    double diag_prod = 1.0;
    for (int a = 0; a < N; ++a) diag_prod *= A(a, a);
    if (diag_prod <= 0.0) return std::numeric_limits<double>::infinity();
    const double det = A.determinant();
    if (std::abs(det) <= 1e-12 * diag_prod) return std::numeric_limits<double>::infinity();
    const Eigen::Matrix<double, N, 1> c = A.inverse() * rhs;
    double quad = score.bb;
    for (int a = 0; a < N; ++a) {
        quad -= 2.0 * c[a] * score.g[idx[static_cast<std::size_t>(a)]];
        for (int d = 0; d < N; ++d)
            quad += c[a] * c[d] *
                    score.G(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(d)]);
    }
    return quad;
}

// Bounded best-Q collector, deterministic ordering.
class TopQ {
public:
    explicit TopQ(int q) : q_(static_cast<std::size_t>(q)) {}
    void offer(double score, std::vector<int> subset) {
        if (!std::isfinite(score)) return;
        entries_.emplace_back(score, std::move(subset));
        std::push_heap(entries_.begin(), entries_.end(), less_);
        if (entries_.size() > q_) {
            std::pop_heap(entries_.begin(), entries_.end(), less_);
            entries_.pop_back();
        }
    }
    std::vector<std::vector<int>> sorted() {
        std::sort(entries_.begin(), entries_.end(), less_);
        std::vector<std::vector<int>> out;
        for (auto& [s, v] : entries_) out.push_back(std::move(v));
        return out;
    }

private:
    static bool less_first(const std::pair<double, std::vector<int>>& a,
                           const std::pair<double, std::vector<int>>& b) {
        if (a.first != b.first) return a.first < b.first;
        return a.second < b.second;
    }
    static constexpr auto less_ = &TopQ::less_first;
    std::size_t q_;
    std::vector<std::pair<double, std::vector<int>>> entries_;
};

} // namespace

std::vector<std::vector<int>> screen_small_subsets(const Eigen::MatrixXd& W,
                                                   const Eigen::VectorXd& b, int max_size,
                                                   const std::vector<int>& row_block,
                                                   int top_q) {
    const int L = static_cast<int>(W.cols());
    const int n = static_cast<int>(W.rows());
    max_size = std::clamp(max_size, 0, 3);
    std::vector<std::vector<int>> out;
    if (max_size == 0 || n == 0) return out;

    // Per-block Grams over four row groups, then every balanced 2+2 split.
    constexpr int kGroups = 4;
    GroupGram groups[kGroups];
    for (auto& gg : groups) {
        gg.G = Eigen::MatrixXd::Zero(L, L);
        gg.g = Eigen::VectorXd::Zero(L);
    }
    for (int r = 0; r < n; ++r) {
        const int gidx = ((row_block[static_cast<std::size_t>(r)] % kGroups) + kGroups) % kGroups;
        GroupGram& gg = groups[gidx];
        gg.G.noalias() += W.row(r).transpose() * W.row(r);
        gg.g.noalias() += W.row(r).transpose() * b[r];
        gg.bb += b[r] * b[r];
    }
    static const int splits[3][4] = {{0, 1, 2, 3}, {0, 2, 1, 3}, {0, 3, 1, 2}};
    std::vector<std::pair<GroupGram, GroupGram>> folds;
    for (const auto& sp : splits) {
        GroupGram a, c;
        a.G = groups[sp[0]].G + groups[sp[1]].G;
        a.g = groups[sp[0]].g + groups[sp[1]].g;
        a.bb = groups[sp[0]].bb + groups[sp[1]].bb;
        c.G = groups[sp[2]].G + groups[sp[3]].G;
        c.g = groups[sp[2]].g + groups[sp[3]].g;
        c.bb = groups[sp[2]].bb + groups[sp[3]].bb;
        folds.emplace_back(std::move(a), std::move(c));
    }

    auto score = [&folds]<int N>(const std::array<int, N>& idx) {
        double total = 0.0;
        for (const auto& [a, c] : folds)
            total += cross_residual<N>(a, c, idx) + cross_residual<N>(c, a, idx);
        return total;
    };

    {
        TopQ top(top_q);
        for (int i = 0; i < L; ++i) top.offer(score.template operator()<1>({i}), {i});
        for (auto& s : top.sorted()) out.push_back(std::move(s));
    }
    if (max_size >= 2) {
        TopQ top(top_q);
        for (int i = 0; i < L; ++i)
            for (int j = i + 1; j < L; ++j)
                top.offer(score.template operator()<2>({i, j}), {i, j});
        for (auto& s : top.sorted()) out.push_back(std::move(s));
    }
    if (max_size >= 3 && static_cast<double>(L) * (L - 1) * (L - 2) / 6.0 <= 5e6) {
        TopQ top(top_q);
        for (int i = 0; i < L; ++i)
            for (int j = i + 1; j < L; ++j)
                for (int k = j + 1; k < L; ++k)
                    top.offer(score.template operator()<3>({i, j, k}), {i, j, k});
        for (auto& s : top.sorted()) out.push_back(std::move(s));
    }
    return out;
}

namespace {

// Error-normalization divisors for the support columns. Scales that vanish
// (beta = 1 columns: the kernel integrates to zero) are floored relative to
// the largest support scale; least-squares results are invariant to the
// floor, it only guards against division by zero.
Eigen::VectorXd guarded_divisors(const Eigen::VectorXd& narrow_means,
                                 const std::vector<int>& support) {
    Eigen::VectorXd d(static_cast<Eigen::Index>(support.size()));
    double max_scale = 0.0;
    for (std::size_t i = 0; i < support.size(); ++i)
        max_scale = std::max(max_scale, narrow_means[support[i]]);
    const double floor_value = max_scale > 0.0 ? 1e-12 * max_scale : 1.0;
    for (std::size_t i = 0; i < support.size(); ++i)
        d[static_cast<Eigen::Index>(i)] = std::max(narrow_means[support[i]], floor_value);
    return d;
}

double guarded_b_bar(const Eigen::VectorXd& b_narrow, bool* flagged) {
    const double mean = b_narrow.mean();
    const double mean_abs = b_narrow.cwiseAbs().mean();
    if (std::abs(mean) >= 1e-12 * mean_abs && mean != 0.0) {
        if (flagged) *flagged = false;
        return mean;
    }
    if (flagged) *flagged = true;
    return mean_abs > 0.0 ? mean_abs : 1.0;
}

} // namespace

NarrowFitResult narrow_fit(const Eigen::MatrixXd& W, const Eigen::VectorXd& b,
                           const std::vector<int>& support, const DynamicRegionSet& regions,
                           const ScaleTable& scales) {
    if (support.empty()) throw InputError("regression", "empty support");
    if (regions.size() < static_cast<int>(support.size()))
        throw InputError("regression", "fewer dynamic rows than support columns");

    const int nh = regions.size();
    const int ns = static_cast<int>(support.size());

    NarrowFitResult out;
    out.divisors = guarded_divisors(scales.narrow_means(regions.indices), support);

    Eigen::MatrixXd Wn(nh, ns);
    Eigen::VectorXd bn(nh);
    for (int r = 0; r < nh; ++r) {
        const int h = regions.indices[static_cast<std::size_t>(r)];
        for (int c = 0; c < ns; ++c)
            Wn(r, c) = W(h, support[static_cast<std::size_t>(c)]) / out.divisors[c];
        bn[r] = b[h];
    }

    out.b_bar = guarded_b_bar(bn, &out.b_bar_guarded);
    const Eigen::VectorXd b_scaled = bn / out.b_bar;

    out.c_tilde = solve_least_squares(Wn, b_scaled, &out.regularized);
    out.W_narrow_scaled = std::move(Wn);

    out.coeffs.values = Eigen::VectorXd::Zero(W.cols());
    for (int c = 0; c < ns; ++c)
        out.coeffs.values[support[static_cast<std::size_t>(c)]] =
            out.b_bar * out.c_tilde[c] / out.divisors[c];
    return out;
}

Eigen::VectorXd contribution_scores(const Eigen::MatrixXd& W_narrow_scaled,
                                    const Eigen::VectorXd& c_tilde) {
    if (W_narrow_scaled.cols() != c_tilde.size())
        throw InputError("regression", "coefficient/support mismatch");
    Eigen::VectorXd n(c_tilde.size());
    for (int i = 0; i < c_tilde.size(); ++i)
        n[i] = W_narrow_scaled.col(i).norm() * std::abs(c_tilde[i]);
    const double n_max = n.maxCoeff();
    if (n_max == 0.0) throw NumericalError("all contribution scores vanish (no model)");
    return n / n_max;
}

std::vector<int> trim_once(const std::vector<int>& support, const Eigen::VectorXd& scores,
                           double threshold) {
    if (support.empty()) throw InputError("regression", "empty support");
    int argmin = 0;
    for (int i = 1; i < scores.size(); ++i)
        if (scores[i] < scores[argmin]) argmin = i;
    if (scores[argmin] >= threshold) return support;
    std::vector<int> trimmed;
    for (std::size_t i = 0; i < support.size(); ++i)
        if (static_cast<int>(i) != argmin) trimmed.push_back(support[i]);
    return trimmed;
}

double cross_validation_error(const Eigen::MatrixXd& W, const Eigen::VectorXd& b,
                              const std::vector<int>& support, const DynamicRegionSet& regions,
                              const ScaleTable& scales, double lambda, int trials,
                              std::uint64_t seed, const std::vector<int>& row_block,
                              int num_blocks) {
    if (support.empty()) throw InputError("regression", "empty support");
    const int nh = regions.size();
    if (nh < 2 * static_cast<int>(support.size()))
        throw InputError("regression", "too few dynamic rows for cross validation");
    if (static_cast<int>(row_block.size()) != static_cast<int>(W.rows()))
        throw InputError("regression", "row block labels must cover every row");

    const Eigen::VectorXd divisors = guarded_divisors(scales.narrow_means(regions.indices), support);

    Eigen::MatrixXd Wt(nh, static_cast<Eigen::Index>(support.size()));
    Eigen::VectorXd bn(nh);
    std::vector<int> blk(static_cast<std::size_t>(nh));
    for (int r = 0; r < nh; ++r) {
        const int h = regions.indices[static_cast<std::size_t>(r)];
        for (std::size_t c = 0; c < support.size(); ++c)
            Wt(r, static_cast<Eigen::Index>(c)) = W(h, support[c]) / divisors[static_cast<Eigen::Index>(c)];
        bn[r] = b[h];
        blk[static_cast<std::size_t>(r)] = row_block[static_cast<std::size_t>(h)];
    }
    const double b_bar = guarded_b_bar(bn, nullptr);
    const Eigen::VectorXd bt = bn / b_bar;

    std::vector<int> blocks(static_cast<std::size_t>(num_blocks));
    std::iota(blocks.begin(), blocks.end(), 0);

    double total = 0.0;
    int completed = 0;
    for (int trial = 0; trial < trials; ++trial) {
        Rng rng(derive_stream(seed, static_cast<std::uint64_t>(trial)));
        std::vector<int> perm = blocks;
        rng.shuffle(perm);
        std::vector<bool> in_a(static_cast<std::size_t>(num_blocks), false);
        for (int i = 0; i < num_blocks / 2; ++i) in_a[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] = true;

        std::vector<int> ia, ib;
        for (int r = 0; r < nh; ++r)
            (in_a[static_cast<std::size_t>(blk[static_cast<std::size_t>(r)])] ? ia : ib).push_back(r);
        if (ia.size() < support.size() || ib.size() < support.size()) continue;

        auto gather = [&](const std::vector<int>& rows, Eigen::MatrixXd& M, Eigen::VectorXd& v) {
            M.resize(static_cast<Eigen::Index>(rows.size()), Wt.cols());
            v.resize(static_cast<Eigen::Index>(rows.size()));
            for (std::size_t r = 0; r < rows.size(); ++r) {
                M.row(static_cast<Eigen::Index>(r)) = Wt.row(rows[r]);
                v[static_cast<Eigen::Index>(r)] = bt[rows[r]];
            }
        };
        Eigen::MatrixXd Wa, Wb;
        Eigen::VectorXd ba, bb;
        gather(ia, Wa, ba);
        gather(ib, Wb, bb);

        const Eigen::VectorXd ca = solve_least_squares(Wa, ba);
        const Eigen::VectorXd cb = solve_least_squares(Wb, bb);
        if (!ca.allFinite() || !cb.allFinite()) continue; // singular fold: skip

        total += lambda * (Wa * cb - ba).norm() / std::sqrt(static_cast<double>(ba.size())) +
                 (1.0 - lambda) * (Wb * ca - bb).norm() / std::sqrt(static_cast<double>(bb.size()));
        ++completed;
    }
    if (completed == 0) throw NumericalError("no cross-validation fold completed");
    return total / completed;
}

} // namespace weakident
