#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "weakident/regions.hpp"
#include "weakident/types.hpp"

namespace weakident {

struct ColumnNormalized {
    Eigen::MatrixXd W;      // unit Euclidean columns
    Eigen::VectorXd norms;  // original column norms, for un-scaling
};

/// Divides each column by its Euclidean norm. Throws on a zero column.
ColumnNormalized column_normalize(const Eigen::MatrixXd& W);

/// Standard Subspace Pursuit on a column-normalized matrix and unit-norm
/// right-hand side. Deterministic with lowest-index tie-breaking; stops when
/// the residual fails to decrease by a relative 1e-12 (max 20 iterations).
std::vector<int> subspace_pursuit(const Eigen::MatrixXd& Wn, const Eigen::VectorXd& b_unit, int k);

/// Greedy forward selection (orthogonal matching pursuit) on the same
/// normalized system; companion proposal source to subspace_pursuit for
/// strongly collinear dictionaries.
std::vector<int> matching_pursuit(const Eigen::MatrixXd& Wn, const Eigen::VectorXd& b_unit, int k);

/// Exhaustive screen of supports of size 1..max_size (max_size <= 3),
/// ranked by the summed cross-block residual over every balanced two-fold
/// split of four row blocks, computed through per-block Gram matrices so
/// each subset costs O(1). Returns up to `top_q` candidates per size,
/// best first; sizes whose enumeration would be too large are skipped.
std::vector<std::vector<int>> screen_small_subsets(const Eigen::MatrixXd& W,
                                                   const Eigen::VectorXd& b, int max_size,
                                                   const std::vector<int>& row_block,
                                                   int top_q = 12);

struct NarrowFitResult {
    Coefficients coeffs;       // original scale, length L, zero off-support
    Eigen::VectorXd c_tilde;   // scaled solution, one entry per support column
    Eigen::VectorXd divisors;  // error-normalization divisors per support column
    Eigen::MatrixXd W_narrow_scaled; // |H-set| x |support| error-normalized matrix
    double b_bar = 1.0;
    bool b_bar_guarded = false;
    bool regularized = false;
};

/// Eq. 21-23: restrict rows to the highly dynamic set and columns to the
/// support, error-normalize columns by <s(h,l)> over those rows, scale b by
/// its mean, least-squares solve, then rescale back to original units.
NarrowFitResult narrow_fit(const Eigen::MatrixXd& W, const Eigen::VectorXd& b,
                           const std::vector<int>& support, const DynamicRegionSet& regions,
                           const ScaleTable& scales);

/// Contribution scores a_i = ||w_i|| |c_i| / max_i(||w_i|| |c_i|) over the
/// scaled narrow system. Throws when every score is zero (no model).
Eigen::VectorXd contribution_scores(const Eigen::MatrixXd& W_narrow_scaled,
                                    const Eigen::VectorXd& c_tilde);

/// Removes exactly the lowest-score feature when its score is below the
/// threshold; lowest index wins ties. Otherwise returns the support unchanged.
std::vector<int> trim_once(const std::vector<int>& support, const Eigen::VectorXd& scores,
                           double threshold);

/// Two-fold cross-validation error, averaged over `trials` seeded random
/// equal partitions of the highly dynamic rows. Partitions are drawn at
/// time-block granularity (`row_block` holds each row's block id): test
/// regions overlap in space-time, so row-level partitions would share the
/// same noise samples between folds and overfitted models would transfer
/// across them. Each residual is RMS-normalized so unequal fold sizes
/// compare fairly. Singular or empty folds are skipped; throws
/// NumericalError when no fold completes.
double cross_validation_error(const Eigen::MatrixXd& W, const Eigen::VectorXd& b,
                              const std::vector<int>& support, const DynamicRegionSet& regions,
                              const ScaleTable& scales, double lambda, int trials,
                              std::uint64_t seed, const std::vector<int>& row_block,
                              int num_blocks);

struct RegressionConfig {
    int max_sparsity = 10;       // K
    double trim_threshold = 0.05;
    double cv_lambda = 0.01;
    int cv_trials = 30;
    int cv_blocks = 4;           // time-block granularity of CV partitions
    std::uint64_t seed = 0;
};

struct CandidateModel {
    int sparsity = 0;
    std::vector<int> support;
    Coefficients coeffs;
    double cv_error = 0.0;
    int trim_iterations = 0;
    std::vector<std::vector<int>> support_history; // SP output, then after each trim
    bool failed = false;
    std::string failure;
};

/// Least-squares helper shared by the regression steps: column-equilibrated
/// column-pivoting QR; falls back to ridge with penalty
/// 1e-10 * (largest squared column norm) when rank-deficient.
Eigen::VectorXd solve_least_squares(const Eigen::MatrixXd& A, const Eigen::VectorXd& rhs,
                                    bool* regularized = nullptr);

} // namespace weakident
