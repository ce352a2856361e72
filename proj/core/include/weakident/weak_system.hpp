#pragma once

#include <Eigen/Dense>

#include <array>
#include <vector>

#include "weakident/dictionary.hpp"
#include "weakident/test_function.hpp"
#include "weakident/types.hpp"

namespace weakident {

/// Uniform subsampling targets per axis (the paper's bold-N).
struct SubsampleSpec {
    std::array<int, 2> target_spatial{50, 50};
    int target_time = 50;

    static SubsampleSpec uniform(int target) {
        return SubsampleSpec{{target, target}, target};
    }
    int target_for_axis(const GridSpec& g, int axis) const {
        return g.is_time_axis(axis) ? target_time : target_spatial[static_cast<std::size_t>(axis)];
    }
};

/// Test-region centers as the Cartesian product of per-axis position lists.
/// Row order is time slowest, then y, then x (matching the data layout).
struct CenterGrid {
    std::vector<std::vector<int>> per_axis; // spatial axes first, time last
    std::vector<Center> centers;

    int rows() const { return static_cast<int>(centers.size()); }
    int count(int axis) const { return static_cast<int>(per_axis[static_cast<std::size_t>(axis)].size()); }
};

/// Per-axis counts follow N = ceil((count - 2m - 1)/floor(count/target) + 1);
/// centers span [m, count-1-m] uniformly with the first center at offset m.
/// Throws when an axis has no interior (count <= 2m+1).
CenterGrid subsample_centers(const GridSpec& grid, const TestFunction& tf,
                             const SubsampleSpec& spec);

/// The discrete weak-form system W c = b. W is shared across dependent
/// variables; each variable has its own right-hand side.
struct WeakSystem {
    Eigen::MatrixXd W;              // H x L
    std::vector<Eigen::VectorXd> b; // per variable, length H
    std::vector<Center> rows;
    Dictionary dict;
    TestFunction tf;
    GridSpec grid;

    int num_rows() const { return static_cast<int>(W.rows()); }
};

/// Builds W and b by separable FFT correlation of the monomial fields with
/// the test-function derivative kernels (zero-padded; only interior centers
/// are read, so the padding never contaminates results).
WeakSystem assemble(const ObservationSet& data, const Dictionary& dict, const TestFunction& tf,
                    const CenterGrid& centers);

/// Literal double-sum quadrature of one W entry (Eq.-level oracle for the FFT
/// path; no FFT involved).
double direct_quadrature_reference(const ObservationSet& data, const FeatureSpec& feature,
                                   const TestFunction& tf, const Center& center);

/// Literal double-sum quadrature of one b entry for variable `var`.
double direct_time_rhs_reference(const ObservationSet& data, int var, const TestFunction& tf,
                                 const Center& center);

} // namespace weakident
