#pragma once

#include <Eigen/Dense>

#include <vector>

#include "weakident/dictionary.hpp"
#include "weakident/test_function.hpp"
#include "weakident/types.hpp"
#include "weakident/weak_system.hpp"

namespace weakident {

/// Leading noise-error coefficients s(h, l): the total monomial degree times
/// the magnitude of the weak integral of the degree-lowered monomial against
/// the derivative kernel. The constant feature has s = 1.
struct ScaleTable {
    Eigen::MatrixXd s;                   // H x L, non-negative
    Eigen::VectorXd column_means_full;   // <s(h,l)> over all rows

    Eigen::VectorXd narrow_means(const std::vector<int>& row_indices) const;
};

ScaleTable leading_scales(const ObservationSet& data, const Dictionary& dict,
                          const TestFunction& tf, const CenterGrid& centers);

/// The fixed feature-of-interest sets used for region selection: d/dx u^2
/// style features for spatial problems, degree-2 pure monomials for ODE
/// systems. Throws InputError("feature") when the dictionary lacks one.
std::vector<int> features_of_interest(int num_vars, int spatial_dims, const Dictionary& dict);

/// Rows whose averaged leading-error scale exceeds the changepoint threshold.
struct DynamicRegionSet {
    std::vector<int> indices; // strictly increasing
    double gamma = 0.0;
    Eigen::VectorXd sbar;
    int bins = 0;
    bool degenerate = false; // all sbar equal: every row selected

    int size() const { return static_cast<int>(indices.size()); }
};

/// Histogram of sbar into `bins` equal-width bins; one-junction fit of the
/// cumulative counts with relative squared error; Gamma is the left edge of
/// the junction bin.
DynamicRegionSet select_regions(const ScaleTable& scales, const std::vector<int>& foi, int bins);

} // namespace weakident
