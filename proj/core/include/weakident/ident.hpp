#pragma once

#include <optional>
#include <string>
#include <vector>

#include "weakident/regression.hpp"
#include "weakident/test_function.hpp"
#include "weakident/weak_system.hpp"

namespace weakident {

struct IdentOptions {
    int alpha_cap = 6;
    int beta_cap = 6;
    std::optional<std::vector<FeatureSpec>> explicit_features; // overrides the per-axis rule
    int subsample_target = 50;       // bold-N; per axis
    double tau_hat = kTauHatDefault;
    double tau_decay = kTauDecayDefault;
    int ns_bins = 200;               // histogram bins for region selection
    std::optional<std::vector<FeatureSpec>> foi_override;
    int min_dynamic_rows = 800;      // adaptive subsample trigger (PDE data only)
    int max_subsample_retries = 3;
    RegressionConfig reg;
};

struct AxisDiagnostics {
    int k_star = 0;
    bool spectrum_fallback = false;
    int m = 0;
    int p = 0;
    bool clamped = false;
};

struct VariableResult {
    int var = 0;
    std::string name;
    std::vector<CandidateModel> models; // one per sparsity level 1..K
    int best_sparsity = 0;
    Coefficients coeffs;
    double cv_error = 0.0;
    std::vector<int> support;
};

struct IdentResult {
    WeakSystem system;                 // W, b, rows, dictionary, test function
    DynamicRegionSet regions;
    std::vector<AxisDiagnostics> axes;
    std::vector<std::string> var_names;
    std::vector<VariableResult> vars;
    int subsample_target_used = 0;     // after adaptive bumps
    std::vector<int> center_counts;    // per axis
    std::vector<std::string> warnings;
};

/// Full pipeline: dictionary, test-function design, weak assembly, dynamic
/// regions, then per sparsity level SP + narrow-fit/trim iterations and
/// cross-validation model selection, independently per dependent variable.
IdentResult weak_ident(const ObservationSet& data, const IdentOptions& opts);

} // namespace weakident
