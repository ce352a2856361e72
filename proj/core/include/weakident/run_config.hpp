#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "weakident/ident.hpp"
#include "weakident/kvfile.hpp"

namespace weakident {

/// User-facing run configuration. Zero-valued fields are "resolve a default
/// for this dataset": subsample 50 (PDE) / 1000 (ODE), ns_bins 200 / 100,
/// trim 0.05 with per-system overrides (0.2 for ks).
struct RunConfig {
    int alpha_cap = 6;
    int beta_cap = 6;
    int subsample = 0;
    double tau_hat = kTauHatDefault;
    double tau_decay = kTauDecayDefault;
    double trim = 0.0;
    int max_sparsity = 10;
    double cv_lambda = 0.01;
    int cv_trials = 30;
    int cv_blocks = 4;
    int ns_bins = 0;
    std::uint64_t seed = 0;
    std::string foi; // feature-of-interest override, "ax[,ay]|b1[,b2...];..."

    static RunConfig from_file(const std::string& path);
    static RunConfig from_kv(const KvFile& kv);

    /// Fills the resolve-me fields for a concrete dataset; `system_name` may
    /// be empty (no per-system trim override then).
    RunConfig resolved(const GridSpec& grid, const std::string& system_name = "") const;

    /// Driver options; requires a resolved config.
    IdentOptions to_options(int num_vars, int spatial_dims) const;

    /// Every effective key/value pair, for embedding into run outputs.
    std::vector<std::pair<std::string, std::string>> effective_entries() const;
};

/// Parses the `foi` override syntax into feature specs.
std::vector<FeatureSpec> parse_feature_list(const std::string& text, int spatial_dims,
                                            int num_vars);

} // namespace weakident
