#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "weakident/types.hpp"

namespace weakident {

enum class EnumerationRule { PerAxis, Explicit };

/// Ordered list of the L candidate features. Immutable after construction.
///
/// The per-axis rule crosses every monomial of total degree 1..beta_cap with
/// every derivative multi-index whose components lie in 0..cap per axis
/// (cap = alpha_cap in 1D, alpha_cap-1 per axis in 2D) and prepends a single
/// constant feature. ODE systems (spatial_dims = 0) get pure monomials of
/// degree 0..beta_cap.
class Dictionary {
public:
    static Dictionary build(int num_vars, int spatial_dims, int alpha_cap, int beta_cap);
    /// Explicit feature list (e.g. dictionaries whose published size matches
    /// no simple enumeration rule). Features are sorted into canonical order.
    static Dictionary from_features(int num_vars, int spatial_dims, int alpha_cap,
                                    int beta_cap, std::vector<FeatureSpec> features);

    int size() const { return static_cast<int>(features_.size()); }
    const FeatureSpec& feature(int l) const { return features_[static_cast<std::size_t>(l)]; }
    const std::vector<FeatureSpec>& features() const { return features_; }

    /// Stable index of `spec`; throws InputError("feature") when absent.
    int index_of(const FeatureSpec& spec) const;
    std::optional<int> try_index_of(const FeatureSpec& spec) const;

    int num_vars() const { return num_vars_; }
    int spatial_dims() const { return spatial_dims_; }
    int alpha_cap() const { return alpha_cap_; }
    int beta_cap() const { return beta_cap_; }
    EnumerationRule rule() const { return rule_; }

    /// Largest derivative order any feature uses on a spatial axis.
    int max_alpha(int axis) const;

    /// Canonical byte encoding, for determinism checks.
    std::vector<std::uint8_t> serialize() const;

    Dictionary() = default; // empty; populate through build()/from_features()

private:
    void validate() const;

    std::vector<FeatureSpec> features_;
    int num_vars_ = 0;
    int spatial_dims_ = 0;
    int alpha_cap_ = 0;
    int beta_cap_ = 0;
    EnumerationRule rule_ = EnumerationRule::PerAxis;
};

/// Renders a feature the way the result tables print them: "1", "u", "u_xx",
/// "(u^2)_x", "x^2y". `var_names` must have one entry per dependent variable.
std::string feature_name(const FeatureSpec& spec, const std::vector<std::string>& var_names);

/// "u_t = -1.00145 u_x +0.04999 u_xx" style equation rendering.
std::string render_equation(const std::string& lhs_var, const Dictionary& dict,
                            const Coefficients& coeffs,
                            const std::vector<std::string>& var_names);

} // namespace weakident
