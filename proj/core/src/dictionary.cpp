#include "weakident/dictionary.hpp"

#include <algorithm>
#include <cstring>
#include <set>

namespace weakident {
namespace {

// All monomial exponent vectors over `num_vars` variables with total degree
// in [lo, hi], in lexicographic order of the exponent vector.
void enumerate_monomials(int num_vars, int lo, int hi, std::vector<std::vector<int>>& out) {
    std::vector<int> beta(static_cast<std::size_t>(num_vars), 0);
    // Odometer over per-variable exponents 0..hi, filtered by total degree.
    for (;;) {
        int deg = 0;
        for (int b : beta) deg += b;
        if (deg >= lo && deg <= hi) out.push_back(beta);
        int i = num_vars - 1;
        while (i >= 0 && beta[static_cast<std::size_t>(i)] == hi) {
            beta[static_cast<std::size_t>(i)] = 0;
            --i;
        }
        if (i < 0) break;
        ++beta[static_cast<std::size_t>(i)];
    }
}

} // namespace

Dictionary Dictionary::build(int num_vars, int spatial_dims, int alpha_cap, int beta_cap) {
    if (num_vars < 1) throw InputError("dictionary", "num_vars must be >= 1");
    if (spatial_dims < 0 || spatial_dims > 2)
        throw InputError("dictionary", "spatial_dims > 2 is unsupported");
    if (alpha_cap < 0 || beta_cap < 0) throw InputError("dictionary", "caps must be >= 0");

    Dictionary d;
    d.num_vars_ = num_vars;
    d.spatial_dims_ = spatial_dims;
    d.alpha_cap_ = alpha_cap;
    d.beta_cap_ = beta_cap;
    d.rule_ = EnumerationRule::PerAxis;

    const int per_axis_cap = spatial_dims == 2 ? std::max(alpha_cap - 1, 0) : alpha_cap;

    std::vector<std::vector<int>> monomials;
    enumerate_monomials(num_vars, 1, beta_cap, monomials);

    // Constant feature exactly once; derivatives of constants are excluded.
    FeatureSpec constant;
    constant.alpha.assign(static_cast<std::size_t>(spatial_dims), 0);
    constant.beta.assign(static_cast<std::size_t>(num_vars), 0);
    d.features_.push_back(constant);

    std::vector<std::vector<int>> alphas;
    if (spatial_dims == 0) {
        alphas.push_back({});
    } else if (spatial_dims == 1) {
        for (int a = 0; a <= per_axis_cap; ++a) alphas.push_back({a});
    } else {
        for (int ax = 0; ax <= per_axis_cap; ++ax)
            for (int ay = 0; ay <= per_axis_cap; ++ay) alphas.push_back({ax, ay});
    }

    for (const auto& beta : monomials)
        for (const auto& alpha : alphas)
            d.features_.push_back(FeatureSpec{alpha, beta});

    std::sort(d.features_.begin(), d.features_.end());
    d.validate();
    return d;
}

Dictionary Dictionary::from_features(int num_vars, int spatial_dims, int alpha_cap,
                                     int beta_cap, std::vector<FeatureSpec> features) {
    Dictionary d;
    d.num_vars_ = num_vars;
    d.spatial_dims_ = spatial_dims;
    d.alpha_cap_ = alpha_cap;
    d.beta_cap_ = beta_cap;
    d.rule_ = EnumerationRule::Explicit;
    d.features_ = std::move(features);
    std::sort(d.features_.begin(), d.features_.end());
    d.validate();
    return d;
}

void Dictionary::validate() const {
    for (const auto& f : features_) {
        if (f.alpha.size() != static_cast<std::size_t>(spatial_dims_))
            throw InputError("dictionary", "alpha arity mismatch");
        if (f.beta.size() != static_cast<std::size_t>(num_vars_))
            throw InputError("dictionary", "beta arity mismatch");
        if (f.total_degree() == 0 && f.total_derivative() != 0)
            throw InputError("dictionary", "derivative of a constant is excluded");
        for (int a : f.alpha)
            if (a < 0) throw InputError("dictionary", "negative derivative order");
        for (int b : f.beta)
            if (b < 0) throw InputError("dictionary", "negative monomial exponent");
    }
    for (std::size_t i = 1; i < features_.size(); ++i)
        if (features_[i] == features_[i - 1])
            throw InputError("dictionary", "duplicate feature");
}

std::optional<int> Dictionary::try_index_of(const FeatureSpec& spec) const {
    auto it = std::lower_bound(features_.begin(), features_.end(), spec);
    if (it != features_.end() && *it == spec)
        return static_cast<int>(it - features_.begin());
    return std::nullopt;
}

int Dictionary::index_of(const FeatureSpec& spec) const {
    if (auto idx = try_index_of(spec)) return *idx;
    throw InputError("feature", "feature is not in the dictionary");
}

int Dictionary::max_alpha(int axis) const {
    int m = 0;
    for (const auto& f : features_)
        m = std::max(m, f.alpha[static_cast<std::size_t>(axis)]);
    return m;
}

std::vector<std::uint8_t> Dictionary::serialize() const {
    std::vector<std::uint8_t> out;
    auto put32 = [&out](int v) {
        for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
    };
    put32(num_vars_);
    put32(spatial_dims_);
    put32(alpha_cap_);
    put32(beta_cap_);
    put32(size());
    for (const auto& f : features_) {
        for (int a : f.alpha) put32(a);
        for (int b : f.beta) put32(b);
    }
    return out;
}

std::string feature_name(const FeatureSpec& spec, const std::vector<std::string>& var_names) {
    if (spec.is_constant()) return "1";
    std::string body;
    int factors = 0;
    for (std::size_t v = 0; v < spec.beta.size(); ++v) {
        const int b = spec.beta[v];
        if (b == 0) continue;
        ++factors;
        body += var_names[v];
        if (b > 1) body += "^" + std::to_string(b);
    }
    const int order = spec.total_derivative();
    if (order == 0) return body;

    std::string sub;
    static const char axis_letter[2] = {'x', 'y'};
    for (std::size_t a = 0; a < spec.alpha.size(); ++a)
        sub.append(static_cast<std::size_t>(spec.alpha[a]), axis_letter[a]);

    const bool needs_parens = factors > 1 || spec.total_degree() > 1;
    if (needs_parens) return "(" + body + ")_" + sub;
    return body + "_" + sub;
}

std::string render_equation(const std::string& lhs_var, const Dictionary& dict,
                            const Coefficients& coeffs,
                            const std::vector<std::string>& var_names) {
    std::string eq = lhs_var + (dict.spatial_dims() > 0 ? "_t = " : "' = ");
    bool first = true;
    for (int l = 0; l < dict.size(); ++l) {
        const double c = coeffs.values[l];
        if (c == 0.0) continue;
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%+.5f", c);
        if (!first) eq += " ";
        eq += buf;
        eq += " " + feature_name(dict.feature(l), var_names);
        first = false;
    }
    if (first) eq += "0";
    return eq;
}

} // namespace weakident
