#include "weakident/run_config.hpp"

#include <cstdlib>
#include <set>

#include "weakident/errors.hpp"
#include "weakident/systems.hpp"

namespace weakident {

namespace {

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    if (text.empty()) return out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const std::string tok =
            comma == std::string::npos ? text.substr(start) : text.substr(start, comma - start);
        char* end = nullptr;
        const long v = std::strtol(tok.c_str(), &end, 10);
        if (end == tok.c_str() || *end != '\0')
            throw InputError("config", "bad integer '" + tok + "' in feature list");
        out.push_back(static_cast<int>(v));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

} // namespace

std::vector<FeatureSpec> parse_feature_list(const std::string& text, int spatial_dims,
                                            int num_vars) {
    std::vector<FeatureSpec> specs;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto semi = text.find(';', start);
        std::string item =
            semi == std::string::npos ? text.substr(start) : text.substr(start, semi - start);
        // strip spaces
        std::string cleaned;
        for (char c : item)
            if (c != ' ' && c != '\t') cleaned += c;
        if (!cleaned.empty()) {
            const auto bar = cleaned.find('|');
            if (bar == std::string::npos)
                throw InputError("config", "feature must be 'alpha|beta': '" + cleaned + "'");
            FeatureSpec f;
            f.alpha = parse_int_list(cleaned.substr(0, bar));
            f.beta = parse_int_list(cleaned.substr(bar + 1));
            if (static_cast<int>(f.alpha.size()) != spatial_dims)
                throw InputError("config", "feature alpha arity must match spatial dims");
            if (static_cast<int>(f.beta.size()) != num_vars)
                throw InputError("config", "feature beta arity must match variable count");
            specs.push_back(std::move(f));
        }
        if (semi == std::string::npos) break;
        start = semi + 1;
    }
    return specs;
}

RunConfig RunConfig::from_kv(const KvFile& kv) {
    static const std::set<std::string> known = {
        "alpha_cap", "beta_cap", "subsample", "tau_hat", "tau_decay", "trim",
        "max_sparsity", "cv_lambda", "cv_trials", "cv_blocks", "ns_bins", "seed", "foi"};
    for (const auto& [k, v] : kv.entries())
        if (!known.count(k)) throw InputError("config", "unknown config key '" + k + "'");

    RunConfig c;
    if (kv.has("alpha_cap")) c.alpha_cap = static_cast<int>(kv.get_int("alpha_cap"));
    if (kv.has("beta_cap")) c.beta_cap = static_cast<int>(kv.get_int("beta_cap"));
    if (kv.has("subsample")) c.subsample = static_cast<int>(kv.get_int("subsample"));
    if (kv.has("tau_hat")) c.tau_hat = kv.get_double("tau_hat");
    if (kv.has("tau_decay")) c.tau_decay = kv.get_double("tau_decay");
    if (kv.has("trim")) c.trim = kv.get_double("trim");
    if (kv.has("max_sparsity")) c.max_sparsity = static_cast<int>(kv.get_int("max_sparsity"));
    if (kv.has("cv_lambda")) c.cv_lambda = kv.get_double("cv_lambda");
    if (kv.has("cv_trials")) c.cv_trials = static_cast<int>(kv.get_int("cv_trials"));
    if (kv.has("cv_blocks")) c.cv_blocks = static_cast<int>(kv.get_int("cv_blocks"));
    if (kv.has("ns_bins")) c.ns_bins = static_cast<int>(kv.get_int("ns_bins"));
    if (kv.has("seed")) c.seed = static_cast<std::uint64_t>(kv.get_int("seed"));
    if (kv.has("foi")) c.foi = kv.get("foi");
    return c;
}

RunConfig RunConfig::from_file(const std::string& path) {
    return from_kv(KvFile::parse_file(path));
}

RunConfig RunConfig::resolved(const GridSpec& grid, const std::string& system_name) const {
    RunConfig c = *this;
    const bool pde = grid.spatial_dims > 0;
    if (c.subsample == 0) c.subsample = pde ? 50 : 1000;
    if (c.ns_bins == 0) c.ns_bins = pde ? 200 : 100;
    if (c.trim == 0.0) {
        c.trim = 0.05;
        if (!system_name.empty()) {
            try {
                c.trim = system_by_name(system_name).trim_threshold;
            } catch (const InputError&) {
                // unknown name: keep the default
            }
        }
    }
    return c;
}

IdentOptions RunConfig::to_options(int num_vars, int spatial_dims) const {
    IdentOptions opts;
    opts.alpha_cap = alpha_cap;
    opts.beta_cap = beta_cap;
    opts.subsample_target = subsample;
    opts.tau_hat = tau_hat;
    opts.tau_decay = tau_decay;
    opts.ns_bins = ns_bins;
    opts.reg.max_sparsity = max_sparsity;
    opts.reg.trim_threshold = trim;
    opts.reg.cv_lambda = cv_lambda;
    opts.reg.cv_trials = cv_trials;
    opts.reg.cv_blocks = cv_blocks;
    opts.reg.seed = seed;
    if (!foi.empty()) opts.foi_override = parse_feature_list(foi, spatial_dims, num_vars);
    return opts;
}

std::vector<std::pair<std::string, std::string>> RunConfig::effective_entries() const {
    std::vector<std::pair<std::string, std::string>> e;
    e.emplace_back("alpha_cap", std::to_string(alpha_cap));
    e.emplace_back("beta_cap", std::to_string(beta_cap));
    e.emplace_back("subsample", std::to_string(subsample));
    e.emplace_back("tau_hat", format_double(tau_hat));
    e.emplace_back("tau_decay", format_double(tau_decay));
    e.emplace_back("trim", format_double(trim));
    e.emplace_back("max_sparsity", std::to_string(max_sparsity));
    e.emplace_back("cv_lambda", format_double(cv_lambda));
    e.emplace_back("cv_trials", std::to_string(cv_trials));
    e.emplace_back("cv_blocks", std::to_string(cv_blocks));
    e.emplace_back("ns_bins", std::to_string(ns_bins));
    e.emplace_back("seed", std::to_string(seed));
    e.emplace_back("foi", foi);
    return e;
}

} // namespace weakident
