#include "weakident/report.hpp"

#include <cmath>
#include <cstdio>

#include "json.hpp"

#include "weakident/kvfile.hpp"

namespace weakident {

namespace {

using nlohmann::json;

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

// nlohmann's dump() emits shortest-round-trip floats; the determinism
// contract wants a fixed 17-significant-digit rendering instead, so the tree
// is serialized by hand (object keys are already sorted by the json map).
void dump(const json& j, std::string& out) {
    switch (j.type()) {
        case json::value_t::object: {
            out += '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ',';
                first = false;
                out += '"';
                out += escape(it.key());
                out += "\":";
                dump(it.value(), out);
            }
            out += '}';
            break;
        }
        case json::value_t::array: {
            out += '[';
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out += ',';
                dump(j[i], out);
            }
            out += ']';
            break;
        }
        case json::value_t::string:
            out += '"';
            out += escape(j.get<std::string>());
            out += '"';
            break;
        case json::value_t::boolean:
            out += j.get<bool>() ? "true" : "false";
            break;
        case json::value_t::number_integer:
            out += std::to_string(j.get<long long>());
            break;
        case json::value_t::number_unsigned:
            out += std::to_string(j.get<unsigned long long>());
            break;
        case json::value_t::number_float: {
            const double v = j.get<double>();
            if (!std::isfinite(v)) {
                out += "null";
            } else {
                char buf[40];
                std::snprintf(buf, sizeof(buf), "%.17g", v);
                out += buf;
            }
            break;
        }
        default:
            out += "null";
    }
}

} // namespace

std::vector<std::string> recovered_equations(const IdentResult& result) {
    std::vector<std::string> eqs;
    for (const auto& vr : result.vars)
        eqs.push_back(render_equation(vr.name, result.system.dict, vr.coeffs, result.var_names));
    return eqs;
}

std::string result_json(const IdentResult& result,
                        const std::vector<std::pair<std::string, std::string>>& config_entries) {
    json root;

    json config;
    for (const auto& [k, v] : config_entries) config[k] = v;
    root["config"] = config;

    const Dictionary& dict = result.system.dict;
    root["dictionary"] = {{"size", dict.size()},
                          {"alpha_cap", dict.alpha_cap()},
                          {"beta_cap", dict.beta_cap()},
                          {"num_vars", dict.num_vars()},
                          {"spatial_dims", dict.spatial_dims()}};

    json axes = json::array();
    static const char* axis_names[3] = {"x", "y", "t"};
    for (std::size_t a = 0; a < result.axes.size(); ++a) {
        const auto& ad = result.axes[a];
        const bool is_time = static_cast<int>(a) == dict.spatial_dims();
        axes.push_back({{"axis", is_time ? "t" : axis_names[a]},
                        {"k_star", ad.k_star},
                        {"m", ad.m},
                        {"p", ad.p},
                        {"spectrum_fallback", ad.spectrum_fallback},
                        {"clamped", ad.clamped}});
    }
    root["diagnostics"] = {{"rows", result.system.num_rows()},
                          {"dynamic_rows", result.regions.size()},
                          {"gamma", result.regions.gamma},
                          {"subsample_target", result.subsample_target_used},
                          {"center_counts", result.center_counts},
                          {"axes", axes}};

    json vars = json::array();
    for (const auto& vr : result.vars) {
        json coeffs = json::array();
        for (int l : vr.support)
            coeffs.push_back({{"index", l},
                              {"feature", feature_name(dict.feature(l), result.var_names)},
                              {"value", vr.coeffs.values[l]}});
        json per_k = json::array();
        for (const auto& m : vr.models) {
            json entry = {{"k", m.sparsity},
                          {"support_size", static_cast<int>(m.support.size())},
                          {"trim_iterations", m.trim_iterations},
                          {"failed", m.failed}};
            if (m.failed)
                entry["error"] = m.failure;
            else
                entry["cv_error"] = m.cv_error;
            per_k.push_back(entry);
        }
        json support_names = json::array();
        for (int l : vr.support)
            support_names.push_back(feature_name(dict.feature(l), result.var_names));
        vars.push_back({{"name", vr.name},
                        {"equation", render_equation(vr.name, dict, vr.coeffs, result.var_names)},
                        {"support", support_names},
                        {"support_indices", vr.support},
                        {"coefficients", coeffs},
                        {"best_sparsity", vr.best_sparsity},
                        {"cv_error", vr.cv_error},
                        {"cv_per_k", per_k}});
    }
    root["variables"] = vars;
    root["warnings"] = result.warnings;

    std::string out;
    dump(root, out);
    out += '\n';
    return out;
}

std::string diagnostics_csv(const IdentResult& result, double wall_seconds) {
    std::string csv = "variable,k,cv_error,support_size,trim_iterations,failed\n";
    for (const auto& vr : result.vars) {
        for (const auto& m : vr.models) {
            csv += vr.name + "," + std::to_string(m.sparsity) + ",";
            csv += m.failed ? "" : format_double(m.cv_error);
            csv += "," + std::to_string(m.support.size());
            csv += "," + std::to_string(m.trim_iterations);
            csv += m.failed ? ",1\n" : ",0\n";
        }
    }
    csv += "# wall_seconds = " + format_double(wall_seconds) + "\n";
    return csv;
}

} // namespace weakident
