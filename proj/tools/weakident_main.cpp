#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "weakident/dataset_io.hpp"
#include "weakident/errors.hpp"
#include "weakident/ident.hpp"
#include "weakident/kvfile.hpp"
#include "weakident/metrics.hpp"
#include "weakident/noise.hpp"
#include "weakident/report.hpp"
#include "weakident/run_config.hpp"
#include "weakident/systems.hpp"

namespace fs = std::filesystem;
using namespace weakident;

namespace {

void write_file(const fs::path& path, const std::string& body) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("format", "cannot write '" + path.string() + "'");
    out << body;
}

std::string error_record(const std::string& category, const std::string& message) {
    // Machine-readable single-line error record.
    std::string msg;
    for (char c : message) {
        if (c == '"' || c == '\\') msg += '\\';
        if (c == '\n') {
            msg += ' ';
            continue;
        }
        msg += c;
    }
    return "{\"error\":{\"category\":\"" + category + "\",\"message\":\"" + msg + "\"}}";
}

struct IdentifyOutputs {
    IdentResult result;
    double wall_seconds = 0.0;
};

IdentifyOutputs run_identify(const ObservationSet& data, const RunConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    IdentifyOutputs out;
    out.result = weak_ident(data, cfg.to_options(data.num_vars(), data.grid.spatial_dims));
    out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

void emit_identify_outputs(const IdentifyOutputs& run, const RunConfig& cfg,
                           const fs::path& out_dir, const std::string& extra_json_merged = "") {
    std::string body = result_json(run.result, cfg.effective_entries());
    if (!extra_json_merged.empty()) {
        // splice the metrics object into the top-level map (body ends "}\n")
        body.erase(body.size() - 2);
        body += "," + extra_json_merged + "}\n";
    }
    write_file(out_dir / "result.json", body);
    write_file(out_dir / "diagnostics.csv", diagnostics_csv(run.result, run.wall_seconds));
    for (const std::string& eq : recovered_equations(run.result)) std::cout << eq << "\n";
    std::cout << "rows=" << run.result.system.num_rows()
              << " dynamic_rows=" << run.result.regions.size()
              << " wall_seconds=" << run.wall_seconds << "\n";
}

struct EvalRow {
    ErrorReport report;
    IdentifyOutputs run;
};

EvalRow evaluate_once(const SystemDefinition& def, const ObservationSet& clean, double sigma,
                      std::uint64_t noise_seed, const RunConfig& cfg) {
    const ObservationSet noisy = add_noise(clean, NoiseSpec{sigma, noise_seed});
    EvalRow row;
    row.run = run_identify(noisy, cfg);

    const IdentResult& res = row.run.result;
    const std::vector<Coefficients> truth = true_coefficients(def, res.system.dict);
    std::vector<Coefficients> found;
    for (const auto& vr : res.vars) found.push_back(vr.coeffs);

    std::optional<double> e_dyn;
    if (def.spatial_dims == 0) {
        const ObservationSet forward =
            simulate_ode_model_partial(def, res.system.dict, found);
        e_dyn = dynamic_error(forward, clean);
    }
    row.report = error_report(truth, found, res.system, e_dyn);
    return row;
}

std::string metrics_json(const ErrorReport& r) {
    auto num = [](double v) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    std::string s = "\"metrics\":{\"e2\":" + num(r.e2) + ",\"e_inf\":" + num(r.e_inf) +
                    ",\"e_res\":" + num(r.e_res) + ",\"ppv\":" + num(r.ppv) +
                    ",\"tpr\":" + num(r.tpr);
    if (r.e_dyn) s += ",\"e_dyn\":" + num(*r.e_dyn);
    s += "}";
    return s;
}

std::string csv_cell(double v) { return format_double(v); }

int run(int argc, char** argv) {
    CLI::App app{"WeakIdent: weak-form identification of differential equations"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "simulate a registered system and write WIDENT1 files");
    std::string gen_system, gen_out = ".";
    std::uint64_t gen_seed = 0;
    gen->add_option("system", gen_system, "system name")->required();
    gen->add_option("out", gen_out, "output directory or file prefix");
    gen->add_option("--seed", gen_seed, "reserved for IC perturbation options (deterministic ICs ignore it)");

    // identify
    auto* ident = app.add_subcommand("identify", "recover the governing equation from a dataset");
    std::string id_data, id_config, id_out = ".";
    std::uint64_t id_seed = 0;
    bool id_seed_set = false;
    ident->add_option("--data", id_data, "WIDENT1 dataset (.widh path or prefix)")->required();
    ident->add_option("--config", id_config, "key = value run configuration");
    ident->add_option("--seed", id_seed, "master seed (overrides the config)")
        ->each([&id_seed_set](const std::string&) { id_seed_set = true; });
    ident->add_option("--out", id_out, "output directory");

    // evaluate
    auto* eval = app.add_subcommand("evaluate", "identify against a known system and report errors");
    std::string ev_system, ev_data, ev_config, ev_out = ".";
    double ev_sigma = 0.0;
    std::uint64_t ev_seed = 0;
    eval->add_option("--system", ev_system, "registered system name")->required();
    eval->add_option("--data", ev_data, "optional noisy dataset (otherwise simulated clean)");
    eval->add_option("--sigma", ev_sigma, "noise-to-signal ratio");
    eval->add_option("--seed", ev_seed, "noise seed");
    eval->add_option("--config", ev_config, "key = value run configuration");
    eval->add_option("--out", ev_out, "output directory");

    // sweep
    auto* sw = app.add_subcommand("sweep", "seeded noise sweep emitting a plot-ready CSV");
    std::string sw_system, sw_config, sw_out = "sweep.csv";
    std::vector<double> sw_sigmas;
    int sw_trials = 1;
    std::uint64_t sw_seed = 0;
    sw->add_option("--system", sw_system, "registered system name")->required();
    sw->add_option("--sigma", sw_sigmas, "noise levels")->delimiter(',');
    sw->add_option("--trials", sw_trials, "seeds per noise level");
    sw->add_option("--seed", sw_seed, "base seed");
    sw->add_option("--config", sw_config, "key = value run configuration");
    sw->add_option("--out", sw_out, "output CSV path");

    CLI11_PARSE(app, argc, argv);

    if (gen->parsed()) {
        const SystemDefinition& def = system_by_name(gen_system);
        (void)gen_seed; // Table ICs are deterministic
        const ObservationSet data = simulate(def);
        fs::path out(gen_out);
        if (out.empty() || fs::is_directory(out) || gen_out.back() == '/')
            out /= def.name;
        if (out.has_parent_path()) fs::create_directories(out.parent_path());
        save_dataset(data, out.string());
        std::cout << "wrote " << out.string() << ".widh\n";
        return 0;
    }

    if (ident->parsed()) {
        const ObservationSet data = load_dataset(id_data);
        RunConfig cfg = id_config.empty() ? RunConfig{} : RunConfig::from_file(id_config);
        if (id_seed_set) cfg.seed = id_seed;
        cfg = cfg.resolved(data.grid);
        emit_identify_outputs(run_identify(data, cfg), cfg, id_out);
        return 0;
    }

    if (eval->parsed()) {
        const SystemDefinition& def = system_by_name(ev_system);
        RunConfig cfg = ev_config.empty() ? RunConfig{} : RunConfig::from_file(ev_config);
        cfg = cfg.resolved(def.grid, def.name);
        const ObservationSet clean = ev_data.empty() ? simulate(def) : load_dataset(ev_data);
        EvalRow row = evaluate_once(def, clean, ev_sigma, ev_seed, cfg);
        emit_identify_outputs(row.run, cfg, ev_out, metrics_json(row.report));
        const ErrorReport& r = row.report;
        std::cout << "e2=" << r.e2 << " e_inf=" << r.e_inf << " tpr=" << r.tpr
                  << " ppv=" << r.ppv << " e_res=" << r.e_res;
        if (r.e_dyn) std::cout << " e_dyn=" << *r.e_dyn;
        std::cout << "\n";
        return 0;
    }

    if (sw->parsed()) {
        const SystemDefinition& def = system_by_name(sw_system);
        RunConfig cfg = sw_config.empty() ? RunConfig{} : RunConfig::from_file(sw_config);
        cfg = cfg.resolved(def.grid, def.name);
        const ObservationSet clean = simulate(def);

        std::string csv = "sigma,seed,e2,e_inf,tpr,ppv,e_res,e_dyn,error\n";
        for (double sigma : sw_sigmas) {
            for (int trial = 0; trial < sw_trials; ++trial) {
                const std::uint64_t noise_seed = sw_seed + static_cast<std::uint64_t>(trial);
                csv += format_double(sigma) + "," + std::to_string(noise_seed) + ",";
                try {
                    const EvalRow row = evaluate_once(def, clean, sigma, noise_seed, cfg);
                    const ErrorReport& r = row.report;
                    csv += csv_cell(r.e2) + "," + csv_cell(r.e_inf) + "," + csv_cell(r.tpr) + "," +
                           csv_cell(r.ppv) + "," + csv_cell(r.e_res) + ",";
                    if (r.e_dyn) csv += csv_cell(*r.e_dyn);
                    csv += ",\n";
                } catch (const std::exception& e) {
                    // partial failures become rows; the sweep continues
                    std::string msg = e.what();
                    for (char& c : msg)
                        if (c == ',' || c == '\n') c = ' ';
                    csv += ",,,,,," + msg + "\n";
                }
            }
        }
        write_file(fs::path(sw_out), csv);
        // Effective configuration sidecar so every row is re-derivable.
        KvFile meta;
        for (const auto& [k, v] : cfg.effective_entries()) meta.set(k, v);
        meta.set("system", def.name);
        meta.set("trials", std::to_string(sw_trials));
        write_file(fs::path(sw_out + ".config"), meta.serialize());
        std::cout << "wrote " << sw_out << "\n";
        return 0;
    }

    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const InputError& e) {
        std::cerr << error_record(e.category(), e.what()) << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << error_record("numerical", e.what()) << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << error_record("internal", e.what()) << "\n";
        return 1;
    }
}
