#include "weakident/systems.hpp"

#include <cmath>
#include <map>
#include <numbers>

#include "weakident/errors.hpp"
#include "weakident/rk45.hpp"

namespace weakident {

namespace {

constexpr double kPi = std::numbers::pi;

FeatureSpec pde1(int alpha, int beta) { return FeatureSpec{{alpha}, {beta}}; }
FeatureSpec pde2(int alpha, int beta_u, int beta_v) {
    return FeatureSpec{{alpha}, {beta_u, beta_v}};
}

GridSpec pde_grid(int nx, double dx, double x0, int nt, double dt) {
    GridSpec g;
    g.spatial_dims = 1;
    g.nx = {nx, 0};
    g.dx = {dx, 1.0};
    g.x0 = {x0, 0.0};
    g.nt = nt;
    g.dt = dt;
    g.t0 = 0.0;
    return g;
}

GridSpec ode_grid(int nt, double dt) {
    GridSpec g;
    g.spatial_dims = 0;
    g.nt = nt;
    g.dt = dt;
    g.t0 = 0.0;
    return g;
}

double sech(double x) { return 1.0 / std::cosh(x); }

std::map<std::string, SystemDefinition> build_registry() {
    std::map<std::string, SystemDefinition> reg;

    {
        // u_t = -u_x + 0.05 u_xx on [0,1], compactly supported smooth bump.
        SystemDefinition s;
        s.name = "transport";
        s.num_vars = 1;
        s.spatial_dims = 1;
        s.grid = pde_grid(257, 1.0 / 256.0, 0.0, 300, 0.001);
        s.duplicate_last_column = true; // 257 samples store both endpoints
        s.alpha_cap = 6;
        s.beta_cap = 6;
        s.var_names = {"u"};
        s.rhs = {{{pde1(1, 1), -1.0}, {pde1(2, 1), 0.05}}};
        s.ic = [](double x) {
            const double w = 0.7; // support [0, 1-T]
            if (x >= w) return 0.0;
            const double a = std::sin(4.0 * kPi / w * x);
            return a * a * a * std::cos(kPi / w * x);
        };
        reg.emplace(s.name, std::move(s));
    }
    {
        // u_t = -0.5 u u_x - u_xxx = -0.25 (u^2)_x - u_xxx, two-soliton IC.
        SystemDefinition s;
        s.name = "kdv";
        s.num_vars = 1;
        s.spatial_dims = 1;
        s.grid = pde_grid(400, 2.0 * kPi / 400.0, -kPi, 601, 1e-5);
        s.alpha_cap = 6;
        s.beta_cap = 6;
        s.sim_substeps = 5;
        s.var_names = {"u"};
        s.rhs = {{{pde1(1, 2), -0.25}, {pde1(3, 1), -1.0}}};
        s.ic = [](double x) {
            const double s1 = sech(0.5 * 25.0 * (x + 2.0));
            const double s2 = sech(0.5 * 16.0 * (x + 1.0));
            return 3.0 * 625.0 * s1 * s1 + 3.0 * 256.0 * s2 * s2;
        };
        reg.emplace(s.name, std::move(s));
    }
    {
        // u_t = -u u_x - u_xx - u_xxxx = -0.5 (u^2)_x - u_xx - u_xxxx.
        SystemDefinition s;
        s.name = "ks";
        s.num_vars = 1;
        s.spatial_dims = 1;
        s.grid = pde_grid(256, 32.0 * kPi / 256.0, 0.0, 301, 0.5);
        s.alpha_cap = 6;
        s.beta_cap = 6;
        s.sim_substeps = 20;
        s.trim_threshold = 0.2;
        s.var_names = {"u"};
        s.rhs = {{{pde1(1, 2), -0.5}, {pde1(2, 1), -1.0}, {pde1(4, 1), -1.0}}};
        s.ic = [](double x) { return std::cos(x / 16.0) * (1.0 + std::sin(x / 16.0)); };
        reg.emplace(s.name, std::move(s));
    }
    {
        // Focusing NLS as the coupled real system:
        //   u_t =  0.5 v_xx + u^2 v + v^3
        //   v_t = -0.5 u_xx - u v^2 - u^3
        SystemDefinition s;
        s.name = "nls";
        s.num_vars = 2;
        s.spatial_dims = 1;
        s.grid = pde_grid(256, 10.0 / 256.0, -5.0, 251, kPi / 250.0);
        s.alpha_cap = 6;
        s.beta_cap = 6;
        s.sim_substeps = 13;
        s.complex_field = true;
        s.var_names = {"u", "v"};
        s.rhs = {{{pde2(2, 0, 1), 0.5}, {pde2(0, 2, 1), 1.0}, {pde2(0, 0, 3), 1.0}},
                 {{pde2(2, 1, 0), -0.5}, {pde2(0, 1, 2), -1.0}, {pde2(0, 3, 0), -1.0}}};
        s.ic_complex = [](double x) { return std::complex<double>(2.0 * sech(x), 0.0); };
        reg.emplace(s.name, std::move(s));
    }

    auto ode2 = [](int bx, int by) { return FeatureSpec{{}, {bx, by}}; };
    auto ode3 = [](int bx, int by, int bz) { return FeatureSpec{{}, {bx, by, bz}}; };

    {
        SystemDefinition s;
        s.name = "linear2d";
        s.num_vars = 2;
        s.spatial_dims = 0;
        s.grid = ode_grid(1001, 0.01);
        s.beta_cap = 5;
        s.var_names = {"x", "y"};
        s.rhs = {{{ode2(1, 0), -0.15}, {ode2(0, 1), 2.5}},
                 {{ode2(1, 0), -2.5}, {ode2(0, 1), -0.15}}};
        s.ode_ic = Eigen::Vector2d(2.0, 50.0);
        reg.emplace(s.name, std::move(s));
    }
    {
        SystemDefinition s;
        s.name = "vanderpol";
        s.num_vars = 2;
        s.spatial_dims = 0;
        s.grid = ode_grid(15001, 0.001);
        s.beta_cap = 5;
        s.var_names = {"x", "y"};
        s.rhs = {{{ode2(0, 1), 1.0}},
                 {{ode2(1, 0), 4.0}, {ode2(0, 1), -1.0}, {ode2(2, 1), -4.0}}};
        s.ode_ic = Eigen::Vector2d(0.0, 1.0);
        reg.emplace(s.name, std::move(s));
    }
    {
        SystemDefinition s;
        s.name = "duffing";
        s.num_vars = 2;
        s.spatial_dims = 0;
        s.grid = ode_grid(1001, 0.01);
        s.beta_cap = 5;
        s.var_names = {"x", "y"};
        s.rhs = {{{ode2(0, 1), 1.0}},
                 {{ode2(1, 0), -0.2}, {ode2(0, 1), -0.05}, {ode2(3, 0), -1.0}}};
        s.ode_ic = Eigen::Vector2d(0.0, 2.0);
        reg.emplace(s.name, std::move(s));
    }
    {
        SystemDefinition s;
        s.name = "lotka_volterra";
        s.num_vars = 2;
        s.spatial_dims = 0;
        s.grid = ode_grid(1001, 0.05);
        s.beta_cap = 5;
        s.var_names = {"x", "y"};
        s.rhs = {{{ode2(1, 0), 2.0 / 3.0}, {ode2(1, 1), -4.0 / 3.0}},
                 {{ode2(0, 1), -1.0}, {ode2(1, 1), 1.0}}};
        s.ode_ic = Eigen::Vector2d(10.0, 10.0);
        reg.emplace(s.name, std::move(s));
    }
    {
        SystemDefinition s;
        s.name = "lorenz";
        s.num_vars = 3;
        s.spatial_dims = 0;
        s.grid = ode_grid(15001, 0.001);
        s.beta_cap = 3;
        s.var_names = {"x", "y", "z"};
        s.rhs = {{{ode3(1, 0, 0), -10.2}, {ode3(0, 1, 0), 10.2}},
                 {{ode3(1, 0, 0), 29.0}, {ode3(0, 1, 0), -1.0}, {ode3(1, 0, 1), -1.0}},
                 {{ode3(0, 0, 1), -2.0}, {ode3(1, 1, 0), 1.0}}};
        s.ode_ic = Eigen::Vector3d(-8.0, 7.0, 10.0);
        reg.emplace(s.name, std::move(s));
    }
    return reg;
}

const std::map<std::string, SystemDefinition>& registry() {
    static const std::map<std::string, SystemDefinition> reg = build_registry();
    return reg;
}

} // namespace

const SystemDefinition& system_by_name(const std::string& name) {
    const auto& reg = registry();
    auto it = reg.find(name);
    if (it == reg.end()) throw InputError("unknown_system", "unknown system '" + name + "'");
    return it->second;
}

std::vector<std::string> registered_systems() {
    std::vector<std::string> names;
    for (const auto& [name, def] : registry()) names.push_back(name);
    return names;
}

std::vector<Coefficients> true_coefficients(const SystemDefinition& def, const Dictionary& dict) {
    std::vector<Coefficients> out;
    for (const auto& terms : def.rhs) {
        Coefficients c;
        c.values = Eigen::VectorXd::Zero(dict.size());
        for (const auto& [spec, value] : terms) c.values[dict.index_of(spec)] = value;
        out.push_back(std::move(c));
    }
    return out;
}

ObservationSet simulate(const SystemDefinition& def) {
    return def.spatial_dims == 0 ? simulate_ode(def) : simulate_pde_1d(def);
}

ObservationSet simulate_ode_model_partial(const SystemDefinition& base, const Dictionary& dict,
                                          const std::vector<Coefficients>& model,
                                          double tolerance) {
    if (base.spatial_dims != 0) throw InputError("system", "not an ODE system");
    const int nv = base.num_vars;
    if (static_cast<int>(model.size()) != nv)
        throw InputError("system", "model variable count mismatch");

    OdeRhs rhs = [&dict, &model, nv](double, const Eigen::VectorXd& y, Eigen::VectorXd& dydt) {
        for (int v = 0; v < nv; ++v) {
            double acc = 0.0;
            const Eigen::VectorXd& c = model[static_cast<std::size_t>(v)].values;
            for (int l = 0; l < dict.size(); ++l) {
                if (c[l] == 0.0) continue;
                double term = c[l];
                const auto& beta = dict.feature(l).beta;
                for (std::size_t j = 0; j < beta.size(); ++j)
                    for (int k = 0; k < beta[j]; ++k) term *= y[static_cast<Eigen::Index>(j)];
                acc += term;
            }
            dydt[v] = acc;
        }
    };

    std::vector<double> ts(static_cast<std::size_t>(base.grid.nt));
    for (int n = 0; n < base.grid.nt; ++n)
        ts[static_cast<std::size_t>(n)] = base.grid.t0 + n * base.grid.dt;

    Rk45Options opts;
    opts.rtol = tolerance;
    opts.atol = tolerance;
    const DenseResult traj = integrate_dense_partial(rhs, base.grid.t0, base.ode_ic, ts, opts);

    ObservationSet out;
    out.grid = base.grid;
    out.grid.nt = std::max(traj.completed, 1);
    out.var_names = base.var_names;
    for (int v = 0; v < nv; ++v)
        out.values.push_back(traj.samples.col(v).head(std::max(traj.completed, 1)).array());
    return out;
}

ObservationSet simulate_ode(const SystemDefinition& def, double tolerance) {
    if (def.spatial_dims != 0) throw InputError("system", "not an ODE system");
    const int nt = def.grid.nt;
    const int nv = def.num_vars;

    OdeRhs rhs = [&def, nv](double, const Eigen::VectorXd& y, Eigen::VectorXd& dydt) {
        for (int v = 0; v < nv; ++v) {
            double acc = 0.0;
            for (const auto& [spec, coeff] : def.rhs[static_cast<std::size_t>(v)]) {
                double term = coeff;
                for (std::size_t j = 0; j < spec.beta.size(); ++j)
                    for (int k = 0; k < spec.beta[j]; ++k) term *= y[static_cast<Eigen::Index>(j)];
                acc += term;
            }
            dydt[v] = acc;
        }
    };

    std::vector<double> ts(static_cast<std::size_t>(nt));
    for (int n = 0; n < nt; ++n) ts[static_cast<std::size_t>(n)] = def.grid.t0 + n * def.grid.dt;

    Rk45Options opts;
    opts.rtol = tolerance;
    opts.atol = tolerance;
    const Eigen::MatrixXd traj = integrate_dense(rhs, def.grid.t0, def.ode_ic, ts, opts);

    ObservationSet data;
    data.grid = def.grid;
    data.var_names = def.var_names;
    for (int v = 0; v < nv; ++v) data.values.push_back(traj.col(v).array());
    data.validate();
    return data;
}

} // namespace weakident
