#pragma once

#include <complex>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "weakident/dictionary.hpp"
#include "weakident/types.hpp"

namespace weakident {

/// A registered benchmark system: grid, dictionary caps, true model, and
/// initial condition. ODE systems have spatial_dims = 0; 1D PDEs are
/// simulated pseudospectrally on periodic domains.
struct SystemDefinition {
    std::string name;
    int num_vars = 1;
    int spatial_dims = 0;
    GridSpec grid;
    int alpha_cap = 0;
    int beta_cap = 0;
    double trim_threshold = 0.05; // per-system default (0.2 for KS-type data)
    std::vector<std::string> var_names;
    std::vector<std::vector<std::pair<FeatureSpec, double>>> rhs; // per variable

    // Simulation controls.
    int sim_substeps = 1;             // internal ETDRK4 steps per output step
    bool duplicate_last_column = false; // grid stores both endpoints of the period
    bool complex_field = false;         // evolve u + iv as one complex field (NLS)
    std::function<double(double)> ic;                       // real scalar PDE
    std::function<std::complex<double>(double)> ic_complex; // complex PDE
    Eigen::VectorXd ode_ic;                                 // ODE initial state
};

/// Registered Table-style systems: transport, kdv, ks, nls, linear2d,
/// vanderpol, duffing, lotka_volterra, lorenz.
const SystemDefinition& system_by_name(const std::string& name);
std::vector<std::string> registered_systems();

/// Dense true coefficient vectors over `dict`, one per dependent variable.
std::vector<Coefficients> true_coefficients(const SystemDefinition& def, const Dictionary& dict);

/// Dispatches on spatial_dims.
ObservationSet simulate(const SystemDefinition& def);

/// Adaptive RK45 integration of the polynomial right-hand side, dense output
/// on the uniform grid.
ObservationSet simulate_ode(const SystemDefinition& def, double tolerance = 1e-10);

/// Pseudospectral simulation on a periodic domain: exact spectral propagation
/// for linear systems, ETDRK4 otherwise.
ObservationSet simulate_pde_1d(const SystemDefinition& def);

/// Forward-simulates an identified ODE model (coefficients over `dict`) from
/// the system's initial condition on its grid. Stops quietly at blow-up; the
/// returned fields hold only the completed samples.
ObservationSet simulate_ode_model_partial(const SystemDefinition& base, const Dictionary& dict,
                                          const std::vector<Coefficients>& model,
                                          double tolerance = 1e-10);

} // namespace weakident
