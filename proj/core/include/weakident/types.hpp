#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "weakident/errors.hpp"

namespace weakident {

/// Uniform space-time lattice. Axes are indexed spatial-first: axis 0 is x,
/// axis 1 is y (2D only), and the last axis (index spatial_dims) is time.
/// Flat data layout is t slowest, then y, then x.
struct GridSpec {
    int spatial_dims = 0; // 0 = ODE system (no spatial axes), 1 or 2 = PDE
    std::array<int, 2> nx{0, 0};
    int nt = 0;
    std::array<double, 2> dx{1.0, 1.0};
    double dt = 1.0;
    std::array<double, 2> x0{0.0, 0.0};
    double t0 = 0.0;

    int num_axes() const { return spatial_dims + 1; }
    bool is_time_axis(int axis) const { return axis == spatial_dims; }

    int axis_count(int axis) const {
        return is_time_axis(axis) ? nt : nx[static_cast<std::size_t>(axis)];
    }
    double axis_spacing(int axis) const {
        return is_time_axis(axis) ? dt : dx[static_cast<std::size_t>(axis)];
    }

    std::int64_t total_points() const {
        std::int64_t p = nt;
        for (int a = 0; a < spatial_dims; ++a) p *= nx[static_cast<std::size_t>(a)];
        return p;
    }

    /// Product of the grid spacings over all axes (the quadrature cell).
    double cell_volume() const {
        double v = dt;
        for (int a = 0; a < spatial_dims; ++a) v *= dx[static_cast<std::size_t>(a)];
        return v;
    }

    std::int64_t flat_index(int ix, int iy, int it) const {
        std::int64_t idx = it;
        if (spatial_dims == 2) idx = idx * nx[1] + iy;
        if (spatial_dims >= 1) idx = idx * nx[0] + ix;
        return idx;
    }

    void validate() const {
        if (spatial_dims < 0 || spatial_dims > 2)
            throw InputError("grid", "spatial_dims must be 0, 1 or 2");
        if (nt < 3) throw InputError("grid", "nt must be >= 3");
        if (dt <= 0.0) throw InputError("grid", "dt must be > 0");
        for (int a = 0; a < spatial_dims; ++a) {
            if (nx[static_cast<std::size_t>(a)] < 3)
                throw InputError("grid", "spatial counts must be >= 3");
            if (dx[static_cast<std::size_t>(a)] <= 0.0)
                throw InputError("grid", "spatial spacings must be > 0");
        }
    }
};

/// Per-variable real fields sampled on a GridSpec.
struct ObservationSet {
    GridSpec grid;
    std::vector<std::string> var_names;
    std::vector<Eigen::ArrayXd> values; // one flat array per variable

    int num_vars() const { return static_cast<int>(values.size()); }

    void validate() const {
        grid.validate();
        if (values.empty()) throw InputError("data", "no variables");
        if (!var_names.empty() && var_names.size() != values.size())
            throw InputError("data", "variable name count mismatch");
        const std::int64_t n = grid.total_points();
        for (const auto& v : values) {
            if (v.size() != n) throw InputError("size", "field length does not match grid");
            if (!v.isFinite().all()) throw InputError("values", "non-finite data values");
        }
    }
};

/// Default variable names: u,v,w for PDE data; x,y,z for ODE systems.
inline std::vector<std::string> default_var_names(int num_vars, int spatial_dims) {
    static const char* pde[] = {"u", "v", "w"};
    static const char* ode[] = {"x", "y", "z"};
    std::vector<std::string> names;
    for (int i = 0; i < num_vars; ++i) {
        if (i < 3)
            names.push_back(spatial_dims > 0 ? pde[i] : ode[i]);
        else
            names.push_back((spatial_dims > 0 ? "u" : "x") + std::to_string(i + 1));
    }
    return names;
}

/// One dictionary entry: the |alpha|-th derivative of the monomial
/// prod_v u_v^{beta_v}. alpha has one entry per spatial axis, beta one entry
/// per dependent variable.
struct FeatureSpec {
    std::vector<int> alpha;
    std::vector<int> beta;

    int total_derivative() const {
        int s = 0;
        for (int a : alpha) s += a;
        return s;
    }
    int total_degree() const {
        int s = 0;
        for (int b : beta) s += b;
        return s;
    }
    bool is_constant() const { return total_degree() == 0 && total_derivative() == 0; }

    friend bool operator==(const FeatureSpec& a, const FeatureSpec& b) {
        return a.alpha == b.alpha && a.beta == b.beta;
    }
    /// Dictionary order: (total monomial degree, beta, alpha), lexicographic.
    friend bool operator<(const FeatureSpec& a, const FeatureSpec& b) {
        const int da = a.total_degree(), db = b.total_degree();
        if (da != db) return da < db;
        if (a.beta != b.beta) return a.beta < b.beta;
        return a.alpha < b.alpha;
    }
};

/// Length-L coefficient vector over a dictionary, one slot per feature.
struct Coefficients {
    Eigen::VectorXd values;

    std::vector<int> support() const {
        std::vector<int> s;
        for (int l = 0; l < values.size(); ++l)
            if (values[l] != 0.0) s.push_back(l);
        return s;
    }
};

/// Grid index of a test-region center; iy is unused for 1D, ix and iy for 0D.
struct Center {
    int ix = 0;
    int iy = 0;
    int it = 0;
};

} // namespace weakident
