#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "weakident/errors.hpp"
#include "weakident/systems.hpp"
#include "fft_util.hpp"

namespace weakident {

namespace {

using Cplx = std::complex<double>;
using CVec = std::vector<Cplx>;

constexpr Cplx kI{0.0, 1.0};

// Signed FFT wavenumber layout: 0, 1, ..., n/2, -(n/2-1), ..., -1 (cycles
// scaled to the periodic domain length).
std::vector<double> wavenumbers(int n, double domain_length) {
    std::vector<double> k(static_cast<std::size_t>(n));
    const double base = 2.0 * std::numbers::pi / domain_length;
    for (int j = 0; j < n; ++j) {
        const int signed_j = j <= n / 2 ? j : j - n;
        k[static_cast<std::size_t>(j)] = base * signed_j;
    }
    return k;
}

// Nonlinear part N(u) = sum over degree>=2 features of c * d^alpha(u^beta),
// evaluated pseudospectrally with a 2/3-rule dealias mask. Operates on and
// returns spectral-space vectors.
class NonlinearTerm {
public:
    NonlinearTerm(const SystemDefinition& def, const std::vector<double>& k,
                  detail::ComplexFft1D& fft)
        : k_(k), fft_(fft) {
        const int n = fft.size();
        mask_.assign(static_cast<std::size_t>(n), 1.0);
        for (int j = 0; j < n; ++j) {
            const int signed_j = j <= n / 2 ? j : j - n;
            if (std::abs(signed_j) > n / 3) mask_[static_cast<std::size_t>(j)] = 0.0;
        }
        for (const auto& [spec, c] : def.rhs[0])
            if (spec.total_degree() >= 2) terms_.emplace_back(spec.alpha[0], spec.beta[0], c);
    }

    bool empty() const { return terms_.empty(); }

    CVec operator()(const CVec& u_hat) const {
        const int n = fft_.size();
        CVec out(static_cast<std::size_t>(n), Cplx{0.0, 0.0});
        if (terms_.empty()) return out;

        CVec u_phys(u_hat);
        for (int j = 0; j < n; ++j) u_phys[static_cast<std::size_t>(j)] *= mask_[static_cast<std::size_t>(j)];
        fft_.inverse(u_phys.data());

        for (const auto& [alpha, beta, c] : terms_) {
            CVec field(static_cast<std::size_t>(n));
            for (int j = 0; j < n; ++j) {
                const double ur = u_phys[static_cast<std::size_t>(j)].real();
                double p = 1.0;
                for (int b = 0; b < beta; ++b) p *= ur;
                field[static_cast<std::size_t>(j)] = Cplx{p, 0.0};
            }
            fft_.forward(field.data());
            for (int j = 0; j < n; ++j) {
                Cplx factor{c, 0.0};
                for (int a = 0; a < alpha; ++a) factor *= kI * k_[static_cast<std::size_t>(j)];
                out[static_cast<std::size_t>(j)] +=
                    factor * field[static_cast<std::size_t>(j)] * mask_[static_cast<std::size_t>(j)];
            }
        }
        return out;
    }

private:
    const std::vector<double>& k_;
    detail::ComplexFft1D& fft_;
    std::vector<double> mask_;
    std::vector<std::tuple<int, int, double>> terms_;
};

// ETDRK4 phi-coefficients via the mean-of-contour trick (32 points on the
// unit circle around each h*L value), stable for symbols near zero.
struct EtdCoeffs {
    CVec E, E2, Q, f1, f2, f3;
};

EtdCoeffs etdrk4_coefficients(const CVec& symbol, double h) {
    const int n = static_cast<int>(symbol.size());
    const int M = 32;
    EtdCoeffs c;
    c.E.resize(symbol.size());
    c.E2.resize(symbol.size());
    c.Q.assign(symbol.size(), Cplx{0, 0});
    c.f1.assign(symbol.size(), Cplx{0, 0});
    c.f2.assign(symbol.size(), Cplx{0, 0});
    c.f3.assign(symbol.size(), Cplx{0, 0});

    for (int j = 0; j < n; ++j) {
        const Cplx hl = h * symbol[static_cast<std::size_t>(j)];
        c.E[static_cast<std::size_t>(j)] = std::exp(hl);
        c.E2[static_cast<std::size_t>(j)] = std::exp(0.5 * hl);
        Cplx q{0, 0}, f1{0, 0}, f2{0, 0}, f3{0, 0};
        for (int m = 0; m < M; ++m) {
            const double theta = 2.0 * std::numbers::pi * (m + 0.5) / M;
            const Cplx z = hl + std::exp(kI * theta);
            const Cplx ez = std::exp(z);
            const Cplx z2 = z * z, z3 = z2 * z;
            q += (std::exp(0.5 * z) - 1.0) / z;
            f1 += (-4.0 - z + ez * (4.0 - 3.0 * z + z2)) / z3;
            f2 += (2.0 + z + ez * (-2.0 + z)) / z3;
            f3 += (-4.0 - 3.0 * z - z2 + ez * (4.0 - z)) / z3;
        }
        const double inv = h / M;
        c.Q[static_cast<std::size_t>(j)] = q * inv;
        c.f1[static_cast<std::size_t>(j)] = f1 * inv;
        c.f2[static_cast<std::size_t>(j)] = f2 * inv;
        c.f3[static_cast<std::size_t>(j)] = f3 * inv;
    }
    return c;
}

void etdrk4_step(const EtdCoeffs& cf, const NonlinearTerm& N, CVec& v) {
    const std::size_t n = v.size();
    const CVec Nv = N(v);
    CVec a(n), b(n), c(n);
    for (std::size_t j = 0; j < n; ++j) a[j] = cf.E2[j] * v[j] + cf.Q[j] * Nv[j];
    const CVec Na = N(a);
    for (std::size_t j = 0; j < n; ++j) b[j] = cf.E2[j] * v[j] + cf.Q[j] * Na[j];
    const CVec Nb = N(b);
    for (std::size_t j = 0; j < n; ++j) c[j] = cf.E2[j] * a[j] + cf.Q[j] * (2.0 * Nb[j] - Nv[j]);
    const CVec Nc = N(c);
    for (std::size_t j = 0; j < n; ++j)
        v[j] = cf.E[j] * v[j] + cf.f1[j] * Nv[j] + 2.0 * cf.f2[j] * (Na[j] + Nb[j]) +
               cf.f3[j] * Nc[j];
}

void check_blowup(const CVec& u_phys, const std::string& name, int step, double limit) {
    for (const Cplx& v : u_phys) {
        const double mag = std::abs(v);
        if (!std::isfinite(mag) || mag > limit)
            throw NumericalError("pde simulation of '" + name + "' blew up at internal step " +
                                 std::to_string(step));
    }
}

} // namespace

ObservationSet simulate_pde_1d(const SystemDefinition& def) {
    if (def.spatial_dims != 1) throw InputError("system", "not a 1D PDE system");
    const GridSpec& g = def.grid;
    const int nx_out = g.nx[0];
    const int n = def.duplicate_last_column ? nx_out - 1 : nx_out;
    const double domain = n * g.dx[0];
    const std::vector<double> k = wavenumbers(n, domain);

    detail::ComplexFft1D fft(n);

    // Initial condition in spectral space.
    CVec v(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        const double x = g.x0[0] + j * g.dx[0];
        v[static_cast<std::size_t>(j)] =
            def.complex_field ? def.ic_complex(x) : Cplx{def.ic(x), 0.0};
    }
    double amp0 = 0.0;
    for (const Cplx& val : v) amp0 = std::max(amp0, std::abs(val));
    const double blow_limit = std::max(1.0, amp0) * 1e6;
    fft.forward(v.data());

    // Linear symbol. The complex-field route (NLS) hard-codes
    // psi_t = -0.5 i psi_xx - i |psi|^2 psi, which reproduces the registered
    // real system for u = Re, v = Im.
    CVec symbol(static_cast<std::size_t>(n), Cplx{0, 0});
    if (def.complex_field) {
        for (int j = 0; j < n; ++j) {
            const double kj = k[static_cast<std::size_t>(j)];
            symbol[static_cast<std::size_t>(j)] = 0.5 * kI * kj * kj;
        }
    } else {
        for (const auto& [spec, c] : def.rhs[0]) {
            if (spec.total_degree() != 1) continue;
            for (int j = 0; j < n; ++j) {
                Cplx factor{c, 0.0};
                for (int a = 0; a < spec.alpha[0]; ++a)
                    factor *= kI * k[static_cast<std::size_t>(j)];
                symbol[static_cast<std::size_t>(j)] += factor;
            }
        }
    }

    ObservationSet data;
    data.grid = g;
    data.var_names = def.var_names;
    const int n_fields = def.complex_field ? 2 : 1;
    for (int f = 0; f < n_fields; ++f)
        data.values.push_back(Eigen::ArrayXd::Zero(g.total_points()));

    auto emit = [&](int row) {
        CVec phys(v);
        fft.inverse(phys.data());
        check_blowup(phys, def.name, row, blow_limit);
        const std::int64_t base = static_cast<std::int64_t>(row) * nx_out;
        for (int j = 0; j < nx_out; ++j) {
            const Cplx& val = phys[static_cast<std::size_t>(j % n)];
            data.values[0][base + j] = val.real();
            if (n_fields == 2) data.values[1][base + j] = val.imag();
        }
    };

    emit(0);

    NonlinearTerm nonlinear_real(def, k, fft);
    const bool complex_nl = def.complex_field;
    const bool pure_linear = !complex_nl && nonlinear_real.empty();

    if (pure_linear) {
        // Exact spectral propagator per output step.
        CVec prop(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j)
            prop[static_cast<std::size_t>(j)] = std::exp(g.dt * symbol[static_cast<std::size_t>(j)]);
        for (int row = 1; row < g.nt; ++row) {
            for (int j = 0; j < n; ++j) v[static_cast<std::size_t>(j)] *= prop[static_cast<std::size_t>(j)];
            emit(row);
        }
        data.validate();
        return data;
    }

    const int substeps = std::max(1, def.sim_substeps);
    const double h = g.dt / substeps;
    const EtdCoeffs cf = etdrk4_coefficients(symbol, h);

    if (complex_nl) {
        // N(psi) = -i |psi|^2 psi evaluated pseudospectrally.
        std::vector<double> mask(static_cast<std::size_t>(n), 1.0);
        for (int j = 0; j < n; ++j) {
            const int sj = j <= n / 2 ? j : j - n;
            if (std::abs(sj) > n / 3) mask[static_cast<std::size_t>(j)] = 0.0;
        }
        auto N = [&](const CVec& u_hat) {
            CVec phys(u_hat);
            for (int j = 0; j < n; ++j) phys[static_cast<std::size_t>(j)] *= mask[static_cast<std::size_t>(j)];
            fft.inverse(phys.data());
            for (int j = 0; j < n; ++j) {
                const Cplx p = phys[static_cast<std::size_t>(j)];
                phys[static_cast<std::size_t>(j)] = -kI * std::norm(p) * p;
            }
            fft.forward(phys.data());
            for (int j = 0; j < n; ++j) phys[static_cast<std::size_t>(j)] *= mask[static_cast<std::size_t>(j)];
            return phys;
        };
        for (int row = 1; row < g.nt; ++row) {
            for (int s = 0; s < substeps; ++s) {
                const CVec Nv = N(v);
                CVec a(v.size()), b2(v.size()), c2(v.size());
                for (std::size_t j = 0; j < v.size(); ++j) a[j] = cf.E2[j] * v[j] + cf.Q[j] * Nv[j];
                const CVec Na = N(a);
                for (std::size_t j = 0; j < v.size(); ++j) b2[j] = cf.E2[j] * v[j] + cf.Q[j] * Na[j];
                const CVec Nb = N(b2);
                for (std::size_t j = 0; j < v.size(); ++j)
                    c2[j] = cf.E2[j] * a[j] + cf.Q[j] * (2.0 * Nb[j] - Nv[j]);
                const CVec Nc = N(c2);
                for (std::size_t j = 0; j < v.size(); ++j)
                    v[j] = cf.E[j] * v[j] + cf.f1[j] * Nv[j] + 2.0 * cf.f2[j] * (Na[j] + Nb[j]) +
                           cf.f3[j] * Nc[j];
            }
            emit(row);
        }
        data.validate();
        return data;
    }

    for (int row = 1; row < g.nt; ++row) {
        for (int s = 0; s < substeps; ++s) etdrk4_step(cf, nonlinear_real, v);
        emit(row);
    }
    data.validate();
    return data;
}

} // namespace weakident
