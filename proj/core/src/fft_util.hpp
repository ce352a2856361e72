#pragma once

#include <fftw3.h>

#include <array>
#include <complex>

namespace weakident::detail {

/// Smallest 5-smooth number >= n (FFTW-friendly transform size).
inline int next_fast_size(int n) {
    if (n < 1) return 1;
    for (int cand = n;; ++cand) {
        int r = cand;
        for (int f : {2, 3, 5})
            while (r % f == 0) r /= f;
        if (r == 1) return cand;
    }
}

/// Fixed-size real 1D transform pair with owned FFTW buffers.
class RealFft1D {
public:
    explicit RealFft1D(int size)
        : n_(size),
          real_(fftw_alloc_real(static_cast<std::size_t>(size))),
          cplx_(fftw_alloc_complex(static_cast<std::size_t>(size / 2 + 1))),
          fwd_(fftw_plan_dft_r2c_1d(size, real_, cplx_, FFTW_ESTIMATE)),
          inv_(fftw_plan_dft_c2r_1d(size, cplx_, real_, FFTW_ESTIMATE)) {}

    RealFft1D(const RealFft1D&) = delete;
    RealFft1D& operator=(const RealFft1D&) = delete;

    ~RealFft1D() {
        fftw_destroy_plan(inv_);
        fftw_destroy_plan(fwd_);
        fftw_free(cplx_);
        fftw_free(real_);
    }

    int size() const { return n_; }
    int spectrum_size() const { return n_ / 2 + 1; }

    void forward(const double* in, std::complex<double>* out) {
        for (int i = 0; i < n_; ++i) real_[i] = in[i];
        fftw_execute(fwd_);
        for (int i = 0; i < spectrum_size(); ++i)
            out[i] = {cplx_[i][0], cplx_[i][1]};
    }

    /// Inverse including the 1/n scaling.
    void inverse(const std::complex<double>* in, double* out) {
        for (int i = 0; i < spectrum_size(); ++i) {
            cplx_[i][0] = in[i].real();
            cplx_[i][1] = in[i].imag();
        }
        fftw_execute(inv_);
        const double scale = 1.0 / n_;
        for (int i = 0; i < n_; ++i) out[i] = real_[i] * scale;
    }

private:
    int n_;
    double* real_;
    fftw_complex* cplx_;
    fftw_plan fwd_, inv_;
};

/// Fixed-size complex-to-complex 1D transform pair.
class ComplexFft1D {
public:
    explicit ComplexFft1D(int size)
        : n_(size),
          buf_(fftw_alloc_complex(static_cast<std::size_t>(size))),
          fwd_(fftw_plan_dft_1d(size, buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE)),
          inv_(fftw_plan_dft_1d(size, buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE)) {}

    ComplexFft1D(const ComplexFft1D&) = delete;
    ComplexFft1D& operator=(const ComplexFft1D&) = delete;

    ~ComplexFft1D() {
        fftw_destroy_plan(inv_);
        fftw_destroy_plan(fwd_);
        fftw_free(buf_);
    }

    int size() const { return n_; }

    void forward(std::complex<double>* data) { run(fwd_, data, 1.0); }
    /// Inverse including the 1/n scaling.
    void inverse(std::complex<double>* data) { run(inv_, data, 1.0 / n_); }

private:
    void run(fftw_plan plan, std::complex<double>* data, double scale) {
        for (int i = 0; i < n_; ++i) {
            buf_[i][0] = data[i].real();
            buf_[i][1] = data[i].imag();
        }
        fftw_execute(plan);
        for (int i = 0; i < n_; ++i) data[i] = scale * std::complex<double>(buf_[i][0], buf_[i][1]);
    }

    int n_;
    fftw_complex* buf_;
    fftw_plan fwd_, inv_;
};

/// Iterates every 1D line along `axis` of an array with sizes
/// dims = {x, y, t} (x fastest in memory; unused trailing dims = 1).
/// Calls f(base_offset, stride) once per line.
template <typename F>
void for_each_line(const std::array<int, 3>& dims, int num_axes, int axis, F&& f) {
    std::array<std::int64_t, 3> stride{1, dims[0], static_cast<std::int64_t>(dims[0]) * dims[1]};
    std::array<int, 3> outer_sizes{};
    std::array<std::int64_t, 3> outer_strides{};
    int n_outer = 0;
    for (int a = 0; a < num_axes; ++a) {
        if (a == axis) continue;
        outer_sizes[n_outer] = dims[static_cast<std::size_t>(a)];
        outer_strides[n_outer] = stride[static_cast<std::size_t>(a)];
        ++n_outer;
    }
    if (n_outer == 0) {
        f(std::int64_t{0}, stride[static_cast<std::size_t>(axis)]);
        return;
    }
    if (n_outer == 1) {
        for (int i = 0; i < outer_sizes[0]; ++i)
            f(i * outer_strides[0], stride[static_cast<std::size_t>(axis)]);
        return;
    }
    for (int j = 0; j < outer_sizes[1]; ++j)
        for (int i = 0; i < outer_sizes[0]; ++i)
            f(j * outer_strides[1] + i * outer_strides[0], stride[static_cast<std::size_t>(axis)]);
}

} // namespace weakident::detail
