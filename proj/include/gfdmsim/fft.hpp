#ifndef GFDMSIM_FFT_HPP
#define GFDMSIM_FFT_HPP

#include <unsupported/Eigen/FFT>

#include "gfdmsim/common.hpp"

namespace gfdmsim {

namespace detail {
// One FFT engine per thread; Eigen caches a plan per transform size inside.
inline Eigen::FFT<double>& fft_engine() {
    thread_local Eigen::FFT<double> engine;
    return engine;
}
}  // namespace detail

/// Unnormalised forward DFT: X[f] = sum_n x[n] e^{-j2pi f n / N}.
inline void dft_raw(const cvec& in, cvec& out) {
    if (in.size() <= 1) {  // kissfft rejects trivial sizes
        out = in;
        return;
    }
    detail::fft_engine().fwd(out, in);
}

/// Inverse of dft_raw (includes the 1/N factor).
inline void idft_raw(const cvec& in, cvec& out) {
    if (in.size() <= 1) {
        out = in;
        return;
    }
    detail::fft_engine().inv(out, in);
}

/// Unitary DFT (1/sqrt(N) both ways); the project-wide convention.
inline cvec dft_unitary(const cvec& in) {
    cvec out;
    dft_raw(in, out);
    const double s = 1.0 / std::sqrt(double(in.size()));
    for (auto& v : out) v *= s;
    return out;
}

inline cvec idft_unitary(const cvec& in) {
    cvec out;
    idft_raw(in, out);
    const double s = std::sqrt(double(in.size()));
    for (auto& v : out) v *= s;
    return out;
}

}  // namespace gfdmsim

#endif
