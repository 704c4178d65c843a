#ifndef GFDMSIM_GFDM_FILTER_HPP
#define GFDMSIM_GFDM_FILTER_HPP

#include <cmath>
#include <vector>

#include "gfdmsim/common.hpp"
#include "gfdmsim/fft.hpp"
#include "gfdmsim/gfdm/config.hpp"

namespace gfdmsim {

/// Prototype pulse, defined in the frequency domain on the N-point DFT grid.
///
/// spectrum[] holds the unitary-DFT coefficients of the impulse response;
/// support[] lists the bin offsets nu (relative to the subcarrier centre)
/// where the spectrum is nonzero. |nu| < M for every supported filter, so a
/// subcarrier spills at most into its immediate neighbours.
struct PrototypeFilter {
    cvec impulse;                 // g[n], length N, unit energy
    dvec spectrum;                // G over all N bins (real-valued shapes)
    std::vector<int> support;     // offsets with spectrum != 0
    dvec support_value;           // spectrum at those offsets

    double spectrum_at(int offset, int n) const {
        return spectrum[std::size_t(mod_floor(offset, n))];
    }
};

/// The M bins "owned" by one subcarrier: a centred window on the N-grid.
/// Odd M: -(M-1)/2 .. (M-1)/2; even M: -M/2 .. M/2-1.
inline std::vector<int> subcarrier_window(int subsymbols) {
    std::vector<int> w(std::size_t(subsymbols), 0);
    const int start = (subsymbols % 2 == 1) ? -(subsymbols - 1) / 2
                                            : -subsymbols / 2;
    for (int i = 0; i < subsymbols; ++i) w[i] = start + i;
    return w;
}

/// Builds the unit-energy prototype filter for a config.
///
/// Dirichlet: rectangular spectrum over exactly the M owned bins (periodic
/// sinc in time). Raised cosine with roll-off a: the standard RC taper with
/// Nyquist interval M bins, sampled on the integer DFT grid; support width
/// (1+a)M stays inside the two adjacent subcarriers. a = 0 reduces to the
/// rectangle and is returned as the Dirichlet coefficients exactly.
inline PrototypeFilter build_filter(const GfdmConfig& config) {
    config.validate();
    const int m_sub = config.subsymbols;
    const int n = config.block_len();

    PrototypeFilter f;
    f.spectrum.assign(std::size_t(n), 0.0);

    const bool rect = config.filter == FilterKind::Dirichlet ||
                      config.rolloff <= 0.0;
    if (rect) {
        for (int nu : subcarrier_window(m_sub)) {
            f.support.push_back(nu);
            f.support_value.push_back(1.0);
        }
    } else {
        const double a = config.rolloff;
        const double half = 0.5 * m_sub;
        for (int nu = -(m_sub - 1); nu <= m_sub - 1; ++nu) {
            const double av = std::abs(double(nu));
            double h;
            if (av <= (1.0 - a) * half) {
                h = 1.0;
            } else if (av < (1.0 + a) * half) {
                h = 0.5 * (1.0 + std::cos(pi * (av - (1.0 - a) * half) /
                                          (a * m_sub)));
            } else {
                continue;
            }
            if (h <= 0.0) continue;
            f.support.push_back(nu);
            f.support_value.push_back(h);
        }
    }

    double energy = 0.0;
    for (double v : f.support_value) energy += v * v;
    const double scale = 1.0 / std::sqrt(energy);
    for (std::size_t i = 0; i < f.support.size(); ++i) {
        f.support_value[i] *= scale;
        f.spectrum[std::size_t(mod_floor(f.support[i], n))] = f.support_value[i];
    }

    cvec spec_c(f.spectrum.begin(), f.spectrum.end());
    f.impulse = idft_unitary(spec_c);
    return f;
}

}  // namespace gfdmsim

#endif
