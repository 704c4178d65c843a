#ifndef GFDMSIM_GFDM_MODEM_HPP
#define GFDMSIM_GFDM_MODEM_HPP

#include <cmath>
#include <utility>
#include <vector>

#include "gfdmsim/common.hpp"
#include "gfdmsim/fft.hpp"
#include "gfdmsim/gfdm/config.hpp"
#include "gfdmsim/gfdm/filter.hpp"

namespace gfdmsim {

/// K x M complex data symbols, row-major d[k * M + m].
struct SymbolGrid {
    int subcarriers = 0;
    int subsymbols = 0;
    cvec symbols;

    SymbolGrid() = default;
    SymbolGrid(int k, int m) : subcarriers(k), subsymbols(m),
                               symbols(std::size_t(k) * m) {}

    cplx& at(int k, int m) { return symbols[std::size_t(k) * subsymbols + m]; }
    const cplx& at(int k, int m) const {
        return symbols[std::size_t(k) * subsymbols + m];
    }
};

/// One block of complex baseband samples (N, or N + N_cp with prefix).
struct SampleBlock {
    cvec samples;
    bool has_cp = false;
};

inline SampleBlock add_cyclic_prefix(const SampleBlock& block,
                                     const GfdmConfig& config) {
    if (block.has_cp) throw DimensionError("block already has a cyclic prefix");
    const int n = config.block_len();
    if (int(block.samples.size()) != n)
        throw DimensionError("block length != N");
    SampleBlock out;
    out.has_cp = true;
    out.samples.reserve(std::size_t(n + config.cp_len));
    out.samples.insert(out.samples.end(),
                       block.samples.end() - config.cp_len, block.samples.end());
    out.samples.insert(out.samples.end(),
                       block.samples.begin(), block.samples.end());
    return out;
}

inline SampleBlock remove_cyclic_prefix(const SampleBlock& block,
                                        const GfdmConfig& config) {
    if (!block.has_cp) throw DimensionError("block has no cyclic prefix");
    const int n = config.block_len();
    if (int(block.samples.size()) != n + config.cp_len)
        throw DimensionError("block length != N + N_cp");
    SampleBlock out;
    out.has_cp = false;
    out.samples.assign(block.samples.begin() + config.cp_len,
                       block.samples.end());
    return out;
}

/// Per-frequency-sample zero forcing against a channel response:
/// Y(f) = R(f) / H(f), back to the time domain.
inline SampleBlock equalize_zf(const SampleBlock& received, const cvec& freq_response,
                               const GfdmConfig& config) {
    const int n = config.block_len();
    if (received.has_cp) throw DimensionError("remove the cyclic prefix first");
    if (int(received.samples.size()) != n || int(freq_response.size()) != n)
        throw DimensionError("equalize_zf: length mismatch");
    for (const cplx& h : freq_response)
        if (std::abs(h) < 1e-12)
            throw SingularChannel("channel response vanishes on a frequency sample");
    cvec spec = dft_unitary(received.samples);
    for (int f = 0; f < n; ++f) spec[f] /= freq_response[f];
    SampleBlock out;
    out.samples = idft_unitary(spec);
    return out;
}

/// GFDM modulator for one fixed (config, filter) pair. Immutable after
/// construction; safe to share across workers.
class GfdmModem {
public:
    explicit GfdmModem(GfdmConfig config)
        : config_(std::move(config)), filter_(build_filter(config_)) {
        const int k_total = config_.subcarriers;
        // e^{-j 2 pi k n / K} has period K in n; one row per subcarrier.
        twiddle_.assign(std::size_t(k_total) * k_total, cplx(0, 0));
        for (int k = 0; k < k_total; ++k)
            for (int r = 0; r < k_total; ++r)
                twiddle_[std::size_t(k) * k_total + r] =
                    std::polar(1.0, -2.0 * pi * k * r / k_total);
    }

    const GfdmConfig& config() const { return config_; }
    const PrototypeFilter& filter() const { return filter_; }

    /// Literal superposition of time/frequency-shifted pulses,
    /// x[n] = sum_k sum_m g[(n - mK) mod N] e^{-j2pi kn/K} d_{k,m}.
    /// O(N*K*M); kept as the reference path for testing the fast one.
    SampleBlock modulate_direct(const SymbolGrid& grid) const {
        check_grid(grid);
        const int k_total = config_.subcarriers;
        const int m_sub = config_.subsymbols;
        const int n = config_.block_len();
        SampleBlock out;
        out.samples.assign(std::size_t(n), cplx(0, 0));
        for (int k : config_.active_set) {
            const cplx* row = &twiddle_[std::size_t(k) * k_total];
            for (int m = 0; m < m_sub; ++m) {
                const cplx d = grid.at(k, m);
                if (d == cplx(0, 0)) continue;
                const int shift = m * k_total;
                for (int i = 0; i < n; ++i)
                    out.samples[i] += filter_.impulse[mod_floor(i - shift, n)] *
                                      row[i % k_total] * d;
            }
        }
        return out;
    }

    /// Frequency-domain modulator: per-subcarrier M-point DFT, spectral
    /// shaping with the filter coefficients, placement at the subcarrier
    /// bins, one N-point inverse DFT.
    SampleBlock modulate_fast(const SymbolGrid& grid) const {
        check_grid(grid);
        const int k_total = config_.subcarriers;
        const int m_sub = config_.subsymbols;
        const int n = config_.block_len();
        const double root_m = std::sqrt(double(m_sub));

        cvec spec(std::size_t(n), cplx(0, 0));
        cvec sub(std::size_t(m_sub), cplx(0, 0));
        for (int k : config_.active_set) {
            for (int m = 0; m < m_sub; ++m) sub[m] = grid.at(k, m);
            const cvec sub_spec = dft_unitary(sub);
            for (std::size_t i = 0; i < filter_.support.size(); ++i) {
                const int nu = filter_.support[i];
                const int bin = mod_floor(nu - k * m_sub, n);
                spec[bin] += root_m * filter_.support_value[i] *
                             sub_spec[mod_floor(nu, m_sub)];
            }
        }
        SampleBlock out;
        out.samples = idft_unitary(spec);
        return out;
    }

private:
    void check_grid(const SymbolGrid& grid) const {
        if (grid.subcarriers != config_.subcarriers ||
            grid.subsymbols != config_.subsymbols)
            throw DimensionError("grid dimensions do not match config");
    }

    GfdmConfig config_;
    PrototypeFilter filter_;
    cvec twiddle_;
};

/// Frequency samples carrying data: the M owned bins of each active
/// subcarrier, in active_set order then window order. Size K_on * M.
inline std::vector<int> active_allocation(const GfdmConfig& config) {
    const int n = config.block_len();
    std::vector<int> bins;
    bins.reserve(std::size_t(config.allocation_size()));
    const auto window = subcarrier_window(config.subsymbols);
    for (int k : config.active_set)
        for (int nu : window)
            bins.push_back(mod_floor(nu - k * config.subsymbols, n));
    return bins;
}

/// Zero-forcing GFDM demodulator.
///
/// In the unitary DFT domain the system splits into M independent K x K
/// circulants (one per bin residue class mod M) with at most two taps,
/// because the filter spills only into adjacent subcarriers. The inverse is
/// applied by diagonalising each circulant with a K-point FFT; the explicit
/// N x N matrix inverse is only used by the tests.
class ZfDemodulator {
public:
    ZfDemodulator(const GfdmConfig& config, const PrototypeFilter& filter,
                  double condition_limit = 1e12)
        : config_(config) {
        const int k_total = config.subcarriers;
        const int m_sub = config.subsymbols;
        const int n = config.block_len();
        const double root_m = std::sqrt(double(m_sub));

        lambda_.assign(std::size_t(n), cplx(0, 0));
        inv_lambda_.assign(std::size_t(n), cplx(0, 0));
        double lo = 1e300, hi = 0.0;
        for (int rho = 0; rho < m_sub; ++rho) {
            const double c0 = root_m * filter.spectrum[std::size_t(rho)];
            const double c1 =
                root_m * filter.spectrum[std::size_t(mod_floor(rho - m_sub, n))];
            for (int t = 0; t < k_total; ++t) {
                const cplx lam =
                    c0 + c1 * std::polar(1.0, 2.0 * pi * t / k_total);
                lambda_[idx(rho, t)] = lam;
                const double mag = std::abs(lam);
                lo = std::min(lo, mag);
                hi = std::max(hi, mag);
            }
        }
        condition_ = (lo > 0.0) ? hi / lo : 1e300;
        if (!(condition_ < condition_limit))
            throw SingularModulation(
                "modulation matrix not invertible for this filter/config "
                "(condition " + std::to_string(condition_) + ")");
        for (std::size_t i = 0; i < lambda_.size(); ++i)
            inv_lambda_[i] = 1.0 / lambda_[i];

        // |b|^2 spectra for the noise-variance convolution, b = IDFT(1/lambda).
        inv_row_power_spec_.assign(std::size_t(m_sub), cvec());
        noise_factor_uniform_ = 0.0;
        for (int rho = 0; rho < m_sub; ++rho) {
            cvec invl(std::size_t(k_total), cplx(0, 0));
            for (int t = 0; t < k_total; ++t) invl[t] = inv_lambda_[idx(rho, t)];
            cvec b;
            idft_raw(invl, b);
            cvec p(std::size_t(k_total), cplx(0, 0));
            double row_energy = 0.0;
            for (int j = 0; j < k_total; ++j) {
                const double pj = std::norm(b[j]);
                p[j] = pj;
                row_energy += pj;
            }
            noise_factor_uniform_ += row_energy;
            cvec spec;
            dft_raw(p, spec);
            inv_row_power_spec_[rho] = std::move(spec);
        }
        noise_factor_uniform_ /= double(m_sub);
    }

    double condition_number() const { return condition_; }

    /// SNR loss of the ZF inverse under white noise (1.0 for orthogonal
    /// filters such as Dirichlet).
    double noise_enhancement() const { return noise_factor_uniform_; }

    /// Demodulates an equalised spectrum (unitary DFT domain, channel
    /// already divided out). Returns the full K x M grid.
    SymbolGrid demodulate_spectrum(const cvec& spec) const {
        const int k_total = config_.subcarriers;
        const int m_sub = config_.subsymbols;
        const int n = config_.block_len();
        if (int(spec.size()) != n)
            throw DimensionError("spectrum length != N");

        // sub_spec[k][rho] after zero forcing each residue circulant
        cvec sub_spec(std::size_t(n), cplx(0, 0));
        cvec z(std::size_t(k_total), cplx(0, 0)), zf;
        for (int rho = 0; rho < m_sub; ++rho) {
            for (int j = 0; j < k_total; ++j) z[j] = spec[rho + j * m_sub];
            dft_raw(z, zf);
            for (int t = 0; t < k_total; ++t) zf[t] *= inv_lambda_[idx(rho, t)];
            cvec mirrored;
            idft_raw(zf, mirrored);
            for (int k = 0; k < k_total; ++k)
                sub_spec[std::size_t(k) * m_sub + rho] =
                    mirrored[mod_floor(-k, k_total)];
        }

        SymbolGrid grid(k_total, m_sub);
        cvec per_sub(std::size_t(m_sub), cplx(0, 0));
        for (int k = 0; k < k_total; ++k) {
            per_sub.assign(sub_spec.begin() + std::size_t(k) * m_sub,
                           sub_spec.begin() + std::size_t(k + 1) * m_sub);
            const cvec d = idft_unitary(per_sub);
            for (int m = 0; m < m_sub; ++m) grid.at(k, m) = d[m];
        }
        return grid;
    }

    /// Time-domain entry point (no channel): DFT, then the fast inverse.
    SymbolGrid demodulate_zf(const SampleBlock& block) const {
        if (block.has_cp) throw DimensionError("remove the cyclic prefix first");
        if (int(block.samples.size()) != config_.block_len())
            throw DimensionError("block length != N");
        return demodulate_spectrum(dft_unitary(block.samples));
    }

    /// Per-subcarrier noise variance of the demodulated symbols given the
    /// per-bin noise variance after channel equalisation,
    /// u[f] = sigma^2(f) / |H(f)|^2. Exact for the implemented inverse; the
    /// variance does not depend on the sub-symbol index.
    dvec symbol_noise_variance(const dvec& per_bin_var) const {
        const int k_total = config_.subcarriers;
        const int m_sub = config_.subsymbols;
        const int n = config_.block_len();
        if (int(per_bin_var.size()) != n)
            throw DimensionError("per-bin variance length != N");

        dvec out(std::size_t(k_total), 0.0);
        cvec u(std::size_t(k_total), cplx(0, 0)), uf, conv;
        for (int rho = 0; rho < m_sub; ++rho) {
            for (int j = 0; j < k_total; ++j)
                u[j] = per_bin_var[std::size_t(rho + j * m_sub)];
            dft_raw(u, uf);
            for (int t = 0; t < k_total; ++t)
                uf[t] *= inv_row_power_spec_[rho][t];
            idft_raw(uf, conv);
            for (int k = 0; k < k_total; ++k)
                out[k] += conv[mod_floor(-k, k_total)].real();
        }
        for (double& v : out) v /= double(m_sub);
        return out;
    }

    /// White-noise shortcut: all subcarriers see variance u * noise_enhancement().
    double symbol_noise_variance_uniform(double per_bin_var) const {
        return per_bin_var * noise_factor_uniform_;
    }

private:
    std::size_t idx(int rho, int t) const {
        return std::size_t(rho) * config_.subcarriers + t;
    }

    GfdmConfig config_;
    cvec lambda_;
    cvec inv_lambda_;
    std::vector<cvec> inv_row_power_spec_;
    double noise_factor_uniform_ = 0.0;
    double condition_ = 0.0;
};

}  // namespace gfdmsim

#endif
