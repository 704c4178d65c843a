#ifndef GFDMSIM_CHANNEL_CHANNEL_HPP
#define GFDMSIM_CHANNEL_CHANNEL_HPP

#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "gfdmsim/common.hpp"
#include "gfdmsim/gfdm/modem.hpp"
#include "gfdmsim/rng.hpp"

namespace gfdmsim {

enum class ChannelKind { Awgn, FlatRayleigh, Tdl };

/// Tapped-delay-line power profile; delays in samples, powers sum to 1.
struct TdlProfile {
    std::vector<int> delays;
    dvec powers;

    void validate() const {
        if (delays.size() != powers.size() || delays.empty())
            throw ConfigError("TDL profile: delays/powers mismatch");
        double sum = 0.0;
        for (std::size_t i = 0; i < delays.size(); ++i) {
            if (delays[i] < 0) throw ConfigError("TDL delay must be >= 0");
            if (powers[i] <= 0.0) throw ConfigError("TDL power must be > 0");
            sum += powers[i];
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw ConfigError("TDL powers must sum to 1");
    }

    int max_delay() const {
        int d = 0;
        for (int v : delays) d = std::max(d, v);
        return d;
    }

    /// Six-tap exponential profile, RMS delay spread ~0.5 us at 30.72 MHz
    /// sampling (about 15 samples), truncated well below the 128-sample CP.
    static TdlProfile exp6() {
        TdlProfile p;
        p.delays = {0, 8, 16, 26, 38, 55};
        const double tau = 15.36;
        double sum = 0.0;
        for (int d : p.delays) {
            p.powers.push_back(std::exp(-double(d) / tau));
            sum += p.powers.back();
        }
        for (double& v : p.powers) v /= sum;
        return p;
    }
};

/// One channel draw: complex taps, the frequency response over the N-point
/// grid and the per-sample noise variance.
struct ChannelRealization {
    std::vector<int> tap_delays;
    cvec tap_gains;
    cvec freq_response;   // H(f) = sum_l h_l e^{-j2pi f d_l / N}, length N
    double noise_var = 0.0;

    bool cp_covers_delay_spread(int cp_len) const {
        for (int d : tap_delays)
            if (d > cp_len) return false;
        return true;
    }
};

inline cvec taps_to_freq_response(const std::vector<int>& delays,
                                  const cvec& gains, int n) {
    cvec h(std::size_t(n), cplx(0, 0));
    for (int f = 0; f < n; ++f) {
        cplx acc(0, 0);
        for (std::size_t l = 0; l < delays.size(); ++l)
            acc += gains[l] * std::polar(1.0, -2.0 * pi * f * delays[l] / n);
        h[f] = acc;
    }
    return h;
}

/// AWGN: H == 1. FlatRayleigh: one CN(0,1) tap. Tdl: complex Gaussian taps
/// with the profile's powers (E sum|h_l|^2 = 1).
inline ChannelRealization draw_channel(ChannelKind kind, const TdlProfile* profile,
                                       int n, double noise_var, Rng& rng) {
    ChannelRealization ch;
    ch.noise_var = noise_var;
    switch (kind) {
        case ChannelKind::Awgn:
            ch.tap_delays = {0};
            ch.tap_gains = {cplx(1, 0)};
            ch.freq_response.assign(std::size_t(n), cplx(1, 0));
            return ch;
        case ChannelKind::FlatRayleigh: {
            const cplx h = rng.cnormal();
            ch.tap_delays = {0};
            ch.tap_gains = {h};
            ch.freq_response.assign(std::size_t(n), h);
            return ch;
        }
        case ChannelKind::Tdl: {
            if (!profile) throw ConfigError("TDL draw needs a profile");
            profile->validate();
            ch.tap_delays = profile->delays;
            ch.tap_gains.resize(profile->powers.size());
            for (std::size_t l = 0; l < profile->powers.size(); ++l)
                ch.tap_gains[l] = std::sqrt(profile->powers[l]) * rng.cnormal();
            ch.freq_response = taps_to_freq_response(ch.tap_delays, ch.tap_gains, n);
            return ch;
        }
    }
    throw ConfigError("unknown channel kind");
}

/// Linear convolution with the taps plus white complex noise of variance
/// noise_var per sample. With a CP at least as long as the delay spread the
/// block seen after CP removal is the circular convolution.
inline SampleBlock apply_channel(const SampleBlock& tx, const ChannelRealization& ch,
                                 Rng& rng) {
    SampleBlock out;
    out.has_cp = tx.has_cp;
    const std::size_t n = tx.samples.size();
    out.samples.assign(n, cplx(0, 0));
    for (std::size_t l = 0; l < ch.tap_gains.size(); ++l) {
        const int d = ch.tap_delays[l];
        const cplx g = ch.tap_gains[l];
        for (std::size_t i = std::size_t(d); i < n; ++i)
            out.samples[i] += g * tx.samples[i - d];
    }
    if (ch.noise_var > 0.0) {
        const double s = std::sqrt(ch.noise_var);
        for (auto& v : out.samples) v += s * rng.cnormal();
    }
    return out;
}

// --- snapshot files -------------------------------------------------------
//
// Binary replay format: 16-byte header {magic u32, N u32, count u64}, then
// one record per realisation of N complex pairs as little-endian doubles.

inline constexpr std::uint32_t snapshot_magic = 0x4746444Du;  // "GFDM"

inline void save_snapshots(const std::string& path,
                           const std::vector<cvec>& responses) {
    if (responses.empty()) throw IoError("no snapshots to save");
    const std::uint32_t n = std::uint32_t(responses.front().size());
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw IoError("cannot open " + path);
    const std::uint32_t magic = snapshot_magic;
    const std::uint64_t count = responses.size();
    std::fwrite(&magic, 4, 1, f);
    std::fwrite(&n, 4, 1, f);
    std::fwrite(&count, 8, 1, f);
    for (const cvec& h : responses) {
        if (h.size() != n) {
            std::fclose(f);
            throw IoError("snapshot length mismatch");
        }
        for (const cplx& v : h) {
            const double re = v.real(), im = v.imag();
            std::fwrite(&re, 8, 1, f);
            std::fwrite(&im, 8, 1, f);
        }
    }
    std::fclose(f);
}

inline std::vector<cvec> load_snapshots(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw IoError("cannot open " + path);
    std::uint32_t magic = 0, n = 0;
    std::uint64_t count = 0;
    if (std::fread(&magic, 4, 1, f) != 1 || std::fread(&n, 4, 1, f) != 1 ||
        std::fread(&count, 8, 1, f) != 1 || magic != snapshot_magic) {
        std::fclose(f);
        throw IoError("bad snapshot header in " + path);
    }
    std::vector<cvec> out(count, cvec(n));
    for (auto& h : out) {
        for (auto& v : h) {
            double re = 0, im = 0;
            if (std::fread(&re, 8, 1, f) != 1 || std::fread(&im, 8, 1, f) != 1) {
                std::fclose(f);
                throw IoError("truncated snapshot file " + path);
            }
            v = {re, im};
        }
    }
    std::fclose(f);
    return out;
}

}  // namespace gfdmsim

#endif
