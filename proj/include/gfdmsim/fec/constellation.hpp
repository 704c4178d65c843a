#ifndef GFDMSIM_FEC_CONSTELLATION_HPP
#define GFDMSIM_FEC_CONSTELLATION_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "gfdmsim/common.hpp"

namespace gfdmsim {

inline constexpr double llr_clip = 50.0;

/// Square QAM with per-axis binary-reflected Gray labelling, unit average
/// energy. Symbol bits [b0 .. b_{m-1}]: even-indexed bits select the I level,
/// odd-indexed the Q level, most significant first. The all-zero label maps
/// to the most positive level on each axis, so QPSK "00" is (1+j)/sqrt(2).
class Constellation {
public:
    explicit Constellation(int bits_per_symbol) : bits_(bits_per_symbol) {
        if (bits_ != 2 && bits_ != 4 && bits_ != 6)
            throw ConfigError("modulation order must be 2, 4 or 6 bits");
        axis_bits_ = bits_ / 2;
        const int levels = 1 << axis_bits_;
        // Level i in Gray order: amplitude (L-1) - 2i, label gray(i).
        axis_amp_.resize(levels);
        axis_label_.resize(levels);
        const double norm = std::sqrt(2.0 * (levels * levels - 1) / 3.0);
        for (int i = 0; i < levels; ++i) {
            axis_amp_[i] = double((levels - 1) - 2 * i) / norm;
            axis_label_[i] = std::uint32_t(i ^ (i >> 1));
        }
        points_.resize(std::size_t(1) << bits_);
        for (std::uint32_t label = 0; label < points_.size(); ++label) {
            std::uint32_t li = 0, lq = 0;
            for (int b = 0; b < bits_; ++b) {
                const std::uint32_t bit = (label >> (bits_ - 1 - b)) & 1u;
                if (b % 2 == 0)
                    li = (li << 1) | bit;
                else
                    lq = (lq << 1) | bit;
            }
            points_[label] = {amp_for_label(li), amp_for_label(lq)};
        }
    }

    int bits_per_symbol() const { return bits_; }
    const cvec& points() const { return points_; }

    /// bits.size() must divide into symbols of m bits.
    cvec map_bits(const std::vector<std::uint8_t>& bits) const {
        if (bits.size() % std::size_t(bits_) != 0)
            throw DimensionError("bit count not divisible by modulation order");
        cvec out(bits.size() / bits_);
        for (std::size_t s = 0; s < out.size(); ++s) {
            std::uint32_t label = 0;
            for (int b = 0; b < bits_; ++b)
                label = (label << 1) | bits[s * bits_ + b];
            out[s] = points_[label];
        }
        return out;
    }

    /// Max-log LLRs, axis-separable thanks to the per-axis Gray labelling.
    /// noise_var is the complex noise variance per symbol (E|n|^2); positive
    /// LLR means bit 0. Values are clipped to +-llr_clip.
    void demap_llr(const cplx* symbols, const double* noise_var,
                   std::size_t count, dvec& llr_out) const {
        llr_out.resize(count * bits_);
        for (std::size_t s = 0; s < count; ++s) {
            if (!(noise_var[s] > 0.0))
                throw ConfigError("noise variance must be positive");
            const double inv_v = 1.0 / noise_var[s];
            demap_axis(symbols[s].real(), inv_v, &llr_out[s * bits_], 2);
            demap_axis(symbols[s].imag(), inv_v, &llr_out[s * bits_ + 1], 2);
        }
    }

    dvec demap_llr(const cvec& symbols, const dvec& noise_var) const {
        if (symbols.size() != noise_var.size())
            throw DimensionError("demap: symbol/variance length mismatch");
        dvec out;
        demap_llr(symbols.data(), noise_var.data(), symbols.size(), out);
        return out;
    }

private:
    double amp_for_label(std::uint32_t label) const {
        for (std::size_t i = 0; i < axis_label_.size(); ++i)
            if (axis_label_[i] == label) return axis_amp_[i];
        return 0.0;  // unreachable
    }

    void demap_axis(double y, double inv_v, double* llr, int stride) const {
        const int levels = int(axis_amp_.size());
        for (int b = 0; b < axis_bits_; ++b) {
            double best0 = 1e300, best1 = 1e300;
            for (int i = 0; i < levels; ++i) {
                const double d = y - axis_amp_[i];
                const double metric = d * d;
                const bool one = (axis_label_[i] >> (axis_bits_ - 1 - b)) & 1u;
                if (one)
                    best1 = std::min(best1, metric);
                else
                    best0 = std::min(best0, metric);
            }
            llr[b * stride] = std::clamp((best1 - best0) * inv_v,
                                         -llr_clip, llr_clip);
        }
    }

    int bits_;
    int axis_bits_;
    dvec axis_amp_;
    std::vector<std::uint32_t> axis_label_;
    cvec points_;
};

}  // namespace gfdmsim

#endif
