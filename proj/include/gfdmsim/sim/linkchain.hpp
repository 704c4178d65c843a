#ifndef GFDMSIM_SIM_LINKCHAIN_HPP
#define GFDMSIM_SIM_LINKCHAIN_HPP

#include <memory>
#include <vector>

#include "gfdmsim/channel/channel.hpp"
#include "gfdmsim/common.hpp"
#include "gfdmsim/fec/constellation.hpp"
#include "gfdmsim/fec/mcs.hpp"
#include "gfdmsim/fec/turbo.hpp"
#include "gfdmsim/fft.hpp"
#include "gfdmsim/gfdm/modem.hpp"

namespace gfdmsim {

struct PacketOutcome {
    bool block_error = false;
    int bit_errors = 0;
    int info_bits = 0;
};

/// Everything the receiver needs that depends only on the channel draw:
/// the response, the per-bin equalised noise variance and the per-symbol
/// demapper variance. Build once per realisation, reuse across packets.
struct ChannelContext {
    cvec freq_response;
    dvec per_bin_noise_var;   // sigma^2(f), before equalisation
    dvec symbol_noise_var;    // per allocated symbol, after ZF
};

/// Bit-level simulator for one (waveform, MCS) pair: turbo + Gray QAM +
/// GFDM with ZF reception. One coded block fills one GFDM symbol.
class LinkChain {
public:
    LinkChain(const GfdmConfig& config, const McsMode& mcs)
        : modem_(config),
          demod_(config, modem_.filter()),
          plan_(make_block_plan(config, mcs)),
          constellation_(mcs.bits_per_symbol),
          codec_(plan_.info_len),
          allocation_(active_allocation(config)) {}

    const GfdmConfig& config() const { return modem_.config(); }
    const BlockPlan& plan() const { return plan_; }
    const GfdmModem& modem() const { return modem_; }
    const ZfDemodulator& demodulator() const { return demod_; }

    /// White noise of variance sigma2 on every bin.
    ChannelContext prepare(const cvec& freq_response, double sigma2) const {
        return prepare(freq_response,
                       dvec(std::size_t(config().block_len()), sigma2));
    }

    ChannelContext prepare(const cvec& freq_response,
                           dvec per_bin_noise_var) const {
        const int n = config().block_len();
        if (int(freq_response.size()) != n ||
            int(per_bin_noise_var.size()) != n)
            throw DimensionError("channel context length != N");
        ChannelContext ctx;
        ctx.freq_response = freq_response;
        ctx.per_bin_noise_var = std::move(per_bin_noise_var);
        dvec u(std::size_t(n), 0.0);
        for (int f = 0; f < n; ++f) {
            const double h2 = std::norm(ctx.freq_response[f]);
            if (h2 < 1e-24)
                throw SingularChannel("channel vanishes on frequency sample " +
                                      std::to_string(f));
            u[f] = ctx.per_bin_noise_var[f] / h2;
        }
        const dvec per_subcarrier = demod_.symbol_noise_variance(u);
        ctx.symbol_noise_var.reserve(allocation_.size());
        for (int k : config().active_set)
            for (int m = 0; m < config().subsymbols; ++m)
                ctx.symbol_noise_var.push_back(per_subcarrier[k]);
        return ctx;
    }

    /// Full pipeline with the channel applied in the time domain (white
    /// noise case): modulate, CP, taps + AWGN, CP removal, ZF, decode.
    PacketOutcome run_packet(const ChannelRealization& ch,
                             const ChannelContext& ctx, Rng& rng) const {
        const auto info = random_info(rng);
        SampleBlock tx = transmit(info);
        SampleBlock with_cp = add_cyclic_prefix(tx, config());
        SampleBlock rx = apply_channel(with_cp, ch, rng);
        SampleBlock no_cp = remove_cyclic_prefix(rx, config());
        cvec spec = dft_unitary(no_cp.samples);
        return receive(spec, ctx, info);
    }

    /// Noise injected per frequency sample (interference treated as extra
    /// Gaussian power, so the noise is coloured across bins).
    PacketOutcome run_packet_colored(const ChannelRealization& serving,
                                     const ChannelContext& ctx, Rng& rng) const {
        const auto info = random_info(rng);
        SampleBlock tx = transmit(info);
        SampleBlock with_cp = add_cyclic_prefix(tx, config());
        ChannelRealization noiseless = serving;
        noiseless.noise_var = 0.0;
        SampleBlock rx = apply_channel(with_cp, noiseless, rng);
        SampleBlock no_cp = remove_cyclic_prefix(rx, config());
        cvec spec = dft_unitary(no_cp.samples);
        for (int f = 0; f < config().block_len(); ++f)
            spec[f] += std::sqrt(ctx.per_bin_noise_var[f]) * rng.cnormal();
        return receive(spec, ctx, info);
    }

private:
    std::vector<std::uint8_t> random_info(Rng& rng) const {
        std::vector<std::uint8_t> bits(std::size_t(plan_.info_len), 0);
        for (auto& b : bits) b = rng.coin() ? 1 : 0;
        return bits;
    }

    SampleBlock transmit(const std::vector<std::uint8_t>& info) const {
        const auto mother = codec_.encode(info);
        const auto wire = rate_match(plan_, mother);
        const cvec symbols = constellation_.map_bits(wire);
        SymbolGrid grid(config().subcarriers, config().subsymbols);
        std::size_t s = 0;
        for (int k : config().active_set)
            for (int m = 0; m < config().subsymbols; ++m)
                grid.at(k, m) = symbols[s++];
        return modem_.modulate_fast(grid);
    }

    PacketOutcome receive(cvec& spec, const ChannelContext& ctx,
                          const std::vector<std::uint8_t>& info) const {
        const int n = config().block_len();
        for (int f = 0; f < n; ++f) spec[f] /= ctx.freq_response[f];
        const SymbolGrid grid = demod_.demodulate_spectrum(spec);

        cvec eq_symbols;
        eq_symbols.reserve(allocation_.size());
        for (int k : config().active_set)
            for (int m = 0; m < config().subsymbols; ++m)
                eq_symbols.push_back(grid.at(k, m));

        const dvec wire_llr =
            constellation_.demap_llr(eq_symbols, ctx.symbol_noise_var);
        const dvec mother_llr = derate_match(plan_, wire_llr);
        const auto decoded = codec_.decode(mother_llr);

        PacketOutcome out;
        out.info_bits = plan_.info_len;
        for (int i = 0; i < plan_.info_len; ++i)
            if (decoded[i] != info[i]) ++out.bit_errors;
        out.block_error = out.bit_errors > 0;
        return out;
    }

    GfdmModem modem_;
    ZfDemodulator demod_;
    BlockPlan plan_;
    Constellation constellation_;
    TurboCodec codec_;
    std::vector<int> allocation_;
};

}  // namespace gfdmsim

#endif
