#ifndef GFDMSIM_SYSLEVEL_RUN_HPP
#define GFDMSIM_SYSLEVEL_RUN_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <vector>

#include "gfdmsim/channel/channel.hpp"
#include "gfdmsim/channel/sinr.hpp"
#include "gfdmsim/common.hpp"
#include "gfdmsim/linkquality/calibrate.hpp"
#include "gfdmsim/linkquality/esinr.hpp"
#include "gfdmsim/parallel.hpp"
#include "gfdmsim/sim/linkchain.hpp"
#include "gfdmsim/syslevel/deployment.hpp"

namespace gfdmsim {

struct SyslevelConfig {
    GfdmConfig waveform = GfdmConfig::table3();
    std::vector<McsMode> mcs_list = {parse_mcs("qpsk-1/3"), parse_mcs("16qam-1/2"),
                                     parse_mcs("64qam-2/3")};
    SyslevelParams params;
    TdlProfile profile = TdlProfile::exp6();
    int ue_count = 50;
    int snapshots = 200;
    int bitlevel_packets_per_snapshot = 10;
    bool with_interference = true;
    bool run_bitlevel = true;
    double gamma_code = 1.0;
    double blocks_per_second = 15000.0;  // 15 GFDM symbols per 1 ms sub-frame
    std::uint64_t master_seed = 1;
    int jobs = 1;
};

struct UeResult {
    int ue = 0;
    McsMode chosen;
    dvec per_mcs_predicted;          // one per configured MCS
    double per_abstraction = 0.0;
    double throughput_abstraction = 0.0;
    double mean_esinr_db = 0.0;
    double per_bitlevel = std::nan("");
    double throughput_bitlevel = std::nan("");
};

struct SyslevelOutcome {
    std::vector<UeResult> results;
    double abstraction_seconds = 0.0;
    double bitlevel_seconds = 0.0;
};

/// Best MCS by predicted goodput; ties go to the more robust (lower order,
/// then lower rate) mode.
inline std::size_t select_mcs(const std::vector<McsMode>& modes,
                              const std::vector<double>& rates_mbps,
                              const dvec& predicted_per) {
    std::size_t best = 0;
    double best_goodput = -1.0;
    for (std::size_t i = 0; i < modes.size(); ++i) {
        const double goodput = rates_mbps[i] * (1.0 - predicted_per[i]);
        const bool wins =
            goodput > best_goodput + 1e-12 ||
            (std::abs(goodput - best_goodput) <= 1e-12 &&
             (modes[i].bits_per_symbol < modes[best].bits_per_symbol ||
              (modes[i].bits_per_symbol == modes[best].bits_per_symbol &&
               modes[i].rate_fraction() < modes[best].rate_fraction())));
        if (wins) {
            best_goodput = goodput;
            best = i;
        }
    }
    return best;
}

/// Monte-Carlo system-level evaluation.
///
/// Channel snapshots are drawn from counter-based streams keyed by
/// (master seed, ue, snapshot, link), so the abstraction and bit-level
/// paths see byte-identical channel ensembles and the SNR-only and
/// interference cases differ only in the interference term.
class SyslevelRunner {
public:
    SyslevelRunner(const SyslevelConfig& config, TableCache& tables,
                   const CalibrationOptions& cal = {})
        : cfg_(config), dep_(generate_deployment(config.params)) {
        for (const auto& mcs : cfg_.mcs_list) {
            si_tables_.push_back(&tables.si(mcs.bits_per_symbol));
            luts_.push_back(&tables.lut(cfg_.waveform, mcs, cal));
            chains_.push_back(std::make_unique<LinkChain>(cfg_.waveform, mcs));
            rates_mbps_.push_back(
                chains_.back()->plan().rate_mbps(cfg_.blocks_per_second));
        }
        allocation_ = active_allocation(cfg_.waveform);
    }

    const Deployment& deployment() const { return dep_; }
    const std::vector<double>& rates_mbps() const { return rates_mbps_; }

    SyslevelOutcome run() const {
        Rng drop_rng = Rng::derive(cfg_.master_seed, 0xD209);
        const auto ues = drop_ues(cfg_.ue_count, dep_, drop_rng);

        SyslevelOutcome outcome;
        outcome.results.resize(ues.size());

        using clock = std::chrono::steady_clock;
        const auto t0 = clock::now();
        parallel_for(ues.size(), cfg_.jobs, [&](std::size_t u) {
            outcome.results[u] = evaluate_abstraction(int(u), ues[u]);
        });
        const auto t1 = clock::now();
        outcome.abstraction_seconds =
            std::chrono::duration<double>(t1 - t0).count();

        if (cfg_.run_bitlevel) {
            parallel_for(ues.size(), cfg_.jobs, [&](std::size_t u) {
                evaluate_bitlevel(int(u), ues[u], outcome.results[u]);
            });
            outcome.bitlevel_seconds =
                std::chrono::duration<double>(clock::now() - t1).count();
        }
        return outcome;
    }

private:
    struct Snapshot {
        ChannelRealization serving;
        dvec noise_var_bins;  // normalised per-bin noise + interference power
    };

    /// Draws the per-link channels of one (ue, snapshot) pair and reduces
    /// them to the serving realisation plus the equivalent noise floor.
    Snapshot draw_snapshot(int ue_idx, const UeDrop& ue, int snap) const {
        const int n = cfg_.waveform.block_len();
        const double tx_mw = db_to_lin(cfg_.params.bs_tx_power_dbm);
        const double noise_mw = db_to_lin(cfg_.params.noise_power_dbm());

        Snapshot out;
        Rng serving_rng = Rng::derive(cfg_.master_seed, std::uint64_t(ue_idx),
                                      std::uint64_t(snap), 0);
        out.serving = draw_channel(ChannelKind::Tdl, &cfg_.profile, n, 0.0,
                                   serving_rng);
        const double s_serv = tx_mw * link_path_gain(dep_, ue, 0);

        dvec denom(std::size_t(n), noise_mw);
        if (cfg_.with_interference) {
            for (std::size_t q = 1; q < dep_.sites.size(); ++q) {
                Rng rng = Rng::derive(cfg_.master_seed, std::uint64_t(ue_idx),
                                      std::uint64_t(snap), std::uint64_t(q));
                const auto ch =
                    draw_channel(ChannelKind::Tdl, &cfg_.profile, n, 0.0, rng);
                const double s_q = tx_mw * link_path_gain(dep_, ue, q);
                for (int f = 0; f < n; ++f)
                    denom[f] += s_q * std::norm(ch.freq_response[f]);
            }
        }
        out.noise_var_bins.resize(std::size_t(n));
        for (int f = 0; f < n; ++f) out.noise_var_bins[f] = denom[f] / s_serv;
        return out;
    }

    UeResult evaluate_abstraction(int ue_idx, const UeDrop& ue) const {
        UeResult res;
        res.ue = ue_idx;
        res.per_mcs_predicted.assign(cfg_.mcs_list.size(), 0.0);
        double esinr_acc = 0.0;

        dvec sinr(allocation_.size());
        for (int snap = 0; snap < cfg_.snapshots; ++snap) {
            const Snapshot s = draw_snapshot(ue_idx, ue, snap);
            for (std::size_t j = 0; j < allocation_.size(); ++j) {
                const int f = allocation_[j];
                sinr[j] = std::norm(s.serving.freq_response[f]) /
                          s.noise_var_bins[f];
            }
            for (std::size_t m = 0; m < cfg_.mcs_list.size(); ++m) {
                const EsinrReport rep =
                    esinr_miesm(sinr, *si_tables_[m], cfg_.gamma_code);
                res.per_mcs_predicted[m] += luts_[m]->predict(rep.esinr_db);
                if (m == 0) esinr_acc += rep.esinr_db;
            }
        }
        for (auto& p : res.per_mcs_predicted) p /= double(cfg_.snapshots);
        res.mean_esinr_db = esinr_acc / double(cfg_.snapshots);

        const std::size_t pick =
            select_mcs(cfg_.mcs_list, rates_mbps_, res.per_mcs_predicted);
        res.chosen = cfg_.mcs_list[pick];
        res.per_abstraction = res.per_mcs_predicted[pick];
        res.throughput_abstraction =
            rates_mbps_[pick] * (1.0 - res.per_abstraction);
        return res;
    }

    void evaluate_bitlevel(int ue_idx, const UeDrop& ue, UeResult& res) const {
        std::size_t pick = 0;
        for (std::size_t m = 0; m < cfg_.mcs_list.size(); ++m)
            if (cfg_.mcs_list[m] == res.chosen) pick = m;
        const LinkChain& chain = *chains_[pick];

        long packets = 0, errors = 0;
        for (int snap = 0; snap < cfg_.snapshots; ++snap) {
            const Snapshot s = draw_snapshot(ue_idx, ue, snap);
            const ChannelContext ctx =
                chain.prepare(s.serving.freq_response, s.noise_var_bins);
            Rng rng = Rng::derive(cfg_.master_seed ^ 0xB17B17ull,
                                  std::uint64_t(ue_idx), std::uint64_t(snap));
            for (int p = 0; p < cfg_.bitlevel_packets_per_snapshot; ++p) {
                const PacketOutcome o = chain.run_packet_colored(s.serving, ctx, rng);
                ++packets;
                errors += o.block_error ? 1 : 0;
            }
        }
        res.per_bitlevel = packets > 0 ? double(errors) / double(packets) : 1.0;
        res.throughput_bitlevel = rates_mbps_[pick] * (1.0 - res.per_bitlevel);
    }

    SyslevelConfig cfg_;
    Deployment dep_;
    std::vector<const SiTable*> si_tables_;
    std::vector<const BlerLut*> luts_;
    std::vector<std::unique_ptr<LinkChain>> chains_;
    std::vector<double> rates_mbps_;
    std::vector<int> allocation_;
};

/// Empirical CDF at 1% quantile resolution (101 rows).
inline std::vector<std::pair<double, double>> aggregate_cdf(dvec values) {
    if (values.empty()) throw ConfigError("empty metric vector");
    std::sort(values.begin(), values.end());
    std::vector<std::pair<double, double>> cdf;
    cdf.reserve(101);
    for (int q = 0; q <= 100; ++q) {
        const double pos = q / 100.0 * double(values.size() - 1);
        const std::size_t lo = std::size_t(pos);
        const double frac = pos - double(lo);
        const double v = lo + 1 < values.size()
                             ? values[lo] * (1.0 - frac) + values[lo + 1] * frac
                             : values[lo];
        cdf.emplace_back(q / 100.0, v);
    }
    return cdf;
}

/// Two-sample Kolmogorov-Smirnov distance between empirical CDFs.
inline double cdf_sup_distance(dvec a, dvec b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double sup = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        double x;
        if (j >= b.size() || (i < a.size() && a[i] <= b[j]))
            x = a[i];
        else
            x = b[j];
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        sup = std::max(sup, std::abs(double(i) / double(a.size()) -
                                     double(j) / double(b.size())));
    }
    return sup;
}

}  // namespace gfdmsim

#endif
