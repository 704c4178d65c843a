#ifndef GFDMSIM_LINKQUALITY_CALIBRATE_HPP
#define GFDMSIM_LINKQUALITY_CALIBRATE_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "gfdmsim/common.hpp"
#include "gfdmsim/linkquality/bler_lut.hpp"
#include "gfdmsim/linkquality/esinr.hpp"
#include "gfdmsim/linkquality/sitable.hpp"
#include "gfdmsim/parallel.hpp"
#include "gfdmsim/sim/linkchain.hpp"

namespace gfdmsim {

struct CalibrationOptions {
    long min_packets = 2000;   // per SNR point, unless min_errors hit first
    long min_errors = 100;
    int probe_packets = 200;   // coarse waterfall location
    double fine_step_db = 0.25;
    double lead_in_db = 2.25;  // fine grid starts this far below the mid point
    double stop_bler = 2e-3;   // extend the grid until the curve drops below
    double search_span_db = 20.0;
    std::uint64_t seed = 0xC0FFEEull;
    int jobs = 1;
    int max_points = 80;
};

/// Fingerprint for LUT caching: waveform geometry + filter + code plan +
/// the calibration settings that shape the stored curve.
inline std::uint64_t lut_config_hash(const GfdmConfig& config, const McsMode& mcs,
                                     const CalibrationOptions& opt) {
    std::string s = "K=" + std::to_string(config.subcarriers) +
                    ";Kon=" + std::to_string(config.active_count()) +
                    ";M=" + std::to_string(config.subsymbols) +
                    ";cp=" + std::to_string(config.cp_len) +
                    ";filter=" + config.filter_name() + ";mcs=" + mcs.name() +
                    ";packets=" + std::to_string(opt.min_packets) +
                    ";errors=" + std::to_string(opt.min_errors) +
                    ";seed=" + std::to_string(opt.seed);
    return fnv1a64(s);
}

namespace detail {

struct PointTally {
    long packets = 0;
    long block_errors = 0;
    long bit_errors = 0;
    long info_bits = 0;
};

/// Simulates one AWGN point until min_packets or min_errors is reached.
/// Packets run in fixed-size chunks with per-chunk derived RNG streams, so
/// the tally is identical for any job count.
inline PointTally awgn_point(const LinkChain& chain, double snr_db,
                             const CalibrationOptions& opt, std::uint64_t seed) {
    const double sigma2 = db_to_lin(-snr_db);
    Rng probe_rng(0);
    ChannelRealization ch = draw_channel(ChannelKind::Awgn, nullptr,
                                         chain.config().block_len(), sigma2,
                                         probe_rng);
    const ChannelContext ctx = chain.prepare(ch.freq_response, sigma2);

    constexpr long chunk_packets = 50;
    PointTally tally;
    std::uint64_t chunk = 0;
    const int round = std::max(1, opt.jobs);
    std::vector<PointTally> partial(std::size_t(round));
    while (tally.packets < opt.min_packets &&
           tally.block_errors < opt.min_errors) {
        for (auto& p : partial) p = PointTally{};
        parallel_for(std::size_t(round), opt.jobs, [&](std::size_t w) {
            Rng rng = Rng::derive(seed, 0x9001, chunk + w);
            PointTally& t = partial[w];
            for (long i = 0; i < chunk_packets; ++i) {
                const PacketOutcome o = chain.run_packet(ch, ctx, rng);
                ++t.packets;
                t.block_errors += o.block_error ? 1 : 0;
                t.bit_errors += o.bit_errors;
                t.info_bits += o.info_bits;
            }
        });
        chunk += std::uint64_t(round);
        for (const auto& p : partial) {
            tally.packets += p.packets;
            tally.block_errors += p.block_errors;
            tally.bit_errors += p.bit_errors;
            tally.info_bits += p.info_bits;
        }
    }
    return tally;
}

}  // namespace detail

/// Runs the bit-level chain over AWGN on a fine SNR grid around the turbo
/// waterfall and returns the smoothed lookup table. The grid is located
/// with a short coarse probe starting from the constrained-capacity SNR.
/// Throws ConfigError if no waterfall is found inside the search window.
inline BlerLut calibrate_bler_lut(const GfdmConfig& config, const McsMode& mcs,
                                  const SiTable& si_table,
                                  const CalibrationOptions& opt = {}) {
    if (si_table.bits_per_symbol() != mcs.bits_per_symbol)
        throw ConfigError("SI table modulation does not match MCS");
    const LinkChain chain(config, mcs);
    const std::uint64_t hash = lut_config_hash(config, mcs, opt);

    // Capacity-based starting guess: SI per symbol = effective rate * m.
    const double eff_rate =
        double(chain.plan().info_len) / double(chain.plan().coded_len);
    const double snr_capacity =
        si_table.invert_db(eff_rate * mcs.bits_per_symbol);

    const auto point_seed = [&](double snr_db) {
        return opt.seed ^ (std::uint64_t(std::llround(snr_db * 1000.0)) *
                           0x9E3779B97F4A7C15ull) ^ hash;
    };

    // Coarse walk: first SNR whose probe BLER dips below 1/2.
    CalibrationOptions probe_opt = opt;
    probe_opt.min_packets = opt.probe_packets;
    probe_opt.min_errors = std::max<long>(20, opt.probe_packets / 4);
    double snr_mid = std::nan("");
    for (double snr = snr_capacity - 4.0; snr <= snr_capacity + opt.search_span_db;
         snr += 0.5) {
        const auto t = detail::awgn_point(chain, snr, probe_opt,
                                          point_seed(snr) ^ 0xABCDull);
        if (double(t.block_errors) < 0.5 * double(t.packets)) {
            snr_mid = snr;
            break;
        }
    }
    if (std::isnan(snr_mid))
        throw ConfigError("waterfall search window exhausted for " + mcs.name() +
                          " / " + config.filter_name());

    BlerLut lut;
    lut.mcs_name = mcs.name();
    lut.filter_name = config.filter_name();
    lut.config_hash = hash;
    lut.seed = opt.seed;

    double snr = snr_mid - opt.lead_in_db;
    for (int i = 0; i < opt.max_points; ++i, snr += opt.fine_step_db) {
        const auto t = detail::awgn_point(chain, snr, opt, point_seed(snr));
        BlerLut::Point p;
        p.snr_db = snr;
        p.packets = t.packets;
        p.block_errors = t.block_errors;
        p.ber = t.info_bits > 0 ? double(t.bit_errors) / double(t.info_bits) : 0.0;
        p.bler = t.packets > 0 ? double(t.block_errors) / double(t.packets) : 1.0;
        lut.points.push_back(p);
        if (p.bler < opt.stop_bler) break;
    }
    lut.finalize();
    return lut;
}

/// Grid search for the code-adjustment factor on a channel ensemble.
///
/// base_sinr: per-realisation SINR vectors at 0 dB transmit SNR (scaled
/// linearly per candidate SNR). reference: simulated mean BLER per SNR for
/// the same realisations. The objective is the largest horizontal gap (dB)
/// between the predicted and simulated curves across BLER levels in
/// [1%, 10%]; ties go to the candidate closest to 1.
struct GammaCodeResult {
    double gamma_code = 1.0;
    double objective_db = 0.0;
};

inline double curve_gap_db(const dvec& snr_grid, const dvec& reference,
                           const dvec& predicted, double level_lo = 0.01,
                           double level_hi = 0.10) {
    double worst = 0.0;
    bool any = false;
    for (int i = 0; i <= 12; ++i) {
        const double level =
            std::pow(10.0, std::log10(level_lo) +
                               (std::log10(level_hi) - std::log10(level_lo)) *
                                   double(i) / 12.0);
        const double a = BlerLut::crossing(snr_grid, reference, level);
        const double b = BlerLut::crossing(snr_grid, predicted, level);
        if (std::isnan(a) || std::isnan(b)) continue;
        any = true;
        worst = std::max(worst, std::abs(a - b));
    }
    if (!any)
        throw ConfigError("reference curve never enters the 1-10% BLER band");
    return worst;
}

inline GammaCodeResult calibrate_gamma_code(
    const std::vector<dvec>& base_sinr, const dvec& snr_grid,
    const dvec& reference_bler, const SiTable& si_table, const BlerLut& lut,
    GammaCodeMode mode = GammaCodeMode::SnrDomain) {
    if (base_sinr.empty()) throw ConfigError("empty calibration ensemble");
    GammaCodeResult best;
    double best_obj = 1e300;
    for (int step = 0; step <= 75; ++step) {
        const double gc = 0.5 + 0.02 * step;
        dvec predicted(snr_grid.size(), 0.0);
        for (std::size_t s = 0; s < snr_grid.size(); ++s) {
            const double scale = db_to_lin(snr_grid[s]);
            double acc = 0.0;
            dvec scaled;
            for (const dvec& base : base_sinr) {
                scaled.resize(base.size());
                for (std::size_t j = 0; j < base.size(); ++j)
                    scaled[j] = base[j] * scale;
                const EsinrReport rep = esinr_miesm(scaled, si_table, gc, mode);
                acc += lut.predict(rep.esinr_db);
            }
            predicted[s] = acc / double(base_sinr.size());
        }
        const double obj = curve_gap_db(snr_grid, reference_bler, predicted);
        const bool better =
            obj < best_obj - 1e-12 ||
            (std::abs(obj - best_obj) <= 1e-12 &&
             std::abs(gc - 1.0) < std::abs(best.gamma_code - 1.0));
        if (better) {
            best_obj = obj;
            best.gamma_code = gc;
            best.objective_db = obj;
        }
    }
    return best;
}

/// Disk-backed cache for SI tables and BLER LUTs, keyed by config hash.
/// Not thread-safe; populate before fanning out workers.
class TableCache {
public:
    explicit TableCache(std::string dir) : dir_(std::move(dir)) {
        std::filesystem::create_directories(dir_);
    }

    const std::string& dir() const { return dir_; }

    const SiTable& si(int bits_per_symbol) {
        auto it = si_.find(bits_per_symbol);
        if (it != si_.end()) return *it->second;
        const std::string path =
            dir_ + "/si_m" + std::to_string(bits_per_symbol) + ".csv";
        std::unique_ptr<SiTable> table;
        if (std::filesystem::exists(path)) {
            auto loaded = std::make_unique<SiTable>(SiTable::load(path));
            if (loaded->bits_per_symbol() == bits_per_symbol)
                table = std::move(loaded);
        }
        if (!table) {
            table = std::make_unique<SiTable>(SiTable::build(bits_per_symbol));
            const std::string tmp = path + ".tmp";
            table->save(tmp, fnv1a64("si_m" + std::to_string(bits_per_symbol)));
            std::filesystem::rename(tmp, path);
        }
        auto& slot = si_[bits_per_symbol];
        slot = std::move(table);
        return *slot;
    }

    const BlerLut& lut(const GfdmConfig& config, const McsMode& mcs,
                       const CalibrationOptions& opt, bool* was_cached = nullptr) {
        const std::uint64_t hash = lut_config_hash(config, mcs, opt);
        auto it = lut_.find(hash);
        if (it != lut_.end()) {
            if (was_cached) *was_cached = true;
            return *it->second;
        }
        std::string mcs_tag = mcs.name();
        std::replace(mcs_tag.begin(), mcs_tag.end(), '/', '-');
        char name[160];
        std::snprintf(name, sizeof name, "/lut_%s_%s_%016llx.csv",
                      mcs_tag.c_str(), config.filter_name().c_str(),
                      (unsigned long long)hash);
        const std::string path = dir_ + name;

        std::unique_ptr<BlerLut> lut;
        if (std::filesystem::exists(path)) {
            auto loaded = std::make_unique<BlerLut>(BlerLut::load(path));
            if (loaded->config_hash == hash) {
                lut = std::move(loaded);
                if (was_cached) *was_cached = true;
            }
        }
        if (!lut) {
            if (was_cached) *was_cached = false;
            lut = std::make_unique<BlerLut>(
                calibrate_bler_lut(config, mcs, si(mcs.bits_per_symbol), opt));
            const std::string tmp = path + ".tmp";
            lut->save(tmp);
            std::filesystem::rename(tmp, path);
        }
        auto& slot = lut_[hash];
        slot = std::move(lut);
        return *slot;
    }

private:
    std::string dir_;
    std::map<int, std::unique_ptr<SiTable>> si_;
    std::map<std::uint64_t, std::unique_ptr<BlerLut>> lut_;
};

}  // namespace gfdmsim

#endif
