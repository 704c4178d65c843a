#ifndef GFDMSIM_LINKQUALITY_BLER_LUT_HPP
#define GFDMSIM_LINKQUALITY_BLER_LUT_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "gfdmsim/common.hpp"

namespace gfdmsim {

/// Weighted pool-adjacent-violators fit, non-increasing in the given order.
inline dvec isotonic_non_increasing(const dvec& values, const dvec& weights) {
    struct Block { double mean, weight; int count; };
    std::vector<Block> blocks;
    blocks.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        blocks.push_back({values[i], weights[i], 1});
        while (blocks.size() > 1 &&
               blocks[blocks.size() - 2].mean < blocks.back().mean) {
            const Block b = blocks.back();
            blocks.pop_back();
            Block& a = blocks.back();
            const double w = a.weight + b.weight;
            a.mean = (a.mean * a.weight + b.mean * b.weight) / w;
            a.weight = w;
            a.count += b.count;
        }
    }
    dvec out;
    out.reserve(values.size());
    for (const Block& b : blocks)
        out.insert(out.end(), std::size_t(b.count), b.mean);
    return out;
}

/// Calibrated AWGN SNR -> BLER curve for one (MCS, filter) pair.
///
/// Points are isotonic-smoothed and floored at 1/(10 * max packet count);
/// prediction interpolates log10(BLER) linearly in SNR, returns 1 below the
/// table and the floor above it.
class BlerLut {
public:
    struct Point {
        double snr_db = 0.0;
        double bler = 1.0;      // smoothed, floored
        double ber = 0.0;       // info-bit error rate (raw)
        long packets = 0;
        long block_errors = 0;
    };

    std::string mcs_name;
    std::string filter_name;
    std::uint64_t config_hash = 0;
    std::uint64_t seed = 0;
    std::vector<Point> points;

    double floor_bler() const {
        long max_packets = 0;
        for (const auto& p : points) max_packets = std::max(max_packets, p.packets);
        return max_packets > 0 ? 1.0 / (10.0 * double(max_packets)) : 1e-6;
    }

    /// Applies the isotonic fit and the floor to raw error counts.
    void finalize() {
        std::sort(points.begin(), points.end(),
                  [](const Point& a, const Point& b) { return a.snr_db < b.snr_db; });
        dvec raw, w;
        for (const auto& p : points) {
            raw.push_back(p.packets > 0 ? double(p.block_errors) / double(p.packets)
                                        : 1.0);
            w.push_back(double(std::max<long>(p.packets, 1)));
        }
        const dvec smooth = isotonic_non_increasing(raw, w);
        const double floor = floor_bler();
        for (std::size_t i = 0; i < points.size(); ++i)
            points[i].bler = std::clamp(smooth[i], floor, 1.0);
    }

    double predict(double esinr_db) const {
        return interpolate(esinr_db, [](const Point& p) { return p.bler; }, 1.0,
                           floor_bler());
    }

    /// Same interpolation on the info-bit error rate samples.
    double predict_ber(double esinr_db) const {
        const double tiny = 1e-9;
        const double below = points.empty() ? 0.5 : std::max(points.front().ber, tiny);
        return interpolate(esinr_db,
                           [tiny](const Point& p) { return std::max(p.ber, tiny); },
                           below, tiny);
    }

    /// SNR at which the smoothed curve crosses `bler` (log-linear), or NaN
    /// if the curve never spans it.
    double snr_at_bler(double bler) const {
        dvec snr, val;
        for (const auto& p : points) {
            snr.push_back(p.snr_db);
            val.push_back(p.bler);
        }
        return crossing(snr, val, bler);
    }

    /// Crossing of the raw BER samples (bit-level ground truth).
    double snr_at_ber(double ber) const {
        dvec snr, val;
        for (const auto& p : points) {
            snr.push_back(p.snr_db);
            val.push_back(std::max(p.ber, 1e-12));
        }
        return crossing(snr, val, ber);
    }

    /// First log-linear crossing of a decreasing curve through `target`.
    static double crossing(const dvec& snr_db, const dvec& value, double target) {
        for (std::size_t i = 1; i < snr_db.size(); ++i) {
            const double hi = value[i - 1], lo = value[i];
            if (hi >= target && lo <= target) {
                if (hi == lo) return snr_db[i - 1];
                const double f = (std::log10(hi) - std::log10(target)) /
                                 (std::log10(hi) - std::log10(lo));
                return snr_db[i - 1] + f * (snr_db[i] - snr_db[i - 1]);
            }
        }
        return std::nan("");
    }

    void save(const std::string& path) const {
        std::FILE* f = std::fopen(path.c_str(), "w");
        if (!f) throw IoError("cannot write " + path);
        std::fprintf(f, "# gfdmsim bler_lut v1\n");
        std::fprintf(f, "# config_hash=%016llx\n", (unsigned long long)config_hash);
        std::fprintf(f, "# mcs=%s filter=%s\n", mcs_name.c_str(), filter_name.c_str());
        std::fprintf(f, "# seed=%llu\n", (unsigned long long)seed);
        std::fprintf(f, "snr_db,bler,ber,packets,block_errors\n");
        for (const auto& p : points)
            std::fprintf(f, "%.2f,%.17g,%.17g,%ld,%ld\n", p.snr_db, p.bler, p.ber,
                         p.packets, p.block_errors);
        std::fclose(f);
    }

    static BlerLut load(const std::string& path) {
        std::FILE* f = std::fopen(path.c_str(), "r");
        if (!f) throw IoError("cannot read " + path);
        BlerLut lut;
        char line[512];
        while (std::fgets(line, sizeof line, f)) {
            if (line[0] == '#') {
                unsigned long long h = 0, s = 0;
                char mcs[64] = {0}, filt[64] = {0};
                if (std::sscanf(line, "# config_hash=%llx", &h) == 1)
                    lut.config_hash = h;
                if (std::sscanf(line, "# seed=%llu", &s) == 1) lut.seed = s;
                if (std::sscanf(line, "# mcs=%63s filter=%63s", mcs, filt) == 2) {
                    lut.mcs_name = mcs;
                    lut.filter_name = filt;
                }
                continue;
            }
            Point p;
            if (std::sscanf(line, "%lf,%lf,%lf,%ld,%ld", &p.snr_db, &p.bler, &p.ber,
                            &p.packets, &p.block_errors) == 5)
                lut.points.push_back(p);
        }
        std::fclose(f);
        if (lut.points.empty()) throw IoError("not a BLER LUT: " + path);
        return lut;
    }

private:
    template <typename Get>
    double interpolate(double snr_db, Get get, double below, double above) const {
        if (points.empty()) return below;
        if (snr_db < points.front().snr_db) return below;
        if (snr_db >= points.back().snr_db) return above;
        std::size_t i = 1;
        while (points[i].snr_db < snr_db) ++i;
        const Point& a = points[i - 1];
        const Point& b = points[i];
        if (snr_db == a.snr_db) return get(a);
        const double f = (snr_db - a.snr_db) / (b.snr_db - a.snr_db);
        const double la = std::log10(std::max(get(a), 1e-300));
        const double lb = std::log10(std::max(get(b), 1e-300));
        return std::pow(10.0, la + f * (lb - la));
    }
};

}  // namespace gfdmsim

#endif
