#ifndef GFDMSIM_FEC_MCS_HPP
#define GFDMSIM_FEC_MCS_HPP

#include <algorithm>
#include <cctype>
#include <numeric>
#include <string>
#include <vector>

#include "gfdmsim/common.hpp"
#include "gfdmsim/fec/constellation.hpp"
#include "gfdmsim/fec/turbo.hpp"
#include "gfdmsim/gfdm/config.hpp"

namespace gfdmsim {

enum class CodeRate { R13, R12, R23 };

struct McsMode {
    int bits_per_symbol = 2;          // 2 = QPSK, 4 = 16QAM, 6 = 64QAM
    CodeRate rate = CodeRate::R13;

    double rate_fraction() const {
        switch (rate) {
            case CodeRate::R13: return 1.0 / 3.0;
            case CodeRate::R12: return 1.0 / 2.0;
            case CodeRate::R23: return 2.0 / 3.0;
        }
        return 0.0;
    }

    std::string name() const {
        std::string mod = bits_per_symbol == 2   ? "qpsk"
                          : bits_per_symbol == 4 ? "16qam"
                                                 : "64qam";
        switch (rate) {
            case CodeRate::R13: return mod + "-1/3";
            case CodeRate::R12: return mod + "-1/2";
            case CodeRate::R23: return mod + "-2/3";
        }
        return mod;
    }

    bool operator==(const McsMode&) const = default;
};

inline McsMode parse_mcs(const std::string& text) {
    McsMode m;
    std::string s = text;
    for (auto& c : s) c = char(std::tolower(c));
    if (s.rfind("qpsk", 0) == 0)
        m.bits_per_symbol = 2;
    else if (s.rfind("16qam", 0) == 0)
        m.bits_per_symbol = 4;
    else if (s.rfind("64qam", 0) == 0)
        m.bits_per_symbol = 6;
    else
        throw ConfigError("unknown modulation in MCS '" + text + "'");
    if (s.find("1/3") != std::string::npos)
        m.rate = CodeRate::R13;
    else if (s.find("1/2") != std::string::npos)
        m.rate = CodeRate::R12;
    else if (s.find("2/3") != std::string::npos)
        m.rate = CodeRate::R23;
    else
        throw ConfigError("unknown code rate in MCS '" + text + "'");
    return m;
}

/// How one coded block maps onto one GFDM symbol for a given MCS.
///
/// The rate-1/3 mother code is punctured with fixed patterns (systematic
/// bits and both tails always survive):
///   1/3  keep everything
///   1/2  parity1 at even indices, parity2 at odd indices
///   2/3  parity1 at i % 4 == 0, parity2 at i % 4 == 2
/// The punctured stream is extended cyclically to fill the symbol capacity
/// J*m exactly, then passed through a fixed stride interleaver so bit
/// reliabilities spread evenly over the allocation.
struct BlockPlan {
    McsMode mcs;
    int info_len = 0;        // turbo block size
    int mother_len = 0;      // 3*info_len + 12
    int punctured_len = 0;
    int coded_len = 0;       // J * m, capacity of one GFDM symbol
    std::vector<int> selected;    // mother index per punctured position
    std::vector<int> wire_perm;   // wire position -> punctured-stream index

    double rate_mbps(double blocks_per_second) const {
        return info_len * blocks_per_second / 1e6;
    }
};

namespace detail {

inline std::vector<int> puncture_selection(int k, CodeRate rate) {
    std::vector<int> sel;
    sel.reserve(std::size_t(3 * k + 12));
    for (int i = 0; i < k; ++i) sel.push_back(i);
    const int p1 = k, p2 = 2 * k;
    switch (rate) {
        case CodeRate::R13:
            for (int i = 0; i < k; ++i) sel.push_back(p1 + i);
            for (int i = 0; i < k; ++i) sel.push_back(p2 + i);
            break;
        case CodeRate::R12:
            for (int i = 0; i < k; i += 2) sel.push_back(p1 + i);
            for (int i = 1; i < k; i += 2) sel.push_back(p2 + i);
            break;
        case CodeRate::R23:
            for (int i = 0; i < k; i += 4) sel.push_back(p1 + i);
            for (int i = 2; i < k; i += 4) sel.push_back(p2 + i);
            break;
    }
    for (int i = 0; i < 12; ++i) sel.push_back(3 * k + i);
    return sel;
}

inline int puncture_len(int k, CodeRate rate) {
    switch (rate) {
        case CodeRate::R13: return 3 * k + 12;
        case CodeRate::R12: return 2 * k + 12;
        case CodeRate::R23: return k + (k + 3) / 4 + (k + 1) / 4 + 12;
    }
    return 0;
}

/// Fixed stride permutation: pi(j) = j * s mod n with s coprime near 0.618n.
inline std::vector<int> stride_permutation(int n) {
    int s = std::max(1, int(0.618 * n));
    while (std::gcd(s, n) != 1) ++s;
    std::vector<int> perm(std::size_t(n), 0);
    std::int64_t acc = 0;
    for (int j = 0; j < n; ++j) {
        perm[j] = int(acc);
        acc += s;
        if (acc >= n) acc -= n;
    }
    return perm;
}

}  // namespace detail

/// Picks the largest supported turbo block that fits the symbol capacity.
inline BlockPlan make_block_plan(const GfdmConfig& config, const McsMode& mcs) {
    BlockPlan plan;
    plan.mcs = mcs;
    plan.coded_len = config.allocation_size() * mcs.bits_per_symbol;

    int best = 0;
    for (int k = turbo_block_size_at_most(plan.coded_len); k > 0;
         k = turbo_block_size_at_most(k - 1)) {
        if (detail::puncture_len(k, mcs.rate) <= plan.coded_len) {
            best = k;
            break;
        }
    }
    if (best == 0)
        throw ConfigError("no turbo block size fits capacity " +
                          std::to_string(plan.coded_len) + " for " + mcs.name());
    plan.info_len = best;
    plan.mother_len = 3 * best + 12;
    plan.selected = detail::puncture_selection(best, mcs.rate);
    plan.punctured_len = int(plan.selected.size());
    plan.wire_perm = detail::stride_permutation(plan.coded_len);
    return plan;
}

/// Mother codeword -> wire bits (puncture, cyclic fill, interleave).
inline std::vector<std::uint8_t> rate_match(const BlockPlan& plan,
                                            const std::vector<std::uint8_t>& mother) {
    if (int(mother.size()) != plan.mother_len)
        throw DimensionError("rate_match: mother length mismatch");
    std::vector<std::uint8_t> wire(std::size_t(plan.coded_len), 0);
    for (int j = 0; j < plan.coded_len; ++j) {
        const int seq = plan.wire_perm[j];
        wire[j] = mother[plan.selected[seq % plan.punctured_len]];
    }
    return wire;
}

/// Wire LLRs -> mother-length LLRs (deinterleave, combine repeats, zero the
/// punctured positions). Output is clipped like any LLR vector.
inline dvec derate_match(const BlockPlan& plan, const dvec& wire_llr) {
    if (int(wire_llr.size()) != plan.coded_len)
        throw DimensionError("derate_match: wire length mismatch");
    dvec mother(std::size_t(plan.mother_len), 0.0);
    for (int j = 0; j < plan.coded_len; ++j) {
        const int seq = plan.wire_perm[j];
        mother[plan.selected[seq % plan.punctured_len]] += wire_llr[j];
    }
    for (double& v : mother) v = std::clamp(v, -llr_clip, llr_clip);
    return mother;
}

}  // namespace gfdmsim

#endif
