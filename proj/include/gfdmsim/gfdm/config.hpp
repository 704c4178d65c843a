#ifndef GFDMSIM_GFDM_CONFIG_HPP
#define GFDMSIM_GFDM_CONFIG_HPP

#include <algorithm>
#include <cstdio>
#include <string>
#include <vector>

#include "gfdmsim/common.hpp"

namespace gfdmsim {

enum class FilterKind { Dirichlet, RaisedCosine };

/// GFDM waveform geometry: K subcarriers x M sub-symbols, N = K*M samples.
struct GfdmConfig {
    int subcarriers = 0;        // K
    int subsymbols = 0;         // M
    int cp_len = 0;             // N_cp
    FilterKind filter = FilterKind::Dirichlet;
    double rolloff = 0.0;       // raised-cosine only
    std::vector<int> active_set;  // distinct subcarrier indices < K

    int block_len() const { return subcarriers * subsymbols; }
    int active_count() const { return int(active_set.size()); }

    /// Frequency samples carrying data per GFDM symbol (J = K_on * M).
    int allocation_size() const { return active_count() * subsymbols; }

    std::string filter_name() const {
        if (filter == FilterKind::Dirichlet) return "dirichlet";
        char buf[32];
        std::snprintf(buf, sizeof buf, "rc%g", rolloff);
        return buf;
    }

    void validate() const {
        if (subcarriers < 2) throw ConfigError("subcarriers must be >= 2");
        if (subsymbols < 1) throw ConfigError("subsymbols must be >= 1");
        if (cp_len < 0 || cp_len > block_len())
            throw ConfigError("cp_len outside [0, N]");
        if (filter == FilterKind::RaisedCosine &&
            (rolloff < 0.0 || rolloff > 1.0))
            throw ConfigError("rolloff outside [0, 1]");
        if (active_set.empty() ||
            int(active_set.size()) > subcarriers)
            throw ConfigError("active_set size outside [1, K]");
        auto sorted = active_set;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < sorted.size(); ++i) {
            if (sorted[i] < 0 || sorted[i] >= subcarriers)
                throw ConfigError("active subcarrier index out of range");
            if (i > 0 && sorted[i] == sorted[i - 1])
                throw ConfigError("duplicate active subcarrier index");
        }
    }

    /// Active set centred on DC: indices -floor(K_on/2)..ceil(K_on/2)-1 mod K,
    /// which leaves the guard band at the band edges.
    static GfdmConfig make(int subcarriers, int active_count, int subsymbols,
                           int cp_len, FilterKind filter, double rolloff = 0.0) {
        GfdmConfig c;
        c.subcarriers = subcarriers;
        c.subsymbols = subsymbols;
        c.cp_len = cp_len;
        c.filter = filter;
        c.rolloff = rolloff;
        c.active_set.reserve(active_count);
        const int lo = -(active_count / 2);
        for (int i = 0; i < active_count; ++i)
            c.active_set.push_back(mod_floor(lo + i, subcarriers));
        std::sort(c.active_set.begin(), c.active_set.end());
        c.validate();
        return c;
    }

    /// Link-level setup used for the AWGN / narrowband-Rayleigh studies.
    static GfdmConfig table1(FilterKind filter = FilterKind::Dirichlet,
                             double rolloff = 0.0) {
        return make(64, 64, 9, 64, filter, rolloff);
    }

    /// Wideband setup: 128 subcarriers (75 active), 15 sub-symbols, CP 128.
    static GfdmConfig table3(FilterKind filter = FilterKind::Dirichlet,
                             double rolloff = 0.0) {
        return make(128, 75, 15, 128, filter, rolloff);
    }
};

}  // namespace gfdmsim

#endif
