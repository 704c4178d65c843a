#ifndef GFDMSIM_TESTS_SUPPORT_TEST_UTIL_HPP
#define GFDMSIM_TESTS_SUPPORT_TEST_UTIL_HPP

#include <cstdlib>
#include <string>

#include "gfdmsim/gfdm/modem.hpp"
#include "gfdmsim/rng.hpp"

namespace testutil {

using namespace gfdmsim;

/// Random unit-energy QPSK symbols on the active subcarriers only.
inline SymbolGrid random_grid(const GfdmConfig& config, Rng& rng) {
    SymbolGrid grid(config.subcarriers, config.subsymbols);
    const double s = std::sqrt(0.5);
    for (int k : config.active_set)
        for (int m = 0; m < config.subsymbols; ++m)
            grid.at(k, m) = {rng.coin() ? s : -s, rng.coin() ? s : -s};
    return grid;
}

inline double max_abs_diff(const cvec& a, const cvec& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

inline double max_abs(const cvec& a) {
    double worst = 0.0;
    for (const auto& v : a) worst = std::max(worst, std::abs(v));
    return worst;
}

/// Shared on-disk cache so expensive tables are built once per build tree.
inline std::string table_cache_dir() {
    if (const char* env = std::getenv("GFDMSIM_TABLE_CACHE")) return env;
    return "gfdmsim_tablecache";
}

}  // namespace testutil

#endif
