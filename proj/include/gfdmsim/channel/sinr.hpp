#ifndef GFDMSIM_CHANNEL_SINR_HPP
#define GFDMSIM_CHANNEL_SINR_HPP

#include <vector>

#include "gfdmsim/common.hpp"

namespace gfdmsim {

/// One link as seen from a receiver: transmit power, path gain (path loss
/// including shadowing, as a linear gain <= 1) and the fading response.
struct LinkGain {
    double tx_power = 1.0;     // linear
    double path_gain = 1.0;    // linear, in (0, 1]
    const cvec* freq_response = nullptr;

    void validate() const {
        if (tx_power <= 0.0) throw ConfigError("tx_power must be > 0");
        if (path_gain <= 0.0 || path_gain > 1.0)
            throw ConfigError("path_gain must be in (0, 1]");
        if (!freq_response) throw ConfigError("missing frequency response");
    }
};

/// Post-processing SINR per allocated frequency sample:
/// gamma(f) = S |H(f)|^2 / (sigma^2 + sum_q S_q |H_q(f)|^2),
/// with S = tx_power * path_gain per link.
inline dvec compute_sinr(const LinkGain& serving,
                         const std::vector<LinkGain>& interferers,
                         double noise_var, const std::vector<int>& allocation) {
    if (allocation.empty()) throw ConfigError("empty allocation");
    serving.validate();
    for (const auto& q : interferers) q.validate();
    if (noise_var <= 0.0) throw ConfigError("noise variance must be > 0");

    const double s_serv = serving.tx_power * serving.path_gain;
    dvec gamma(allocation.size(), 0.0);
    for (std::size_t i = 0; i < allocation.size(); ++i) {
        const int f = allocation[i];
        double denom = noise_var;
        for (const auto& q : interferers)
            denom += q.tx_power * q.path_gain * std::norm((*q.freq_response)[f]);
        gamma[i] = s_serv * std::norm((*serving.freq_response)[f]) / denom;
    }
    return gamma;
}

}  // namespace gfdmsim

#endif
