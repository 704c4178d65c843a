#ifndef GFDMSIM_LINKQUALITY_ESINR_HPP
#define GFDMSIM_LINKQUALITY_ESINR_HPP

#include <cmath>
#include <vector>

#include "gfdmsim/common.hpp"
#include "gfdmsim/linkquality/sitable.hpp"

namespace gfdmsim {

/// Where the code-adjustment factor enters. SnrDomain scales the SNR inside
/// SI (keeps RBIR in [0,1] at any gamma_code); SiDomain multiplies the SI
/// values, the literal reading, kept for calibration studies.
enum class GammaCodeMode { SnrDomain, SiDomain };

struct EsinrReport {
    double rbir = 0.0;
    double esinr_db = 0.0;
    double gamma_code = 1.0;
    bool clamped = false;       // RBIR left the table range
    double predicted_bler = -1.0;  // filled by the LUT stage when used
};

/// Received-bit information rate: the per-block average of the normalised
/// symbol information, RBIR = sum_j min(SI, m) / (J m), in [0, 1].
inline double rbir(const dvec& sinr_linear, const SiTable& table,
                   double gamma_code = 1.0,
                   GammaCodeMode mode = GammaCodeMode::SnrDomain) {
    if (sinr_linear.empty()) throw ConfigError("empty SINR vector");
    if (!(gamma_code > 0.0)) throw ConfigError("gamma_code must be > 0");
    const double m = table.bits_per_symbol();
    double acc = 0.0;
    for (double g : sinr_linear) {
        double si = (mode == GammaCodeMode::SnrDomain)
                        ? table.lookup_linear(gamma_code * g)
                        : gamma_code * table.lookup_linear(g);
        acc += std::min(si, m);
    }
    return acc / (double(sinr_linear.size()) * m);
}

/// Mutual-information effective SINR: map per-sample SINRs through SI,
/// average, and return through the inverse map. With gamma_code = 1 a
/// constant input vector is returned unchanged.
inline EsinrReport esinr_miesm(const dvec& sinr_linear, const SiTable& table,
                               double gamma_code = 1.0,
                               GammaCodeMode mode = GammaCodeMode::SnrDomain) {
    EsinrReport rep;
    rep.gamma_code = gamma_code;
    rep.rbir = rbir(sinr_linear, table, gamma_code, mode);
    const double m = table.bits_per_symbol();
    const double si_target = (mode == GammaCodeMode::SnrDomain)
                                 ? rep.rbir * m
                                 : rep.rbir * m / gamma_code;
    double esinr_db = table.invert_db(si_target, &rep.clamped);
    if (mode == GammaCodeMode::SnrDomain) esinr_db -= lin_to_db(gamma_code);
    rep.esinr_db = esinr_db;
    return rep;
}

/// Exponential effective SINR: gamma_eff = -beta ln( mean exp(-gamma/beta) ).
inline double esinr_eesm(const dvec& sinr_linear, double beta) {
    if (sinr_linear.empty()) throw ConfigError("empty SINR vector");
    if (!(beta > 0.0)) throw ConfigError("beta must be > 0");
    double acc = 0.0;
    for (double g : sinr_linear) acc += std::exp(-g / beta);
    acc /= double(sinr_linear.size());
    return lin_to_db(-beta * std::log(acc));
}

}  // namespace gfdmsim

#endif
