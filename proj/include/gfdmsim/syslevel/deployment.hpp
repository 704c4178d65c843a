#ifndef GFDMSIM_SYSLEVEL_DEPLOYMENT_HPP
#define GFDMSIM_SYSLEVEL_DEPLOYMENT_HPP

#include <cmath>
#include <vector>

#include "gfdmsim/common.hpp"
#include "gfdmsim/rng.hpp"

namespace gfdmsim {

/// Macro-cellular downlink parameters (hexagonal reuse-1 layout).
struct SyslevelParams {
    double cell_radius_m = 500.0;
    double bs_tx_power_dbm = 43.0;
    double noise_figure_db = 9.0;
    double carrier_ghz = 2.6;
    double bandwidth_hz = 20e6;
    double bs_height_m = 25.0;
    double ue_height_m = 1.5;
    double downtilt_deg = 10.0;
    double antenna_gain_dbi = 15.0;
    double shadowing_sigma_db = 6.0;
    double drop_min_m = 50.0;
    double drop_max_m = 1000.0;

    double noise_power_dbm() const {
        return -174.0 + 10.0 * std::log10(bandwidth_hz) + noise_figure_db;
    }
};

/// Serving site at the origin plus the six first-tier co-channel sites on a
/// hexagonal lattice with inter-site distance 3R.
struct Deployment {
    SyslevelParams params;
    struct Site { double x, y; };
    std::vector<Site> sites;

    int interferer_count() const { return int(sites.size()) - 1; }
};

inline Deployment generate_deployment(const SyslevelParams& params) {
    if (params.cell_radius_m <= 0.0)
        throw ConfigError("cell radius must be > 0");
    Deployment d;
    d.params = params;
    d.sites.push_back({0.0, 0.0});
    const double isd = 3.0 * params.cell_radius_m;
    for (int i = 0; i < 6; ++i) {
        const double ang = i * 60.0 * pi / 180.0;
        d.sites.push_back({isd * std::cos(ang), isd * std::sin(ang)});
    }
    return d;
}

/// Urban-macro log-distance path loss (dB): 128.1 + 37.6 log10(d/km) at
/// 2 GHz, with a 21 log10(f/2) carrier correction.
inline double urban_macro_path_loss_db(double dist_m, double carrier_ghz) {
    const double d_km = std::max(dist_m, 10.0) / 1000.0;
    return 128.1 + 37.6 * std::log10(d_km) +
           21.0 * std::log10(carrier_ghz / 2.0);
}

/// Parabolic three-sector antenna with downtilt: horizontal roll-off
/// -min(12 (phi/70)^2, 25) dB, vertical -min(12 ((theta-tilt)/10)^2, 20) dB,
/// combined attenuation capped at 25 dB below peak gain.
inline double sector_antenna_gain_db(double azimuth_off_deg, double elev_deg,
                                     const SyslevelParams& p) {
    double phi = std::fmod(std::abs(azimuth_off_deg), 360.0);
    if (phi > 180.0) phi = 360.0 - phi;
    const double ah = std::min(12.0 * (phi / 70.0) * (phi / 70.0), 25.0);
    const double dv = (elev_deg - p.downtilt_deg) / 10.0;
    const double av = std::min(12.0 * dv * dv, 20.0);
    return p.antenna_gain_dbi - std::min(ah + av, 25.0);
}

/// Strongest of the three sectors (boresights 0/120/240 degrees) of a site
/// toward a point; the dominant sector carries the link.
inline double site_antenna_gain_db(const Deployment::Site& site, double ue_x,
                                   double ue_y, const SyslevelParams& p) {
    const double dx = ue_x - site.x, dy = ue_y - site.y;
    const double dist = std::hypot(dx, dy);
    const double az = std::atan2(dy, dx) * 180.0 / pi;
    const double elev =
        std::atan2(p.bs_height_m - p.ue_height_m, std::max(dist, 1.0)) * 180.0 /
        pi;
    double best = -1e300;
    for (int s = 0; s < 3; ++s)
        best = std::max(best,
                        sector_antenna_gain_db(az - 120.0 * s, elev, p));
    return best;
}

/// One dropped user: street-level position and per-site shadowing draws.
struct UeDrop {
    double x = 0.0, y = 0.0;
    dvec shadow_db;  // one per site, serving first
};

/// Uniform-area drops on the [drop_min, drop_max] annulus around the
/// serving site, i.i.d. log-normal shadowing per link.
inline std::vector<UeDrop> drop_ues(int count, const Deployment& dep, Rng& rng) {
    std::vector<UeDrop> ues;
    ues.reserve(std::size_t(count));
    const double r0 = dep.params.drop_min_m, r1 = dep.params.drop_max_m;
    for (int i = 0; i < count; ++i) {
        UeDrop ue;
        const double r = std::sqrt(rng.uniform() * (r1 * r1 - r0 * r0) + r0 * r0);
        const double ang = rng.uniform() * 2.0 * pi;
        ue.x = r * std::cos(ang);
        ue.y = r * std::sin(ang);
        ue.shadow_db.resize(dep.sites.size());
        for (auto& s : ue.shadow_db)
            s = dep.params.shadowing_sigma_db * rng.normal();
        ues.push_back(std::move(ue));
    }
    return ues;
}

/// Linear received-power gain (path loss, shadowing, antenna) of one link.
inline double link_path_gain(const Deployment& dep, const UeDrop& ue,
                             std::size_t site_idx) {
    const auto& site = dep.sites[site_idx];
    const double dist = std::hypot(ue.x - site.x, ue.y - site.y);
    const double pl = urban_macro_path_loss_db(dist, dep.params.carrier_ghz);
    const double gain = site_antenna_gain_db(site, ue.x, ue.y, dep.params);
    const double total_db = -pl + gain - ue.shadow_db[site_idx];
    return std::min(db_to_lin(total_db), 1.0);
}

}  // namespace gfdmsim

#endif
