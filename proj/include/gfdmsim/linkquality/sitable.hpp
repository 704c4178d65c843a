#ifndef GFDMSIM_LINKQUALITY_SITABLE_HPP
#define GFDMSIM_LINKQUALITY_SITABLE_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "gfdmsim/common.hpp"
#include "gfdmsim/fec/constellation.hpp"

namespace gfdmsim {

namespace detail {

// 24-point Gauss-Hermite rule (weight e^{-t^2}); positive half, mirrored.
struct GhNode { double x, w; };
inline constexpr GhNode gh24_half[12] = {
    {2.24414547472515574e-01, 4.26931163868699337e-01},
    {6.74171107037212280e-01, 2.86179535346442915e-01},
    {1.12676081761124514e+00, 1.27739621784559165e-01},
    {1.58425001096169416e+00, 3.74454705032307364e-02},
    {2.04900357366169894e+00, 7.04835581007267307e-03},
    {2.52388101701142720e+00, 8.23692482688416906e-04},
    {3.01254613756556466e+00, 5.68869163640439216e-05},
    {3.52000681303452456e+00, 2.15824570490234137e-06},
    {4.05366440244814896e+00, 4.01897117494143804e-08},
    {4.62566275642378777e+00, 3.04625426998755548e-10},
    {5.25938292766804416e+00, 6.58462024307816698e-13},
    {6.01592556142573986e+00, 1.66436849648910082e-16},
};

inline const std::vector<GhNode>& gh24() {
    static const std::vector<GhNode> nodes = [] {
        std::vector<GhNode> v;
        for (const auto& n : gh24_half) v.push_back({-n.x, n.w});
        for (const auto& n : gh24_half) v.push_back({n.x, n.w});
        return v;
    }();
    return nodes;
}

}  // namespace detail

/// Symbol information of a 2^m-ary constellation at linear SNR gamma:
///
///   SI(gamma, m) = E[ log2( P(Y|X) / sum_x P(X) P(Y|x) ) ],  P(X) = 2^-m
///
/// evaluated by tensor-product Gauss-Hermite quadrature (24 nodes per axis)
/// over the complex Gaussian noise and averaged over all constellation
/// points. Deterministic; result clamped to [0, m].
inline double symbol_information(double gamma, int bits_per_symbol) {
    if (!(gamma > 0.0)) return 0.0;
    static const Constellation qpsk(2), qam16(4), qam64(6);
    const Constellation& c = bits_per_symbol == 2   ? qpsk
                             : bits_per_symbol == 4 ? qam16
                                                    : qam64;
    if (bits_per_symbol != 2 && bits_per_symbol != 4 && bits_per_symbol != 6)
        throw ConfigError("modulation order must be 2, 4 or 6 bits");

    const auto& nodes = detail::gh24();
    const cvec& pts = c.points();
    const double inv_sqrt_gamma = 1.0 / std::sqrt(gamma);
    const double inv_pi = 1.0 / pi;
    const double inv_card = 1.0 / double(pts.size());

    double loss = 0.0;  // E[log2 sum_x' exp(gamma(|w|^2 - |x - x' + w|^2))]
    for (const cplx& x : pts) {
        for (const auto& ni : nodes) {
            for (const auto& nj : nodes) {
                const cplx w(ni.x * inv_sqrt_gamma, nj.x * inv_sqrt_gamma);
                const double w2 = std::norm(w);
                double sum = 0.0;
                for (const cplx& xp : pts)
                    sum += std::exp(gamma * (w2 - std::norm(x - xp + w)));
                loss += ni.w * nj.w * std::log2(sum);
            }
        }
    }
    loss *= inv_pi * inv_card;
    const double si = double(bits_per_symbol) - loss;
    return std::clamp(si, 0.0, double(bits_per_symbol));
}

/// Tabulated SI(gamma; m) on a fixed -20..+40 dB grid in 0.25 dB steps,
/// with monotone piecewise-linear lookup and the exact inverse of that
/// interpolation. All ESINR arithmetic goes through one table so that the
/// map/unmap round trip is an identity by construction.
class SiTable {
public:
    static constexpr double grid_min_db = -20.0;
    static constexpr double grid_max_db = 40.0;
    static constexpr double grid_step_db = 0.25;

    static SiTable build(int bits_per_symbol) {
        SiTable t;
        t.bits_ = bits_per_symbol;
        const int count =
            int(std::lround((grid_max_db - grid_min_db) / grid_step_db)) + 1;
        t.si_.resize(std::size_t(count));
        for (int i = 0; i < count; ++i) {
            const double snr_db = grid_min_db + i * grid_step_db;
            t.si_[std::size_t(i)] =
                symbol_information(db_to_lin(snr_db), bits_per_symbol);
        }
        return t;
    }

    int bits_per_symbol() const { return bits_; }
    std::size_t size() const { return si_.size(); }
    double grid_db(std::size_t i) const { return grid_min_db + i * grid_step_db; }
    double value(std::size_t i) const { return si_[i]; }

    /// SI at gamma (linear); clamps outside the grid to the endpoint values.
    double lookup_linear(double gamma) const {
        if (!(gamma > 0.0)) return si_.front();
        return lookup_db(lin_to_db(gamma));
    }

    double lookup_db(double snr_db) const {
        const double pos = (snr_db - grid_min_db) / grid_step_db;
        if (pos <= 0.0) return si_.front();
        if (pos >= double(si_.size() - 1)) return si_.back();
        const std::size_t i = std::size_t(pos);
        const double frac = pos - double(i);
        return si_[i] + frac * (si_[i + 1] - si_[i]);
    }

    /// Inverse of lookup_db. For targets outside the table range the result
    /// is clamped to the grid edge and *clamped is set.
    double invert_db(double si_target, bool* clamped = nullptr) const {
        if (clamped) *clamped = false;
        if (si_target <= si_.front()) {
            if (clamped && si_target < si_.front()) *clamped = true;
            return grid_min_db;
        }
        if (si_target >= si_.back()) {
            if (clamped && si_target > si_.back()) *clamped = true;
            return grid_max_db;
        }
        // first segment whose upper value reaches the target
        std::size_t lo = 0, hi = si_.size() - 1;
        while (hi - lo > 1) {
            const std::size_t mid = (lo + hi) / 2;
            if (si_[mid] >= si_target)
                hi = mid;
            else
                lo = mid;
        }
        const double span = si_[hi] - si_[lo];
        const double frac = span > 0.0 ? (si_target - si_[lo]) / span : 0.0;
        return grid_db(lo) + frac * grid_step_db;
    }

    void save(const std::string& path, std::uint64_t config_hash) const {
        std::FILE* f = std::fopen(path.c_str(), "w");
        if (!f) throw IoError("cannot write " + path);
        std::fprintf(f, "# gfdmsim si_table v1\n");
        std::fprintf(f, "# config_hash=%016llx\n",
                     (unsigned long long)config_hash);
        std::fprintf(f, "# modulation_bits=%d\n", bits_);
        std::fprintf(f, "snr_db,si\n");
        for (std::size_t i = 0; i < si_.size(); ++i)
            std::fprintf(f, "%.2f,%.17g\n", grid_db(i), si_[i]);
        std::fclose(f);
    }

    static SiTable load(const std::string& path, std::uint64_t* config_hash = nullptr) {
        std::FILE* f = std::fopen(path.c_str(), "r");
        if (!f) throw IoError("cannot read " + path);
        SiTable t;
        char line[256];
        while (std::fgets(line, sizeof line, f)) {
            if (line[0] == '#') {
                unsigned long long h = 0;
                int m = 0;
                if (std::sscanf(line, "# config_hash=%llx", &h) == 1 && config_hash)
                    *config_hash = h;
                if (std::sscanf(line, "# modulation_bits=%d", &m) == 1)
                    t.bits_ = m;
                continue;
            }
            double snr = 0, si = 0;
            if (std::sscanf(line, "%lf,%lf", &snr, &si) == 2)
                t.si_.push_back(si);
        }
        std::fclose(f);
        if (t.si_.empty() || t.bits_ == 0)
            throw IoError("not a SI table: " + path);
        return t;
    }

private:
    int bits_ = 0;
    dvec si_;
};

}  // namespace gfdmsim

#endif
