#ifndef GFDMSIM_COMMON_HPP
#define GFDMSIM_COMMON_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace gfdmsim {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;
using dvec = std::vector<double>;

inline constexpr double pi = 3.14159265358979323846;

inline double db_to_lin(double db) { return std::pow(10.0, db / 10.0); }
inline double lin_to_db(double lin) { return 10.0 * std::log10(lin); }

/// Configuration that cannot be simulated (bad geometry, bad keys, ...).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Input sizes do not match what the operation expects.
struct DimensionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A frequency sample of the channel response is too small to invert.
struct SingularChannel : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The modulation matrix for (filter, K, M) is not invertible.
struct SingularModulation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// FNV-1a, used to fingerprint configurations in file headers.
inline std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline int mod_floor(int a, int n) {
    int r = a % n;
    return r < 0 ? r + n : r;
}

}  // namespace gfdmsim

#endif
