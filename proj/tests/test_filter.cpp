#include <catch2/catch_amalgamated.hpp>

#include "gfdmsim/gfdm/filter.hpp"

using namespace gfdmsim;

namespace {
double impulse_energy(const PrototypeFilter& f) {
    double e = 0;
    for (const auto& v : f.impulse) e += std::norm(v);
    return e;
}
}  // namespace

TEST_CASE("dirichlet with M=1 degenerates to the flat OFDM pulse") {
    const auto cfg = GfdmConfig::make(4, 4, 1, 0, FilterKind::Dirichlet);
    const auto f = build_filter(cfg);
    REQUIRE(f.impulse.size() == 4);
    for (const auto& v : f.impulse) {
        REQUIRE(v.real() == Catch::Approx(0.5).margin(1e-14));
        REQUIRE(std::abs(v.imag()) < 1e-14);
    }
}

TEST_CASE("raised cosine with zero roll-off equals dirichlet") {
    const auto d = build_filter(GfdmConfig::make(16, 16, 5, 0, FilterKind::Dirichlet));
    const auto rc = build_filter(
        GfdmConfig::make(16, 16, 5, 0, FilterKind::RaisedCosine, 0.0));
    REQUIRE(d.support == rc.support);
    for (std::size_t i = 0; i < d.support_value.size(); ++i)
        REQUIRE(d.support_value[i] == rc.support_value[i]);
}

TEST_CASE("unit energy across the filter menu") {
    for (double a : {0.1, 0.5, 0.9}) {
        const auto f = build_filter(
            GfdmConfig::make(64, 64, 9, 0, FilterKind::RaisedCosine, a));
        REQUIRE(impulse_energy(f) == Catch::Approx(1.0).margin(1e-12));
    }
    const auto d = build_filter(GfdmConfig::make(64, 64, 9, 0, FilterKind::Dirichlet));
    REQUIRE(impulse_energy(d) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("roll-off outside [0,1] is rejected") {
    REQUIRE_THROWS_AS(GfdmConfig::make(8, 8, 3, 0, FilterKind::RaisedCosine, 1.5),
                      ConfigError);
    REQUIRE_THROWS_AS(GfdmConfig::make(8, 8, 3, 0, FilterKind::RaisedCosine, -0.1),
                      ConfigError);
}

TEST_CASE("rc-0.9 spills into adjacent subcarriers, dirichlet does not") {
    const auto d = build_filter(GfdmConfig::make(64, 64, 9, 0, FilterKind::Dirichlet));
    REQUIRE(d.support.size() == 9);
    for (int nu : d.support) REQUIRE(std::abs(nu) <= 4);

    const auto rc = build_filter(
        GfdmConfig::make(64, 64, 9, 0, FilterKind::RaisedCosine, 0.9));
    int widest = 0;
    for (int nu : rc.support) widest = std::max(widest, std::abs(nu));
    REQUIRE(widest == 8);  // (1+0.9)*9/2 = 8.55 -> bins up to +-8
}

TEST_CASE("integer-bin sampling makes rc-0.1 coincide with dirichlet at M=9") {
    // The taper region ((1-a)M/2, (1+a)M/2) = (4.05, 4.95) holds no integer
    // bin, so the sampled spectrum is the rectangle.
    const auto d = build_filter(GfdmConfig::make(64, 64, 9, 0, FilterKind::Dirichlet));
    const auto rc = build_filter(
        GfdmConfig::make(64, 64, 9, 0, FilterKind::RaisedCosine, 0.1));
    REQUIRE(d.support == rc.support);
    for (std::size_t i = 0; i < d.support_value.size(); ++i)
        REQUIRE(rc.support_value[i] == Catch::Approx(d.support_value[i]).margin(1e-15));
}
