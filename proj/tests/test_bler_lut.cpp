#include <catch2/catch_amalgamated.hpp>
#include <filesystem>

#include "gfdmsim/linkquality/bler_lut.hpp"
#include "support/test_util.hpp"

using namespace gfdmsim;

namespace {
BlerLut demo_lut() {
    BlerLut lut;
    lut.mcs_name = "qpsk-1/3";
    lut.filter_name = "dirichlet";
    lut.config_hash = 0xabc;
    const double snr[] = {0.0, 0.25, 0.5, 0.75, 1.0, 1.25};
    const long err[] = {2000, 1500, 600, 80, 9, 0};
    for (int i = 0; i < 6; ++i) {
        BlerLut::Point p;
        p.snr_db = snr[i];
        p.packets = 2000;
        p.block_errors = err[i];
        p.ber = double(err[i]) / 2000.0 * 0.05;
        lut.points.push_back(p);
    }
    lut.finalize();
    return lut;
}
}  // namespace

TEST_CASE("isotonic fit pools adjacent violators with weights") {
    const dvec fit = isotonic_non_increasing({0.9, 0.95, 0.5, 0.6, 0.1},
                                             {1, 1, 1, 3, 1});
    REQUIRE(fit[0] == Catch::Approx(0.925));
    REQUIRE(fit[1] == Catch::Approx(0.925));
    REQUIRE(fit[2] == Catch::Approx(0.575));
    REQUIRE(fit[3] == Catch::Approx(0.575));
    REQUIRE(fit[4] == Catch::Approx(0.1));
    for (std::size_t i = 1; i < fit.size(); ++i) REQUIRE(fit[i] <= fit[i - 1]);
}

TEST_CASE("prediction clamps below, above and hits nodes exactly") {
    const BlerLut lut = demo_lut();
    REQUIRE(lut.predict(-3.0) == 1.0);
    REQUIRE(lut.predict(50.0) == Catch::Approx(lut.floor_bler()));
    for (const auto& p : lut.points)
        REQUIRE(lut.predict(p.snr_db) == Catch::Approx(p.bler));
    REQUIRE(lut.floor_bler() == Catch::Approx(1.0 / 20000.0));
}

TEST_CASE("prediction is non-increasing in esinr") {
    const BlerLut lut = demo_lut();
    double prev = 2.0;
    for (double s = -2.0; s < 3.0; s += 0.01) {
        const double b = lut.predict(s);
        REQUIRE(b <= prev + 1e-15);
        REQUIRE(b >= lut.floor_bler());
        REQUIRE(b <= 1.0);
        prev = b;
    }
}

TEST_CASE("waterfall crossing interpolates in the log domain") {
    const BlerLut lut = demo_lut();
    const double s10 = lut.snr_at_bler(0.10);
    REQUIRE(s10 > 0.25);
    REQUIRE(s10 < 0.75);
    REQUIRE(std::isnan(lut.snr_at_bler(1e-9)));
}

TEST_CASE("lut files round-trip") {
    const BlerLut lut = demo_lut();
    std::filesystem::create_directories(testutil::table_cache_dir());
    const std::string path = testutil::table_cache_dir() + "/lut_roundtrip.csv";
    lut.save(path);
    const BlerLut back = BlerLut::load(path);
    REQUIRE(back.mcs_name == lut.mcs_name);
    REQUIRE(back.filter_name == lut.filter_name);
    REQUIRE(back.config_hash == lut.config_hash);
    REQUIRE(back.points.size() == lut.points.size());
    for (std::size_t i = 0; i < lut.points.size(); ++i) {
        REQUIRE(back.points[i].snr_db == lut.points[i].snr_db);
        REQUIRE(back.points[i].bler == lut.points[i].bler);
        REQUIRE(back.points[i].packets == lut.points[i].packets);
    }
    std::filesystem::remove(path);
}
