#include <catch2/catch_amalgamated.hpp>

#include "gfdmsim/channel/sinr.hpp"
#include "gfdmsim/rng.hpp"

using namespace gfdmsim;

TEST_CASE("no interference collapses to plain SNR") {
    const cvec h(32, cplx(1, 0));
    LinkGain serving{2.5, 1.0, &h};
    std::vector<int> alloc;
    for (int i = 0; i < 32; ++i) alloc.push_back(i);
    const dvec g = compute_sinr(serving, {}, 0.5, alloc);
    for (double v : g) REQUIRE(v == Catch::Approx(5.0));
}

TEST_CASE("symmetric interferer halves the ratio") {
    const cvec h(8, cplx(1, 0));
    LinkGain serving{1.0, 1.0, &h};
    LinkGain interf{1.0, 1.0, &h};
    const dvec g = compute_sinr(serving, {interf}, 0.25, {0, 1, 2});
    for (double v : g) {
        REQUIRE(v == Catch::Approx(1.0 / 1.25));
        REQUIRE(v < 1.0);
    }
}

TEST_CASE("adding an interferer strictly lowers every sample") {
    Rng rng(42);
    for (int rep = 0; rep < 50; ++rep) {
        const int n = 16;
        cvec hs(n), h1(n), h2(n);
        for (int i = 0; i < n; ++i) {
            hs[i] = rng.cnormal();
            h1[i] = rng.cnormal();
            h2[i] = rng.cnormal();
        }
        LinkGain serving{rng.uniform(0.5, 2.0), rng.uniform(0.2, 1.0), &hs};
        LinkGain q1{rng.uniform(0.5, 2.0), rng.uniform(0.2, 1.0), &h1};
        LinkGain q2{rng.uniform(0.5, 2.0), rng.uniform(0.2, 1.0), &h2};
        std::vector<int> alloc;
        for (int i = 0; i < n; ++i) alloc.push_back(i);
        const double sigma2 = rng.uniform(0.05, 0.5);

        const dvec one = compute_sinr(serving, {q1}, sigma2, alloc);
        const dvec two = compute_sinr(serving, {q1, q2}, sigma2, alloc);
        for (int i = 0; i < n; ++i) {
            if (std::norm(h2[i]) > 0.0) REQUIRE(two[i] < one[i]);
            REQUIRE(two[i] <= one[i]);
        }
    }
}

TEST_CASE("empty allocation is rejected") {
    const cvec h(4, cplx(1, 0));
    LinkGain serving{1.0, 1.0, &h};
    REQUIRE_THROWS_AS(compute_sinr(serving, {}, 0.1, {}), ConfigError);
}
