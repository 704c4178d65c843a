#include <Eigen/Dense>
#include <catch2/catch_amalgamated.hpp>

#include "gfdmsim/fft.hpp"
#include "gfdmsim/gfdm/modem.hpp"
#include "support/test_util.hpp"

using namespace gfdmsim;
using testutil::max_abs;
using testutil::max_abs_diff;
using testutil::random_grid;

namespace {

/// Independent evaluation of the modulation sum, written directly from the
/// definition with no shared code or precomputed tables.
cvec oracle_modulate(const SymbolGrid& grid, const PrototypeFilter& filter,
                     const GfdmConfig& cfg) {
    const int n = cfg.block_len();
    cvec x(std::size_t(n), cplx(0, 0));
    for (int nn = 0; nn < n; ++nn) {
        cplx acc(0, 0);
        for (int k = 0; k < cfg.subcarriers; ++k) {
            for (int m = 0; m < cfg.subsymbols; ++m) {
                int idx = (nn - m * cfg.subcarriers) % n;
                if (idx < 0) idx += n;
                acc += filter.impulse[idx] *
                       std::polar(1.0, -2.0 * pi * k * nn / cfg.subcarriers) *
                       grid.at(k, m);
            }
        }
        x[nn] = acc;
    }
    return x;
}

/// Explicit modulation matrix: column k*M+m holds the shifted pulse.
Eigen::MatrixXcd modulation_matrix(const GfdmModem& modem) {
    const auto& cfg = modem.config();
    const int n = cfg.block_len();
    Eigen::MatrixXcd a(n, n);
    for (int k = 0; k < cfg.subcarriers; ++k) {
        for (int m = 0; m < cfg.subsymbols; ++m) {
            for (int nn = 0; nn < n; ++nn) {
                int idx = (nn - m * cfg.subcarriers) % n;
                if (idx < 0) idx += n;
                const cplx g = modem.filter().impulse[idx] *
                               std::polar(1.0, -2.0 * pi * k * nn / cfg.subcarriers);
                a(nn, k * cfg.subsymbols + m) = g;
            }
        }
    }
    return a;
}

SymbolGrid delta_grid(const GfdmConfig& cfg, int k, int m) {
    SymbolGrid g(cfg.subcarriers, cfg.subsymbols);
    g.at(k, m) = 1.0;
    return g;
}

}  // namespace

TEST_CASE("direct modulator matches a hand-rolled evaluation of the sum") {
    const auto cfg = GfdmConfig::make(4, 4, 3, 0, FilterKind::Dirichlet);
    GfdmModem modem(cfg);
    Rng rng(11);
    for (int rep = 0; rep < 5; ++rep) {
        const auto grid = random_grid(cfg, rng);
        const auto fast = modem.modulate_direct(grid);
        const auto ref = oracle_modulate(grid, modem.filter(), cfg);
        REQUIRE(max_abs_diff(fast.samples, ref) < 1e-12);
    }
}

TEST_CASE("all-zero grid modulates to the all-zero block") {
    const auto cfg = GfdmConfig::make(8, 8, 3, 0, FilterKind::Dirichlet);
    GfdmModem modem(cfg);
    SymbolGrid zero(cfg.subcarriers, cfg.subsymbols);
    REQUIRE(max_abs(modem.modulate_direct(zero).samples) == 0.0);
    REQUIRE(max_abs(modem.modulate_fast(zero).samples) < 1e-15);
}

TEST_CASE("a single d_{0,0}=1 reproduces the prototype pulse") {
    const auto cfg = GfdmConfig::make(8, 8, 5, 0, FilterKind::RaisedCosine, 0.9);
    GfdmModem modem(cfg);
    const auto x = modem.modulate_direct(delta_grid(cfg, 0, 0));
    REQUIRE(max_abs_diff(x.samples, modem.filter().impulse) < 1e-13);
}

TEST_CASE("impulse on subcarrier 2 keeps the pulse magnitude") {
    const auto cfg = GfdmConfig::make(8, 8, 5, 0, FilterKind::Dirichlet);
    GfdmModem modem(cfg);
    const auto x = modem.modulate_fast(delta_grid(cfg, 2, 0));
    for (std::size_t i = 0; i < x.samples.size(); ++i)
        REQUIRE(std::abs(x.samples[i]) ==
                Catch::Approx(std::abs(modem.filter().impulse[i])).margin(1e-12));
}

TEST_CASE("fast modulator agrees with the direct one across configs") {
    Rng rng(2024);
    for (int k : {4, 8, 16}) {
        for (int m : {1, 3, 5}) {
            for (int f = 0; f < 2; ++f) {
                const auto cfg =
                    f == 0 ? GfdmConfig::make(k, k, m, 0, FilterKind::Dirichlet)
                           : GfdmConfig::make(k, k, m, 0,
                                              FilterKind::RaisedCosine, 0.9);
                GfdmModem modem(cfg);
                for (int rep = 0; rep < 10; ++rep) {
                    const auto grid = random_grid(cfg, rng);
                    const auto direct = modem.modulate_direct(grid);
                    const auto fast = modem.modulate_fast(grid);
                    REQUIRE(max_abs_diff(direct.samples, fast.samples) <
                            1e-9 * max_abs(direct.samples));
                }
            }
        }
    }
}

TEST_CASE("M=1 dirichlet reduces to OFDM (a scaled DFT of the symbols)") {
    const auto cfg = GfdmConfig::make(16, 16, 1, 0, FilterKind::Dirichlet);
    GfdmModem modem(cfg);
    Rng rng(5);
    cvec d(16);
    SymbolGrid grid(16, 1);
    for (int k = 0; k < 16; ++k) {
        d[k] = rng.cnormal();
        grid.at(k, 0) = d[k];
    }
    const auto x = modem.modulate_fast(grid);
    const cvec ref = dft_unitary(d);
    REQUIRE(max_abs_diff(x.samples, ref) < 1e-12);
}

TEST_CASE("modulation is linear") {
    const auto cfg = GfdmConfig::make(8, 8, 3, 0, FilterKind::RaisedCosine, 0.5);
    GfdmModem modem(cfg);
    Rng rng(3);
    const auto g1 = random_grid(cfg, rng);
    const auto g2 = random_grid(cfg, rng);
    const cplx a(1.7, -0.4), b(-0.3, 2.2);
    SymbolGrid mix(cfg.subcarriers, cfg.subsymbols);
    for (std::size_t i = 0; i < mix.symbols.size(); ++i)
        mix.symbols[i] = a * g1.symbols[i] + b * g2.symbols[i];
    const auto xm = modem.modulate_fast(mix);
    const auto x1 = modem.modulate_fast(g1);
    const auto x2 = modem.modulate_fast(g2);
    cvec combo(x1.samples.size());
    for (std::size_t i = 0; i < combo.size(); ++i)
        combo[i] = a * x1.samples[i] + b * x2.samples[i];
    REQUIRE(max_abs_diff(xm.samples, combo) < 1e-10);
}

TEST_CASE("cyclic prefix layout and round trip") {
    GfdmConfig cfg = GfdmConfig::make(4, 4, 2, 2, FilterKind::Dirichlet);
    SampleBlock x;
    for (int i = 0; i < 8; ++i) x.samples.push_back(cplx(i + 1, -i));

    const auto with_cp = add_cyclic_prefix(x, cfg);
    REQUIRE(with_cp.samples.size() == 10);
    REQUIRE(with_cp.samples[0] == x.samples[6]);
    REQUIRE(with_cp.samples[1] == x.samples[7]);
    for (int i = 0; i < 8; ++i) REQUIRE(with_cp.samples[i + 2] == x.samples[i]);

    const auto back = remove_cyclic_prefix(with_cp, cfg);
    REQUIRE(max_abs_diff(back.samples, x.samples) == 0.0);

    cfg.cp_len = 0;
    const auto noop = remove_cyclic_prefix(add_cyclic_prefix(x, cfg), cfg);
    REQUIRE(max_abs_diff(noop.samples, x.samples) == 0.0);
}

TEST_CASE("zero-forcing equalisation") {
    const auto cfg = GfdmConfig::make(8, 8, 3, 0, FilterKind::Dirichlet);
    const int n = cfg.block_len();
    Rng rng(17);
    SampleBlock x;
    for (int i = 0; i < n; ++i) x.samples.push_back(rng.cnormal());

    SECTION("identity channel is a no-op") {
        const cvec h(std::size_t(n), cplx(1, 0));
        REQUIRE(max_abs_diff(equalize_zf(x, h, cfg).samples, x.samples) < 1e-12);
    }
    SECTION("flat channel divides out") {
        const cplx c(0.3, -1.2);
        const cvec h(std::size_t(n), c);
        const auto out = equalize_zf(x, h, cfg);
        for (int i = 0; i < n; ++i)
            REQUIRE(std::abs(out.samples[i] - x.samples[i] / c) < 1e-12);
    }
    SECTION("random channel forward-inverse composition") {
        cvec h(std::size_t(n), cplx(0, 0));
        for (auto& v : h) {
            do {
                v = rng.cnormal();
            } while (std::abs(v) < 0.1);
        }
        cvec spec = dft_unitary(x.samples);
        for (int i = 0; i < n; ++i) spec[i] *= h[i];
        SampleBlock faded;
        faded.samples = idft_unitary(spec);
        const auto out = equalize_zf(faded, h, cfg);
        REQUIRE(max_abs_diff(out.samples, x.samples) < 1e-9);
    }
    SECTION("vanishing channel sample is rejected") {
        cvec h(std::size_t(n), cplx(1, 0));
        h[3] = 0.0;
        REQUIRE_THROWS_AS(equalize_zf(x, h, cfg), SingularChannel);
    }
}

TEST_CASE("noiseless perfect reconstruction for the table-1 waveform") {
    Rng rng(31);
    for (double a : {-1.0, 0.1, 0.9}) {  // -1 marks dirichlet
        const auto cfg = a < 0
                             ? GfdmConfig::make(64, 64, 9, 0, FilterKind::Dirichlet)
                             : GfdmConfig::make(64, 64, 9, 0,
                                                FilterKind::RaisedCosine, a);
        GfdmModem modem(cfg);
        ZfDemodulator demod(cfg, modem.filter());
        const auto grid = random_grid(cfg, rng);
        const auto rebuilt = demod.demodulate_zf(modem.modulate_fast(grid));
        REQUIRE(max_abs_diff(rebuilt.symbols, grid.symbols) < 1e-9);
    }
}

TEST_CASE("zero block demodulates to the zero grid") {
    const auto cfg = GfdmConfig::make(16, 16, 3, 0, FilterKind::RaisedCosine, 0.9);
    GfdmModem modem(cfg);
    ZfDemodulator demod(cfg, modem.filter());
    SampleBlock zero;
    zero.samples.assign(std::size_t(cfg.block_len()), cplx(0, 0));
    REQUIRE(max_abs(demod.demodulate_zf(zero).symbols) < 1e-15);
}

TEST_CASE("fast inverse equals the explicit matrix inverse") {
    const auto cfg = GfdmConfig::make(8, 8, 5, 0, FilterKind::RaisedCosine, 0.9);
    GfdmModem modem(cfg);
    ZfDemodulator demod(cfg, modem.filter());
    const int n = cfg.block_len();

    const Eigen::MatrixXcd a = modulation_matrix(modem);
    const auto lu = a.fullPivLu();
    Rng rng(71);
    for (int rep = 0; rep < 4; ++rep) {
        SampleBlock x;
        for (int i = 0; i < n; ++i) x.samples.push_back(rng.cnormal());
        Eigen::VectorXcd xe(n);
        for (int i = 0; i < n; ++i) xe(i) = x.samples[i];
        const Eigen::VectorXcd ref = lu.solve(xe);
        const auto grid = demod.demodulate_zf(x);
        for (int i = 0; i < n; ++i)
            REQUIRE(std::abs(grid.symbols[i] - ref(i)) < 1e-10);
    }
}

TEST_CASE("per-symbol noise variance matches the matrix oracle") {
    const auto cfg = GfdmConfig::make(8, 8, 3, 0, FilterKind::RaisedCosine, 0.9);
    GfdmModem modem(cfg);
    ZfDemodulator demod(cfg, modem.filter());
    const int n = cfg.block_len();

    // d_hat = A^{-1} F^H (noise/H); row energies weighted by u give the
    // exact variance.
    const Eigen::MatrixXcd a = modulation_matrix(modem);
    Eigen::MatrixXcd fh(n, n);
    for (int t = 0; t < n; ++t)
        for (int f = 0; f < n; ++f)
            fh(t, f) = std::polar(1.0 / std::sqrt(double(n)),
                                  2.0 * pi * t * f / n);
    const Eigen::MatrixXcd pipeline = a.inverse() * fh;

    Rng rng(5150);
    dvec u(std::size_t(n), 0.0);
    for (auto& v : u) v = 0.05 + rng.uniform();

    const dvec got = demod.symbol_noise_variance(u);
    for (int k = 0; k < cfg.subcarriers; ++k) {
        for (int m = 0; m < cfg.subsymbols; ++m) {
            double want = 0.0;
            for (int f = 0; f < n; ++f)
                want += std::norm(pipeline(k * cfg.subsymbols + m, f)) * u[f];
            REQUIRE(got[k] == Catch::Approx(want).epsilon(1e-9));
        }
    }
}

TEST_CASE("uniform-noise shortcut agrees and dirichlet has no enhancement") {
    const auto dir_cfg = GfdmConfig::make(16, 16, 5, 0, FilterKind::Dirichlet);
    GfdmModem dir_modem(dir_cfg);
    ZfDemodulator dir(dir_cfg, dir_modem.filter());
    REQUIRE(dir.noise_enhancement() == Catch::Approx(1.0).epsilon(1e-12));

    const auto rc_cfg = GfdmConfig::make(16, 16, 5, 0, FilterKind::RaisedCosine, 0.9);
    GfdmModem rc_modem(rc_cfg);
    ZfDemodulator rc(rc_cfg, rc_modem.filter());
    REQUIRE(rc.noise_enhancement() > 1.0);
    const dvec v = rc.symbol_noise_variance(dvec(std::size_t(rc_cfg.block_len()), 0.7));
    for (double vk : v)
        REQUIRE(vk == Catch::Approx(rc.symbol_noise_variance_uniform(0.7))
                          .epsilon(1e-9));
}

TEST_CASE("even M with rc-0.9 and even K is flagged as singular") {
    const auto cfg = GfdmConfig::make(4, 4, 4, 0, FilterKind::RaisedCosine, 0.9);
    GfdmModem modem(cfg);
    REQUIRE_THROWS_AS(ZfDemodulator(cfg, modem.filter()), SingularModulation);
}

TEST_CASE("average transmit energy equals the grid energy") {
    Rng rng(808);
    for (int f = 0; f < 2; ++f) {
        const auto cfg =
            f == 0 ? GfdmConfig::make(16, 16, 3, 0, FilterKind::Dirichlet)
                   : GfdmConfig::make(16, 16, 3, 0, FilterKind::RaisedCosine, 0.9);
        GfdmModem modem(cfg);
        double tx = 0, grid_e = 0;
        for (int rep = 0; rep < 1000; ++rep) {
            const auto grid = random_grid(cfg, rng);
            const auto x = modem.modulate_fast(grid);
            for (const auto& v : x.samples) tx += std::norm(v);
            for (const auto& v : grid.symbols) grid_e += std::norm(v);
        }
        REQUIRE(tx == Catch::Approx(grid_e).epsilon(0.01));
    }
}

TEST_CASE("allocation covers K_on * M distinct bins") {
    const auto cfg = GfdmConfig::table3();
    const auto bins = active_allocation(cfg);
    REQUIRE(int(bins.size()) == 75 * 15);
    auto sorted = bins;
    std::sort(sorted.begin(), sorted.end());
    REQUIRE(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
    for (int b : sorted) {
        REQUIRE(b >= 0);
        REQUIRE(b < cfg.block_len());
    }
}
