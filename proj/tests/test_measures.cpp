#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "skewlab/measures.hpp"

using namespace skewlab;

static Polynomial Z2() { return Polynomial({cplx(0.0), cplx(0.0), cplx(1.0)}); }
static Polynomial Z2m1() { return Polynomial({cplx(-1.0), cplx(0.0), cplx(1.0)}); }
static Polynomial Cheb() { return Polynomial({cplx(-2.0), cplx(0.0), cplx(1.0)}); }

TEST_CASE("mu_p of z^2 is the unit circle measure") {
    SamplerConfig cfg{2000, 32, 42, 64};
    auto zs = sample_mu_p(Z2(), cfg);
    REQUIRE(int(zs.size()) == cfg.n_samples);
    for (cplx z : zs) CHECK(std::abs(std::abs(z) - 1.0) < 1e-6);
    // Birkhoff mean of log|p'| = log 2
    double m = 0.0;
    for (cplx z : zs) m += std::log(2.0 * std::abs(z));
    m /= zs.size();
    CHECK(m == doctest::Approx(std::log(2.0)).epsilon(0.01));
}

TEST_CASE("mu_p of z^2-2 is arcsine on [-2,2]") {
    SamplerConfig cfg{10000, 32, 7, 64};
    auto zs = sample_mu_p(Cheb(), cfg);
    std::vector<double> xs;
    for (cplx z : zs) {
        CHECK(std::abs(z.imag()) < 1e-6);
        CHECK(z.real() > -2.0 - 1e-6);
        CHECK(z.real() < 2.0 + 1e-6);
        xs.push_back(z.real());
    }
    std::sort(xs.begin(), xs.end());
    // KS distance to the arcsine CDF
    double ks = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double F = 0.5 + std::asin(std::clamp(xs[i] / 2.0, -1.0, 1.0)) / 3.14159265358979;
        double Fe = double(i + 1) / xs.size();
        ks = std::max(ks, std::abs(F - Fe));
    }
    CHECK(ks <= 0.05);
}

TEST_CASE("seeded determinism and forward invariance") {
    SamplerConfig cfg{1500, 32, 99, 64};
    auto a = sample_mu_p(Z2m1(), cfg);
    auto b = sample_mu_p(Z2m1(), cfg);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);

    // push forward by p and compare empirical CDF of Re: invariance of mu_p
    Polynomial p = Z2m1();
    std::vector<double> x0, x1;
    for (cplx z : a) {
        x0.push_back(z.real());
        x1.push_back(p(z).real());
    }
    std::sort(x0.begin(), x0.end());
    std::sort(x1.begin(), x1.end());
    double ks = 0.0;
    for (std::size_t i = 0; i < x0.size(); ++i) {
        // two-sample KS on sorted grids (evaluate CDF_1 at x0 quantiles)
        double v = x0[i];
        auto it = std::lower_bound(x1.begin(), x1.end(), v);
        double F1 = double(it - x1.begin()) / x1.size();
        double F0 = double(i + 1) / x0.size();
        ks = std::max(ks, std::abs(F1 - F0));
    }
    // sampling noise for n=1500 is ~1/sqrt(n)=0.026; allow 2x
    CHECK(ks < 0.052);
}

TEST_CASE("fiber julia sampler") {
    // f = (p, w^2): J_z is the unit circle in every fiber
    SkewProduct f = make_unicritical(Z2m1(), 2, Polynomial({cplx(0.0)}));
    SamplerConfig cfg{200, 32, 5, 0};
    auto ws = sample_fiber_julia(f, cplx(0.3, 0.2), cfg);
    REQUIRE(int(ws.size()) == 200);
    for (cplx w : ws) CHECK(std::abs(std::abs(w) - 1.0) < 1e-6);

    // f = (z^2, w^2+z) at z = 0: all samples bounded (G = 0 within tol)
    SkewProduct g = make_unicritical(Z2(), 2, Polynomial({cplx(0.0), cplx(1.0)}));
    GreenConfig gc{10.0, 200};
    auto ws2 = sample_fiber_julia(g, cplx(0.0), cfg);
    for (cplx w : ws2) {
        GreenValue gv = green_vertical(g, cplx(0.0), w, gc);
        CHECK(gv.value <= 1e-6);
    }

    auto wa = sample_fiber_julia(g, cplx(0.0), cfg);
    for (std::size_t i = 0; i < wa.size(); ++i) CHECK(wa[i] == ws2[i]);
}

TEST_CASE("lyapunov_p closed forms") {
    GreenConfig gc{10.0, 256};
    CHECK(lyapunov_p(Z2(), gc).value == doctest::Approx(std::log(2.0)).epsilon(1e-10));
    CHECK(lyapunov_p(Cheb(), gc).value == doctest::Approx(std::log(2.0)).epsilon(1e-10));

    // p = z^2+2: L_p = log 2 + G_p(0) > log 2, matches Birkhoff average of log|p'|
    Polynomial p({cplx(2.0), cplx(0.0), cplx(1.0)});
    double Lp = lyapunov_p(p, gc).value;
    CHECK(Lp > std::log(2.0));
    SamplerConfig cfg{4000, 32, 11, 64};
    auto zs = sample_mu_p(p, cfg);
    double birk = 0.0;
    for (cplx z : zs) birk += std::log(2.0 * std::abs(z));
    birk /= zs.size();
    CHECK(Lp == doctest::Approx(birk).epsilon(0.02));
}

TEST_CASE("lyapunov_vertical: trivial fiber and escaping critical orbit") {
    GreenConfig gc{10.0, 256};
    SamplerConfig cfg{1024, 32, 3, 64};
    SkewProduct f = make_unicritical(Z2m1(), 2, Polynomial({cplx(0.0)}));
    LyapunovValue L = lyapunov_vertical(f, cfg, gc);
    CHECK(L.value == doctest::Approx(std::log(2.0)).epsilon(1e-3));

    // (z^2, w^2+4): fiber critical orbit escapes in every fiber
    SkewProduct g = make_unicritical(Z2(), 2, Polynomial({cplx(4.0)}));
    LyapunovValue L1 = lyapunov_vertical(g, cfg, gc);
    CHECK(L1.value > std::log(2.0) + 0.1);
    SamplerConfig cfg2 = cfg;
    cfg2.depth = 64;
    GreenConfig gc2{10.0, 512};
    LyapunovValue L2 = lyapunov_vertical(g, cfg2, gc2);
    CHECK(std::abs(L1.value - L2.value) < 0.02);
}

TEST_CASE("L_v >= log d on random unicritical maps") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> U(-1.5, 1.5);
    GreenConfig gc{10.0, 128};
    SamplerConfig cfg{256, 24, 17, 32};
    for (int trial = 0; trial < 100; ++trial) {
        int d = 2 + trial % 2;
        Polynomial a({cplx(U(rng), U(rng)), cplx(U(rng), U(rng))});
        Polynomial p = (trial % 3 == 0) ? Z2() : Z2m1();
        SkewProduct f = make_unicritical(p, d, a);
        LyapunovValue L = lyapunov_vertical(f, cfg, gc);
        CHECK(L.value >= std::log(double(d)) - 1e-9);
    }
}
