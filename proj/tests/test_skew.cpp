#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "skewlab/skew.hpp"

using namespace skewlab;

static std::mt19937_64 rng(777);
static cplx rnd(double s = 1.0) {
    std::uniform_real_distribution<double> U(-s, s);
    return cplx(U(rng), U(rng));
}

static Polynomial Z2m1() { return Polynomial({cplx(-1.0), cplx(0.0), cplx(1.0)}); }
static Polynomial Z2() { return Polynomial({cplx(0.0), cplx(0.0), cplx(1.0)}); }

TEST_CASE("iterate basics") {
    SkewProduct f = make_unicritical(Z2(), 2, Polynomial({cplx(0.0)})); // (z^2, w^2)
    auto [z3, w3] = iterate(f, cplx(1.0), cplx(2.0), 3);
    CHECK(std::abs(z3 - cplx(1.0)) < 1e-12);
    CHECK(std::abs(w3 - cplx(256.0)) < 1e-9);

    SkewProduct g = make_unicritical(Z2m1(), 2, Polynomial({cplx(0.0)}));
    auto [z2, w2] = iterate(g, cplx(0.0), cplx(1.0), 2);
    CHECK(std::abs(z2) < 1e-12); // 0 -> -1 -> 0
    CHECK(std::abs(w2 - cplx(1.0)) < 1e-12);

    auto [z0, w0] = iterate(g, cplx(0.3), cplx(0.4), 0);
    CHECK(z0 == cplx(0.3));
    CHECK(w0 == cplx(0.4));
}

TEST_CASE("semigroup law on bounded orbits") {
    SkewProduct f = make_unicritical(Z2m1(), 2, Polynomial({cplx(0.1), cplx(0.05)}));
    for (int trial = 0; trial < 10; ++trial) {
        cplx z = rnd(0.4), w = rnd(0.4);
        auto [za, wa] = iterate(f, z, w, 7);
        auto [zm, wm] = iterate(f, z, w, 3);
        auto [zb, wb] = iterate(f, zm, wm, 4);
        CHECK(std::abs(za - zb) <= 1e-9 * (1.0 + std::abs(za)));
        CHECK(std::abs(wa - wb) <= 1e-9 * (1.0 + std::abs(wa)));
    }
}

TEST_CASE("degenerate cubic family semi-conjugacy: f o phi = phi o g") {
    // f_{a,b}(z,w) = (z^3, w^3 + a w z^2 + b z^3), phi(z,w) = (z, z w),
    // g(z,w) = (z^3, w^3 + a w + b)
    for (int trial = 0; trial < 12; ++trial) {
        cplx a = rnd(0.8), b = rnd(0.8);
        SkewProduct f;
        f.d = 3;
        f.base = {cplx(0.0), cplx(0.0), cplx(0.0), cplx(1.0)};
        f.fiber.assign(4, {cplx(0.0)});
        f.fiber[3] = {cplx(1.0)};
        f.fiber[1] = {cplx(0.0), cplx(0.0), a}; // a*w*z^2
        f.fiber[0] = {cplx(0.0), cplx(0.0), cplx(0.0), b}; // b*z^3
        SkewProduct g = make_unicritical(Polynomial({cplx(0.0), cplx(0.0), cplx(0.0), cplx(1.0)}),
                                         3, Polynomial({b}));
        g.fiber[1] = {a};

        cplx z = rnd(0.7), w = rnd(0.7);
        if (std::abs(z) < 0.05) z += cplx(0.3);
        for (int n = 1; n <= 5; ++n) {
            auto [zg, wg] = iterate(g, z, w, n);
            auto [zf, wf] = iterate(f, z, z * w, n);
            CHECK(std::abs(zf - zg) < 1e-8 * (1.0 + std::abs(zg)));
            CHECK(std::abs(wf - zg * wg) < 1e-7 * (1.0 + std::abs(zg * wg)));
        }
    }
}

TEST_CASE("orbit jacobian: explicit case and finite differences") {
    SkewProduct f = make_unicritical(Z2(), 2, Polynomial({cplx(0.0)}));
    OrbitJacobian J = orbit_jacobian(f, cplx(1.0), cplx(1.0), 1);
    CHECK(std::abs(J.dp - cplx(2.0)) < 1e-14);
    CHECK(std::abs(J.dQdw - cplx(2.0)) < 1e-14);
    CHECK(std::abs(J.dQdz) < 1e-14);

    // random skew product, n = 4, all entries vs central differences
    SkewProduct g = make_unicritical(Z2m1(), 2, Polynomial({cplx(0.11), cplx(0.07), cplx(-0.05)}));
    for (int trial = 0; trial < 8; ++trial) {
        cplx z = rnd(0.4), w = rnd(0.4);
        int n = 4;
        OrbitJacobian J4;
        try {
            J4 = orbit_jacobian(g, z, w, n);
        } catch (const EscapedToInfinity&) {
            continue;
        }
        double h = 1e-6;
        auto Q = [&](cplx zz, cplx ww) { return iterate(g, zz, ww, n); };
        cplx dp_fd = (Q(z + h, w).first - Q(z - h, w).first) / (2 * h);
        cplx dQdz_fd = (Q(z + h, w).second - Q(z - h, w).second) / (2 * h);
        cplx dQdw_fd = (Q(z, w + h).second - Q(z, w - h).second) / (2 * h);
        CHECK(std::abs(J4.dp - dp_fd) <= 1e-5 * (1.0 + std::abs(J4.dp)));
        CHECK(std::abs(J4.dQdz - dQdz_fd) <= 1e-5 * (1.0 + std::abs(J4.dQdz)));
        CHECK(std::abs(J4.dQdw - dQdw_fd) <= 1e-5 * (1.0 + std::abs(J4.dQdw)));
    }
}

TEST_CASE("orbit jacobian multiplicativity") {
    SkewProduct g = make_unicritical(Z2m1(), 2, Polynomial({cplx(0.1), cplx(-0.08)}));
    cplx z(0.2, 0.1), w(0.3, -0.2);
    OrbitJacobian J7 = orbit_jacobian(g, z, w, 7);
    OrbitJacobian J3 = orbit_jacobian(g, z, w, 3);
    auto [zm, wm] = iterate(g, z, w, 3);
    OrbitJacobian J4 = orbit_jacobian(g, zm, wm, 4);
    // [a4 0; c4 b4][a3 0; c3 b3]
    cplx dp = J4.dp * J3.dp;
    cplx dQdz = J4.dQdz * J3.dp + J4.dQdw * J3.dQdz;
    cplx dQdw = J4.dQdw * J3.dQdw;
    CHECK(std::abs(J7.dp - dp) <= 1e-8 * (1.0 + std::abs(dp)));
    CHECK(std::abs(J7.dQdz - dQdz) <= 1e-8 * (1.0 + std::abs(dQdz)));
    CHECK(std::abs(J7.dQdw - dQdw) <= 1e-8 * (1.0 + std::abs(dQdw)));
}

TEST_CASE("unicritical dQdz matches the explicit derivative sum") {
    // For q = w^2 + a(z): dQ^m/dz = sum_i a'(p^i(z)) prod_{l>i} 2 Q^l(w)
    Polynomial a({cplx(0.3), cplx(1.0)}); // a(z) = z + 0.3
    SkewProduct f = make_unicritical(Z2m1(), 2, a);
    cplx z(0.35, 0.1), w(0.2, 0.05);
    int m = 5;
    OrbitJacobian J = orbit_jacobian(f, z, w, m);
    Polynomial ap = a.derivative();
    Polynomial pp = Z2m1().derivative();
    cplx expect = 0.0;
    for (int i = 0; i < m; ++i) {
        cplx zi = iterate(f, z, w, i).first;
        // a'(p^i(z)) * (p^i)'(z): the chain factor through the base orbit
        cplx chain = 1.0;
        for (int s = 0; s < i; ++s) chain *= pp(iterate(f, z, w, s).first);
        cplx term = ap(zi) * chain;
        for (int l = i + 1; l < m; ++l) {
            auto [zl, wl] = iterate(f, z, w, l);
            term *= 2.0 * wl;
        }
        expect += term;
    }
    CHECK(std::abs(J.dQdz - expect) <= 1e-9 * (1.0 + std::abs(expect)));
}

TEST_CASE("green functions: closed forms") {
    GreenConfig cfg;
    cfg.escape_radius = 10.0;
    cfg.max_iter = 256;

    // q = w^2 over any base: G = log+|w|
    SkewProduct f = make_unicritical(Z2m1(), 2, Polynomial({cplx(0.0)}));
    GreenValue g = green_vertical(f, cplx(0.3), cplx(2.0), cfg);
    CHECK(g.value == doctest::Approx(std::log(2.0)).epsilon(1e-8));
    CHECK(!g.undecided);

    GreenValue g0 = green_vertical(make_unicritical(Z2(), 2, Polynomial({cplx(0.0)})),
                                   cplx(0.5), cplx(0.5), cfg);
    CHECK(g0.value == 0.0);
    CHECK(!g0.undecided);

    CHECK(green_base(Z2(), cplx(2.0), cfg).value == doctest::Approx(std::log(2.0)).epsilon(1e-8));
    Polynomial cheb({cplx(-2.0), cplx(0.0), cplx(1.0)});
    CHECK(green_base(cheb, cplx(0.0), cfg).value == 0.0);
}

TEST_CASE("green base: stable across depths for escaping critical point") {
    Polynomial p({cplx(2.0), cplx(0.0), cplx(1.0)}); // z^2 + 2
    GreenConfig c64{10.0, 64}, c128{10.0, 128};
    double v1 = green_base(p, cplx(0.0), c64).value;
    double v2 = green_base(p, cplx(0.0), c128).value;
    CHECK(v1 > 0.0);
    CHECK(std::abs(v1 - v2) < 1e-8);
}

TEST_CASE("green functional equation G(f(z,w)) = d G(z,w)") {
    SkewProduct f = make_unicritical(Z2m1(), 2, Polynomial({cplx(0.2), cplx(0.1)}));
    GreenConfig cfg{12.0, 512};
    int checked = 0;
    for (int trial = 0; trial < 40 && checked < 10; ++trial) {
        cplx z = rnd(1.5), w = rnd(1.0) * 3.0;
        GreenValue g = green_vertical(f, z, w, cfg);
        if (g.escape_n < 0) continue;
        auto [z1, w1] = iterate(f, z, w, 1);
        GreenValue gf = green_vertical(f, z1, w1, cfg);
        CHECK(std::abs(gf.value - 2.0 * g.value) <= 1e-6 * std::max(1.0, gf.value));
        ++checked;
    }
    CHECK(checked >= 10);
}

TEST_CASE("normal form conjugation") {
    // q = 2 w^2 + 3 z w + z: regular, not normal form
    SkewProduct f;
    f.d = 2;
    f.base = Z2m1().c;
    f.fiber = {{cplx(0.0), cplx(1.0)}, {cplx(0.0), cplx(3.0)}, {cplx(2.0)}};
    CHECK(!is_normal_form(f));
    SkewProduct g = to_normal_form(f);
    CHECK(is_normal_form(g));
}

TEST_CASE("escape radius: certified growth and lambda scaling") {
    // unicritical d=2 over z^2: J_p = unit circle
    std::vector<cplx> jp;
    for (int k = 0; k < 64; ++k) jp.push_back(std::polar(1.0, 2 * 3.14159265358979 * k / 64));
    ParameterSlice s = unicritical_slice(Z2(), 2, Polynomial({cplx(0.0)}),
                                         {Polynomial({cplx(1.0)}), Polynomial({cplx(0.0), cplx(1.0)})});
    // lambda = 0: radius >= 2 and any |w| > 2 escapes under w^2
    EscapeRadius e0 = escape_radius_unicritical(s, {cplx(0.0), cplx(0.0)}, jp);
    CHECK(e0.radius >= 2.0);

    std::uniform_real_distribution<double> U(0.0, 2 * 3.14159265358979);
    for (double mag : {1e2, 1e4, 1e6}) {
        std::vector<cplx> lam = {cplx(mag) * std::polar(1.0, 0.37), cplx(0.4 * mag)};
        EscapeRadius er = escape_radius_unicritical(s, lam, jp);
        SkewProduct f = s.at(lam);
        for (int k = 0; k < 1000; ++k) {
            cplx z = jp[k % jp.size()];
            cplx w = std::polar(er.radius * 1.01, U(rng));
            CHECK(std::abs(f.fiber_eval(z, w)) > std::abs(w));
        }
    }

    // log-log slope of the radius in |lambda| is 1/d = 0.5 +- 0.05
    double r2 = escape_radius_unicritical(s, {cplx(1e2), cplx(0.0)}, jp).radius;
    double r6 = escape_radius_unicritical(s, {cplx(1e6), cplx(0.0)}, jp).radius;
    double slope = (std::log(r6) - std::log(r2)) / (std::log(1e6) - std::log(1e2));
    CHECK(slope == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("jet orbit jacobian agrees with plain orbit jacobian") {
    Polynomial a({cplx(0.2), cplx(0.1)});
    ParameterSlice s = unicritical_slice(Z2m1(), 2, a, {Polynomial({cplx(1.0)})});
    std::vector<cplx> lam = {cplx(0.05, 0.02)};
    SkewT<Jet1> fj = s.at_jet(lam);
    SkewProduct f = s.at(lam);
    cplx z(0.2, 0.1), w(0.25, -0.1);
    auto Jj = orbit_jacobian_jet(fj, Jet1::constant(z, 1), Jet1::constant(w, 1), 4);
    OrbitJacobian J = orbit_jacobian(f, z, w, 4);
    CHECK(std::abs(Jj.dp.v - J.dp) < 1e-12 * (1 + std::abs(J.dp)));
    CHECK(std::abs(Jj.dQdw.v - J.dQdw) < 1e-12 * (1 + std::abs(J.dQdw)));
    CHECK(std::abs(Jj.dQdz.v - J.dQdz) < 1e-12 * (1 + std::abs(J.dQdz)));

    // d(dQdw)/dlambda vs finite differences in lambda
    double h = 1e-6;
    OrbitJacobian Jp = orbit_jacobian(s.at({lam[0] + h}), z, w, 4);
    OrbitJacobian Jm = orbit_jacobian(s.at({lam[0] - h}), z, w, 4);
    cplx fd = (Jp.dQdw - Jm.dQdw) / (2 * h);
    CHECK(std::abs(Jj.dQdw.d[0] - fd) <= 1e-5 * (1.0 + std::abs(fd)));
}
