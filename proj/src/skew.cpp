#include "skewlab/skew.hpp"

#include <cmath>

namespace skewlab {

bool is_normal_form(const SkewProduct& f, double tol) {
    int d = f.d;
    if (int(f.fiber.size()) != d + 1) return false;
    const auto& top = f.fiber[d];
    if (top.empty() || std::abs(top[0] - cplx(1.0)) > tol) return false;
    for (std::size_t k = 1; k < top.size(); ++k)
        if (std::abs(top[k]) > tol) return false;
    if (d >= 1)
        for (cplx c : f.fiber[d - 1])
            if (std::abs(c) > tol) return false;
    for (int j = 0; j <= d - 2; ++j)
        if (int(f.fiber[j].size()) > d - j + 1) {
            for (std::size_t k = d - j + 1; k < f.fiber[j].size(); ++k)
                if (std::abs(f.fiber[j][k]) > tol) return false;
        }
    return true;
}

SkewProduct to_normal_form(const SkewProduct& f) {
    int d = f.d;
    if (int(f.fiber.size()) != d + 1 || f.fiber[d].empty())
        throw std::invalid_argument("to_normal_form: fiber degree mismatch");
    for (std::size_t k = 1; k < f.fiber[d].size(); ++k)
        if (std::abs(f.fiber[d][k]) > 1e-14)
            throw std::invalid_argument("to_normal_form: w^d coefficient must be constant");
    cplx u = f.fiber[d][0];
    if (u == cplx(0.0)) throw std::invalid_argument("to_normal_form: not regular");

    // Scale w -> s*w with u*s^{d-1} = 1: new q~(z,w) = q(z, s w)/s.
    cplx s = std::pow(u, -1.0 / double(d - 1));
    SkewProduct g = f;
    cplx spow = 1.0 / s; // s^j / s at j=0
    for (int j = 0; j <= d; ++j) {
        for (auto& c : g.fiber[j]) c *= spow;
        spow *= s;
    }
    // Translate w -> w + tau(z) with tau = A_{d-1}/d to kill the w^{d-1} term:
    // conj by phi(z,w) = (z, w - tau(z)): q~(z,w) = q(z, w + tau(z)) - tau(p(z)).
    Polynomial tau(g.fiber[d - 1]);
    tau = tau * cplx(-1.0 / double(d));
    if (!tau.is_zero()) {
        // expand q(z, w + tau(z)) via binomial on each power of w
        std::vector<Polynomial> nf(d + 1);
        for (int j = 0; j <= d; ++j) nf[j] = Polynomial({cplx(0.0)});
        // powers of (-tau)... we substitute w -> w - tau? phi(z,w)=(z, w+tau):
        // f_new = phi^{-1} o f o phi: q_new(z,w) = q(z, w + tau(z)) - tau(p(z)).
        std::vector<Polynomial> taupow(d + 1);
        taupow[0] = Polynomial({cplx(1.0)});
        for (int k = 1; k <= d; ++k) taupow[k] = taupow[k - 1] * tau;
        std::vector<std::vector<double>> binom(d + 1, std::vector<double>(d + 1, 0.0));
        for (int nn = 0; nn <= d; ++nn) {
            binom[nn][0] = 1.0;
            for (int kk = 1; kk <= nn; ++kk)
                binom[nn][kk] = binom[nn - 1][kk - 1] + (kk <= nn - 1 ? binom[nn - 1][kk] : 0.0);
        }
        for (int j = 0; j <= d; ++j) {
            Polynomial Aj(g.fiber[j]);
            if (Aj.is_zero()) continue;
            for (int k = 0; k <= j; ++k) {
                // (w + tau)^j contributes C(j,k) tau^{j-k} w^k
                nf[k] = nf[k] + Aj * taupow[j - k] * cplx(binom[j][k]);
            }
        }
        Polynomial p(g.base);
        nf[0] = nf[0] - compose(tau, p);
        for (int j = 0; j <= d; ++j) {
            nf[j].normalize(1e-14);
            g.fiber[j] = nf[j].c;
        }
    }
    g.fiber[d] = {cplx(1.0)};
    g.fiber[d - 1] = {cplx(0.0)};
    return g;
}

SkewProduct make_unicritical(const Polynomial& p, int d, const Polynomial& a) {
    SkewProduct f;
    f.d = d;
    f.base = p.c;
    f.fiber.assign(d + 1, {cplx(0.0)});
    f.fiber[0] = a.c;
    f.fiber[d] = {cplx(1.0)};
    return f;
}

SkewProduct ParameterSlice::at(const std::vector<cplx>& lambda) const {
    SkewProduct f = base_point;
    for (std::size_t i = 0; i < dirs.size(); ++i) {
        const SkewProduct& D = dirs[i];
        for (std::size_t k = 0; k < D.base.size(); ++k) {
            if (k >= f.base.size()) f.base.resize(k + 1, cplx(0.0));
            f.base[k] += lambda[i] * D.base[k];
        }
        for (std::size_t j = 0; j < D.fiber.size(); ++j)
            for (std::size_t k = 0; k < D.fiber[j].size(); ++k) {
                if (k >= f.fiber[j].size()) f.fiber[j].resize(k + 1, cplx(0.0));
                f.fiber[j][k] += lambda[i] * D.fiber[j][k];
            }
    }
    return f;
}

SkewT<Jet1> ParameterSlice::at_jet(const std::vector<cplx>& lambda) const {
    SkewProduct val = at(lambda);
    std::size_t nv = dirs.size();
    SkewT<Jet1> f;
    f.d = val.d;
    f.base.resize(val.base.size());
    for (std::size_t k = 0; k < val.base.size(); ++k) {
        f.base[k] = Jet1::constant(val.base[k], nv);
        for (std::size_t i = 0; i < nv; ++i)
            if (k < dirs[i].base.size()) f.base[k].d[i] = dirs[i].base[k];
    }
    f.fiber.resize(val.fiber.size());
    for (std::size_t j = 0; j < val.fiber.size(); ++j) {
        f.fiber[j].resize(val.fiber[j].size());
        for (std::size_t k = 0; k < val.fiber[j].size(); ++k) {
            f.fiber[j][k] = Jet1::constant(val.fiber[j][k], nv);
            for (std::size_t i = 0; i < nv; ++i)
                if (j < dirs[i].fiber.size() && k < dirs[i].fiber[j].size())
                    f.fiber[j][k].d[i] = dirs[i].fiber[j][k];
        }
    }
    return f;
}

ParameterSlice unicritical_slice(const Polynomial& p, int d, const Polynomial& a0,
                                 const std::vector<Polynomial>& a_dirs) {
    ParameterSlice s;
    s.base_point = make_unicritical(p, d, a0);
    for (const auto& ad : a_dirs) {
        SkewProduct dir;
        dir.d = d;
        dir.base.assign(p.c.size(), cplx(0.0));
        dir.fiber.assign(d + 1, {});
        dir.fiber[0] = ad.c;
        s.dirs.push_back(dir);
    }
    return s;
}

OrbitJacobian orbit_jacobian(const SkewProduct& f, cplx z, cplx w, int n) {
    OrbitJacobian J;
    for (int k = 0; k < n; ++k) {
        cplx a = f.base_deriv(z);
        cplx c = f.fiber_dz(z, w);
        cplx b = f.fiber_dw(z, w);
        // [a 0; c b] * [dp 0; dQdz dQdw]
        J.dQdz = c * J.dp + b * J.dQdz;
        J.dQdw = b * J.dQdw;
        J.dp = a * J.dp;
        cplx zn = f.base_eval(z);
        w = f.fiber_eval(z, w);
        z = zn;
        if (std::abs(z) > 1e150 || std::abs(w) > 1e150)
            throw EscapedToInfinity("orbit_jacobian: orbit escaped");
    }
    return J;
}

OrbitJacobianT<Jet1, Jet1> orbit_jacobian_jet(const SkewT<Jet1>& f, Jet1 z, Jet1 w, int n) {
    std::size_t nv = z.nvars();
    OrbitJacobianT<Jet1, Jet1> J{Jet1::constant(1.0, nv), Jet1::constant(1.0, nv),
                                 Jet1::constant(0.0, nv)};
    for (int k = 0; k < n; ++k) {
        Jet1 a = f.base_deriv(z);
        Jet1 c = f.fiber_dz(z, w);
        Jet1 b = f.fiber_dw(z, w);
        J.dQdz = c * J.dp + b * J.dQdz;
        J.dQdw = b * J.dQdw;
        J.dp = a * J.dp;
        Jet1 zn = f.base_eval(z);
        w = f.fiber_eval(z, w);
        z = zn;
        if (abs_of(z) > 1e150 || abs_of(w) > 1e150)
            throw EscapedToInfinity("orbit_jacobian_jet: orbit escaped");
    }
    return J;
}

namespace {

// Shared escape-rate loop; step advances the tracked modulus by one iterate
// and returns the new modulus (or the full value for |.| <= huge).
template <class Step>
GreenValue green_impl(double deg, double start_abs, const GreenConfig& cfg, Step step) {
    double R = std::max(cfg.escape_radius, 10.0);
    double a = start_abs;
    int n = 0;
    int escape_n = -1;
    double band_max = 0.0; // max modulus over the second half of the budget
    while (n < cfg.max_iter) {
        // overflow counts as escape; by then the d^{-n} weight makes the
        // exact modulus irrelevant (clamped below)
        if ((!std::isfinite(a) || a >= R) && escape_n < 0) escape_n = n;
        if (escape_n >= 0) break;
        if (n >= cfg.max_iter / 2) band_max = std::max(band_max, a);
        a = step();
        ++n;
    }
    GreenValue g;
    if (escape_n < 0) {
        // never exceeded R: bounded certificate if it stayed well inside
        g.value = 0.0;
        g.undecided = band_max > 0.9 * R;
        return g;
    }
    // refine: once |.| is huge the remaining corrections to d^{-n} log|.|
    // are below 1e-7 * d^{-n} and are dropped
    for (int extra = 0; extra < 64 && std::isfinite(a) && a < 1e8; ++extra) {
        double next = step();
        ++n;
        if (!std::isfinite(next)) {
            --n;
            break;
        }
        a = next;
    }
    if (!std::isfinite(a)) a = 1e100;
    g.value = std::log(a) / std::pow(deg, n);
    g.escape_n = escape_n;
    return g;
}

} // namespace

GreenValue green_vertical(const SkewProduct& f, cplx z, cplx w, const GreenConfig& cfg) {
    cplx zc = z, wc = w;
    auto step = [&]() {
        cplx zn = f.base_eval(zc);
        wc = f.fiber_eval(zc, wc);
        zc = zn;
        return std::abs(wc);
    };
    return green_impl(double(f.d), std::abs(w), cfg, step);
}

GreenValue green_base(const Polynomial& p, cplx z, const GreenConfig& cfg) {
    cplx zc = z;
    auto step = [&]() {
        zc = p(zc);
        return std::abs(zc);
    };
    return green_impl(double(p.degree()), std::abs(z), cfg, step);
}

EscapeRadius escape_radius_unicritical(const ParameterSlice& slice,
                                       const std::vector<cplx>& lambda,
                                       const std::vector<cplx>& julia_sample) {
    // a(z) = a0(z) + sum lambda_i * adir_i(z); A(lambda) = max_{J_p} |a|.
    // A <= A0 + C0*|lambda| with C0 = max_z sum_i |adir_i(z)| (then inflated
    // 1.5x for the sample-vs-true Julia set gap). The radius
    // max(2.0001, (2A)^{1/d}) makes |q_z(w)| > |w| strict for |w| above it:
    //   |w|^d - A >= |w|^d/2 > |w| once |w| > 2, d >= 2.
    int d = slice.base_point.d;
    double A0 = 0.0, C0 = 0.0, lam_norm = 0.0;
    for (cplx l : lambda) lam_norm += std::norm(l);
    lam_norm = std::sqrt(lam_norm);
    for (cplx z : julia_sample) {
        Polynomial a0(slice.base_point.fiber[0]);
        A0 = std::max(A0, std::abs(a0(z)));
        double s = 0.0;
        for (const auto& dir : slice.dirs) {
            Polynomial ad(dir.fiber[0].empty() ? std::vector<cplx>{cplx(0.0)} : dir.fiber[0]);
            s += std::abs(ad(z));
        }
        C0 = std::max(C0, s);
    }
    A0 *= 1.5;
    C0 *= 1.5;
    EscapeRadius er;
    er.C1 = std::max(2.0001, std::pow(2.0 * (A0 + 1.0), 1.0 / d));
    er.C2 = std::pow(2.0 * (C0 + 1e-12), 1.0 / d);
    er.radius = er.C1 + er.C2 * std::pow(lam_norm, 1.0 / d);
    return er;
}

} // namespace skewlab
