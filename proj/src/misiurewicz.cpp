#include "skewlab/misiurewicz.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace skewlab {

namespace {

constexpr double kRepellingMargin = 1.05;

SkewT<Jet1> widen(SkewT<Jet1> f, std::size_t width) {
    for (auto& b : f.base) b.d.resize(width, cplx(0.0));
    for (auto& row : f.fiber)
        for (auto& c : row) c.d.resize(width, cplx(0.0));
    return f;
}

SkewT<Jet1> to_jet(const SkewProduct& f, std::size_t width) {
    SkewT<Jet1> g;
    g.d = f.d;
    for (cplx b : f.base) g.base.push_back(Jet1::constant(b, width));
    for (const auto& row : f.fiber) {
        g.fiber.emplace_back();
        for (cplx c : row) g.fiber.back().push_back(Jet1::constant(c, width));
    }
    return g;
}

Jet1 truncate(const Jet1& j, std::size_t width) {
    return Jet1(j.v, std::vector<cplx>(j.d.begin(), j.d.begin() + width));
}

// critical points of the fiber map over z0, sorted by (Re, Im)
std::vector<cplx> critical_roots(const SkewProduct& f, cplx z0) {
    auto c = f.fiber_coeffs_at(z0);
    std::vector<cplx> dc(c.size() - 1);
    for (std::size_t j = 1; j < c.size(); ++j) dc[j - 1] = double(j) * c[j];
    auto rs = roots(Polynomial(std::move(dc)), 1e-12);
    std::sort(rs.begin(), rs.end(), [](cplx a, cplx b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return rs;
}

// Newton on Q^m_{z1}(w) - w in the fiber variable
cplx refine_fiber_periodic(const SkewProduct& f, cplx z1, cplx w, int m) {
    for (int it = 0; it < 60; ++it) {
        cplx z = z1, W = w, dW = 1.0;
        for (int j = 0; j < m; ++j) {
            dW *= f.fiber_dw(z, W);
            W = f.fiber_eval(z, W);
            z = f.base_eval(z);
        }
        cplx r = W - w;
        if (std::abs(r) <= 1e-14 * (1.0 + std::abs(w))) break;
        w -= r / (dW - 1.0);
    }
    return w;
}

double lsq_slope(const std::vector<double>& xs, const std::vector<double>& ys,
                 double* intercept = nullptr) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= double(xs.size());
    my /= double(xs.size());
    double num = 0, den = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        num += (xs[i] - mx) * (ys[i] - my);
        den += (xs[i] - mx) * (xs[i] - mx);
    }
    double s = num / den;
    if (intercept) *intercept = my - s * mx;
    return s;
}

// w1 and B of the fiber m-cycle over z1 as jets along the slice, plus the
// total derivative dB/dlambda (the implicit w1-motion folded in)
struct CycleJets {
    Jet1 w1; // width dim
    Jet1 B;  // width dim, total derivative
    cplx A{1.0};
};

CycleJets cycle_jets(const ParameterSlice& slice, const std::vector<cplx>& lam, cplx z1,
                     cplx w1v, int m) {
    std::size_t nd = slice.dirs.size();
    SkewT<Jet1> fj = widen(slice.at_jet(lam), nd + 1);
    Jet1 z = Jet1::constant(z1, nd + 1);
    Jet1 w = Jet1::variable(w1v, nd + 1, nd);
    Jet1 W = w, zc = z;
    for (int j = 0; j < m; ++j) {
        W = fj.fiber_eval(zc, W);
        zc = fj.base_eval(zc);
    }
    cplx B = W.d[nd];
    CycleJets out;
    out.w1 = Jet1::constant(w1v, nd);
    for (std::size_t i = 0; i < nd; ++i) out.w1.d[i] = W.d[i] / (1.0 - B);
    auto J = orbit_jacobian_jet(fj, z, w, m);
    out.A = J.dp.v;
    out.B = Jet1::constant(B, nd);
    for (std::size_t i = 0; i < nd; ++i)
        out.B.d[i] = J.dQdw.d[i] + J.dQdw.d[nd] * out.w1.d[i];
    return out;
}

// residual F = Q^{n0}_{z0}(c(lambda)) - w1(lambda) with slice jets; refines
// the followed critical root and cycle point in place (nearest-continuation)
Jet1 relation_F_generic(const ParameterSlice& slice, cplx z0, int n0, cplx z1, int m,
                        const std::vector<cplx>& lam, cplx& c_io, cplx& w1_io) {
    std::size_t nd = slice.dirs.size();
    SkewProduct fv = slice.at(lam);
    {
        auto cr = critical_roots(fv, z0);
        cplx best = cr[0];
        for (cplx r : cr)
            if (std::abs(r - c_io) < std::abs(best - c_io)) best = r;
        c_io = best;
    }
    w1_io = refine_fiber_periodic(fv, z1, w1_io, m);

    SkewT<Jet1> fj = widen(slice.at_jet(lam), nd + 1);
    Jet1 z0j = Jet1::constant(z0, nd + 1);
    // implicit derivative of the critical root: q_w(z0, c) = 0
    Jet1 qw = fj.fiber_dw(z0j, Jet1::variable(c_io, nd + 1, nd));
    Jet1 cj = Jet1::constant(c_io, nd + 1);
    for (std::size_t i = 0; i < nd; ++i) cj.d[i] = -qw.d[i] / qw.d[nd];

    Jet1 z = z0j, W = cj;
    for (int j = 0; j < n0; ++j) {
        W = fj.fiber_eval(z, W);
        z = fj.base_eval(z);
    }
    Jet1 zc = Jet1::constant(z1, nd + 1);
    Jet1 Wc = Jet1::variable(w1_io, nd + 1, nd);
    for (int j = 0; j < m; ++j) {
        Wc = fj.fiber_eval(zc, Wc);
        zc = fj.base_eval(zc);
    }
    cplx B = Wc.d[nd];
    Jet1 w1j = Jet1::constant(w1_io, nd + 1);
    for (std::size_t i = 0; i < nd; ++i) w1j.d[i] = Wc.d[i] / (1.0 - B);
    return truncate(W - w1j, nd);
}

} // namespace

std::vector<PeriodicOrbit> periodic_points_fiber(const SkewProduct& f, cplx z1, int m,
                                                 bool exact_only, int cap) {
    double deg = 1.0;
    for (int j = 0; j < m; ++j) deg *= f.d;
    if (deg > double(cap))
        throw DegreeOverflow("periodic_points_fiber: fiber return degree exceeds cap");
    Polynomial P({cplx(0.0), cplx(1.0)});
    cplx z = z1;
    for (int j = 0; j < m; ++j) {
        Polynomial qj(f.fiber_coeffs_at(z));
        P = compose(qj, P);
        z = f.base_eval(z);
    }
    Polynomial fix = P;
    fix.c.resize(std::max<std::size_t>(fix.c.size(), 2), cplx(0.0));
    fix.c[1] -= 1.0;
    fix.normalize();
    std::vector<cplx> ws = roots(fix, 1e-12);
    for (cplx& w : ws) w = refine_fiber_periodic(f, z1, w, m);
    std::sort(ws.begin(), ws.end(), [](cplx a, cplx b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    std::vector<PeriodicOrbit> out;
    for (cplx w : ws) {
        if (exact_only) {
            bool proper = false;
            for (int j = 1; j < m && !proper; ++j) {
                if (m % j != 0) continue;
                auto [zj, wj] = iterate(f, z1, w, j);
                proper = std::abs(zj - z1) <= 1e-9 * (1.0 + std::abs(z1)) &&
                         std::abs(wj - w) <= 1e-8 * (1.0 + std::abs(w));
            }
            if (proper) continue;
        }
        out.push_back(make_periodic_orbit(f, z1, w, m));
    }
    return out;
}

namespace {

// distance from w to the nearest other period-m fiber point (when the return
// degree is small enough to enumerate; otherwise no guard)
double fiber_separation(const SkewProduct& f, cplx z1, int m, cplx w) {
    double deg = 1.0;
    for (int j = 0; j < m; ++j) deg *= f.d;
    if (deg > 256.0) return 1e300;
    Polynomial P({cplx(0.0), cplx(1.0)});
    cplx z = z1;
    for (int j = 0; j < m; ++j) {
        Polynomial qj(f.fiber_coeffs_at(z));
        P = compose(qj, P);
        z = f.base_eval(z);
    }
    P.c.resize(std::max<std::size_t>(P.c.size(), 2), cplx(0.0));
    P.c[1] -= 1.0;
    P.normalize();
    // distance to the nearest root other than the tracked one: second
    // smallest distance from w
    double d1 = 1e300, d2 = 1e300;
    for (cplx r : roots(P, 1e-12)) {
        double d = std::abs(r - w);
        if (d < d1) {
            d2 = d1;
            d1 = d;
        } else if (d < d2) {
            d2 = d;
        }
    }
    return d2;
}

} // namespace

PeriodicOrbit track_periodic(const ParameterSlice& slice, const PeriodicOrbit& orbit,
                             const std::vector<cplx>& lambda_from,
                             const std::vector<cplx>& lambda_to, int steps) {
    std::size_t nd = slice.dirs.size();
    cplx w = orbit.w1;
    const cplx z1 = orbit.z1;
    const int m = orbit.m;

    std::function<void(const std::vector<cplx>&, const std::vector<cplx>&, int)> seg =
        [&](const std::vector<cplx>& va, const std::vector<cplx>& vb, int depth) {
            CycleJets cj = cycle_jets(slice, va, z1, w, m);
            cplx w_pred = w;
            for (std::size_t i = 0; i < nd; ++i) w_pred += cj.w1.d[i] * (vb[i] - va[i]);
            SkewProduct fb = slice.at(vb);
            // size of the first Newton correction at the predicted point
            cplx z = z1, W = w_pred, dW = 1.0;
            for (int j = 0; j < m; ++j) {
                dW *= fb.fiber_dw(z, W);
                W = fb.fiber_eval(z, W);
                z = fb.base_eval(z);
            }
            double corr = std::abs((W - w_pred) / (dW - 1.0));
            double sep = fiber_separation(fb, z1, m, w_pred);
            if (corr > 0.25 * sep) {
                if (depth >= 6)
                    throw BranchJumpRisk("track_periodic: correction exceeds the basin guard "
                                         "after 6 bisections");
                std::vector<cplx> mid(nd);
                for (std::size_t i = 0; i < nd; ++i) mid[i] = 0.5 * (va[i] + vb[i]);
                seg(va, mid, depth + 1);
                seg(mid, vb, depth + 1);
                return;
            }
            w = refine_fiber_periodic(fb, z1, w_pred, m);
            OrbitJacobian J = orbit_jacobian(fb, z1, w, m);
            if (std::abs(J.dQdw) < kRepellingMargin)
                throw LostRepelling("track_periodic: |B| fell below the repelling margin");
        };

    for (int s = 0; s < steps; ++s) {
        std::vector<cplx> va(nd), vb(nd);
        for (std::size_t i = 0; i < nd; ++i) {
            va[i] = lambda_from[i] + (lambda_to[i] - lambda_from[i]) * (double(s) / steps);
            vb[i] = lambda_from[i] + (lambda_to[i] - lambda_from[i]) * (double(s + 1) / steps);
        }
        seg(va, vb, 0);
    }
    return make_periodic_orbit(slice.at(lambda_to), z1, w, m);
}

MisiurewiczRelation solve_misiurewicz(const ParameterSlice& slice, cplx z0, int critical_index,
                                      int n0, const PeriodicOrbit& target,
                                      const std::vector<cplx>& lambda_init, double tol) {
    std::size_t nd = slice.dirs.size();
    MisiurewiczRelation rel;
    rel.z0 = z0;
    rel.critical_index = critical_index;
    rel.n0 = n0;
    rel.lambda_star = lambda_init;

    SkewProduct f0 = slice.at(lambda_init);
    auto crits = critical_roots(f0, z0);
    if (critical_index < 0 || critical_index >= int(crits.size()))
        throw std::invalid_argument("solve_misiurewicz: critical_index out of range");
    cplx c = crits[critical_index];
    cplx w1 = target.w1;
    std::vector<cplx> lam = lambda_init;

    bool ok = false;
    double Fabs = 0.0;
    std::vector<cplx> dF;
    for (int it = 0; it < 50; ++it) {
        Jet1 F = relation_F_generic(slice, z0, n0, target.z1, target.m, lam, c, w1);
        Fabs = std::abs(F.v);
        double scale = 1.0 + std::abs(w1);
        double jn2 = 0.0;
        for (cplx g : F.d) jn2 += std::norm(g);
        if (Fabs <= tol * scale) {
            ok = true;
            dF = F.d;
            break;
        }
        if (std::sqrt(jn2) <= 1e-12 * scale)
            throw PersistentRelation("solve_misiurewicz: gradient vanishes along the slice");
        double step = 0.0;
        for (std::size_t i = 0; i < nd; ++i) {
            cplx di = -std::conj(F.d[i]) * F.v / jn2; // minimum-norm Gauss-Newton step
            lam[i] += di;
            step += std::norm(di);
        }
        rel.newton_trace.push_back(std::sqrt(step));
    }
    if (!ok) throw NoConvergence("solve_misiurewicz: no convergence in 50 iterations");
    double dn = 0.0;
    for (cplx g : dF) dn += std::norm(g);
    if (std::sqrt(dn) <= 1e-10 * (1.0 + std::abs(w1)))
        throw PersistentRelation("solve_misiurewicz: relation persists along the slice");
    rel.lambda_star = lam;
    rel.residual = Fabs;
    rel.dF = dF;
    rel.target = make_periodic_orbit(slice.at(lam), target.z1, w1, target.m);
    return rel;
}

namespace {
Jet1 stable_relation_F(const SecondRelationData& pd, const Jet1& l1, const Jet1& l2);
}

TupleMap relation_tuple_map(const ParameterSlice& slice,
                            const std::vector<MisiurewiczRelation>& relations,
                            const std::vector<cplx>& lambda) {
    TupleMap out;
    for (const auto& rel : relations) {
        Jet1 F;
        if (rel.provenance) {
            if (slice.dirs.size() != 2)
                throw std::invalid_argument("relation_tuple_map: provenance rows need dim 2");
            Jet1 l1 = Jet1::variable(lambda[0], 2, 0);
            Jet1 l2 = Jet1::variable(lambda[1], 2, 1);
            F = stable_relation_F(*rel.provenance, l1, l2);
        } else {
            cplx c = rel.z0, w1 = rel.target.w1;
            {
                SkewProduct fv = slice.at(lambda);
                auto cr = critical_roots(fv, rel.z0);
                c = cr[std::min<std::size_t>(rel.critical_index, cr.size() - 1)];
            }
            F = relation_F_generic(slice, rel.z0, rel.n0, rel.target.z1, rel.target.m, lambda,
                                   c, w1);
        }
        out.F.push_back(F.v);
        out.J.push_back(F.d);
    }
    return out;
}

std::vector<double> singular_values(const std::vector<std::vector<cplx>>& A) {
    if (A.empty()) return {};
    std::size_t r = A.size(), c = A[0].size();
    // one-sided Jacobi: orthogonalize column pairs of the r x c matrix
    std::vector<std::vector<cplx>> col(c, std::vector<cplx>(r));
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) col[j][i] = A[i][j];
    for (int sweep = 0; sweep < 60; ++sweep) {
        bool changed = false;
        for (std::size_t p = 0; p + 1 < c; ++p)
            for (std::size_t q = p + 1; q < c; ++q) {
                double a = 0, b = 0;
                cplx g(0.0);
                for (std::size_t i = 0; i < r; ++i) {
                    a += std::norm(col[p][i]);
                    b += std::norm(col[q][i]);
                    g += std::conj(col[p][i]) * col[q][i];
                }
                double ga = std::abs(g);
                if (ga <= 1e-30 + 1e-16 * std::sqrt(a * b)) continue;
                changed = true;
                double tau = (a - b) / (2.0 * ga);
                double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                double cs = 1.0 / std::sqrt(1.0 + t * t);
                double sn = cs * t;
                cplx ph = g / ga;
                for (std::size_t i = 0; i < r; ++i) {
                    cplx xp = col[p][i], xq = col[q][i];
                    col[p][i] = cs * xp + sn * std::conj(ph) * xq;
                    col[q][i] = -sn * ph * xp + cs * xq;
                }
            }
        if (!changed) break;
    }
    std::vector<double> s(c);
    for (std::size_t j = 0; j < c; ++j) {
        double n2 = 0;
        for (std::size_t i = 0; i < r; ++i) n2 += std::norm(col[j][i]);
        s[j] = std::sqrt(n2);
    }
    std::sort(s.begin(), s.end(), std::greater<double>());
    s.resize(std::min(r, c));
    return s;
}

RankCertificate independence_rank(const ParameterSlice& slice,
                                  const std::vector<MisiurewiczRelation>& relations,
                                  const std::vector<cplx>& lambda, double rank_tol) {
    TupleMap tm = relation_tuple_map(slice, relations, lambda);
    RankCertificate cert;
    cert.jacobian = tm.J;
    cert.singular_values = singular_values(tm.J);
    std::size_t k = relations.size();
    for (double s : cert.singular_values)
        if (s > rank_tol) ++cert.rank;
    cert.sigma_min =
        (k <= cert.singular_values.size() && k > 0) ? cert.singular_values[k - 1] : 0.0;
    return cert;
}

cplx nonvertical_v2(const SkewProduct& f, const PeriodicOrbit& orbit) {
    OrbitJacobian J = orbit_jacobian(f, orbit.z1, orbit.w1, orbit.m);
    return J.dQdz / (J.dp - J.dQdw);
}

cplx postcritical_u2(const SkewProduct& f, cplx z0, cplx c, int n0) {
    OrbitJacobian J = orbit_jacobian(f, z0, c, n0);
    return J.dQdz / J.dp;
}

GoodnessReport goodness_audit(const ParameterSlice& slice, const MisiurewiczRelation& rel) {
    GoodnessReport rep;
    const std::vector<cplx>& lam = rel.lambda_star;
    SkewProduct fv = slice.at(lam);

    cplx w1 = refine_fiber_periodic(fv, rel.target.z1, rel.target.w1, rel.target.m);
    PeriodicOrbit tgt = make_periodic_orbit(fv, rel.target.z1, w1, rel.target.m);
    auto crits = critical_roots(fv, rel.z0);
    cplx c = crits[std::min<std::size_t>(rel.critical_index, crits.size() - 1)];

    CycleJets cj = cycle_jets(slice, lam, tgt.z1, w1, tgt.m);
    rep.g1_dB = cj.B.d;
    double dn = 0.0;
    for (cplx g : rep.g1_dB) dn += std::norm(g);
    rep.g1 = std::sqrt(dn) > 1e-9 * (1.0 + std::abs(tgt.B));
    rep.s1 = rep.g1;
    rep.g2_vertical_like = tgt.vertical_like;

    cplx dpn = 1.0, zz = rel.z0;
    for (int j = 0; j < rel.n0; ++j) {
        dpn *= fv.base_deriv(zz);
        zz = fv.base_eval(zz);
    }
    double mind = 1e300;
    cplx zc = tgt.z1;
    for (int j = 0; j < tgt.m; ++j) {
        mind = std::min(mind, std::abs(rel.z0 - zc));
        zc = fv.base_eval(zc);
    }
    rep.g3_base_ok = std::abs(dpn) > 1e-9 && mind > 1e-9;

    {
        auto coef = fv.fiber_coeffs_at(rel.z0);
        std::vector<cplx> dc(coef.size() - 1);
        for (std::size_t j = 1; j < coef.size(); ++j) dc[j - 1] = double(j) * coef[j];
        auto clusters = clustered_roots(Polynomial(std::move(dc)), 1e-12);
        int mult = 0;
        double best = 1e300;
        for (auto [center, k] : clusters) {
            double d = std::abs(center - c);
            if (d < best) {
                best = d;
                mult = k;
            }
        }
        rep.g4_simple = mult == 1;
    }

    // postcritical graph tangent at the landing point: push (1, dc/dz) by df^{n0}
    {
        SkewT<Jet1> f2 = to_jet(fv, 2);
        Jet1 qwj = f2.fiber_dw(Jet1::variable(rel.z0, 2, 0), Jet1::variable(c, 2, 1));
        cplx dcdz = -qwj.d[0] / qwj.d[1];
        OrbitJacobian Jpc = orbit_jacobian(fv, rel.z0, c, rel.n0);
        cplx tangent = (Jpc.dQdz + Jpc.dQdw * dcdz) / Jpc.dp;
        OrbitJacobian Jc = orbit_jacobian(fv, tgt.z1, w1, tgt.m);
        cplx v2 = Jc.dQdz / (Jc.dp - Jc.dQdw);
        auto angle = [](cplx u1, cplx u2, cplx x1, cplx x2) {
            double nu = std::sqrt(std::norm(u1) + std::norm(u2));
            double nx = std::sqrt(std::norm(x1) + std::norm(x2));
            double ip = std::abs(std::conj(u1) * x1 + std::conj(u2) * x2);
            double cth = std::min(1.0, ip / (nu * nx));
            return std::acos(cth);
        };
        double a_vert = angle(cplx(1.0), tangent, cplx(0.0), cplx(1.0));
        double a_nv = angle(cplx(1.0), tangent, cplx(1.0), v2);
        rep.g5_angle = std::min(a_vert, a_nv);
        // tangency is an algebraic identity and shows up at roundoff scale;
        // deep relations legitimately have steep (near-vertical) postcritical
        // tangents with angles of order (A/B)^m, so the cut sits well below
        // any such genuine angle
        rep.g5 = rep.g5_angle > 1e-6;
    }

    {
        cplx la = std::log(tgt.A), lb = std::log(tgt.B);
        double na = std::abs(la);
        rep.s2_gap = na > 0 ? std::abs(std::imag(lb * std::conj(la))) / na : std::abs(lb);
        rep.s2 = rep.s2_gap > 1e-3;
    }
    return rep;
}

MultiplierJacobian multiplier_map_jacobian(const ParameterSlice& slice,
                                           const std::vector<PeriodicOrbit>& orbits,
                                           const std::vector<cplx>& lambda) {
    MultiplierJacobian out;
    SkewProduct fv = slice.at(lambda);
    for (const auto& o : orbits) {
        cplx w1 = refine_fiber_periodic(fv, o.z1, o.w1, o.m);
        CycleJets cj = cycle_jets(slice, lambda, o.z1, w1, o.m);
        out.J.push_back(cj.B.d);
    }
    auto s = singular_values(out.J);
    std::size_t k = orbits.size();
    out.sigma_min = (k <= s.size() && k > 0) ? s[k - 1] : 0.0;
    return out;
}

InjectivityClaim multiplier_claim_d2_m3() {
    InjectivityClaim out;
    // return map at the pure-power point: Q_1 = w^2, Q_2 = w^4; perturbing the
    // j-th step by a constant r_j gives dQ_3/dr_j = prod_{l>j} q'(Q_{l-1})
    Polynomial w({cplx(0.0), cplx(1.0)});
    Polynomial Q1 = w * w;
    Polynomial Q2 = Q1 * Q1;
    std::vector<Polynomial> cols(3, Polynomial({cplx(1.0)}));
    cols[0] = (Q1 * 2.0) * (Q2 * 2.0); // 4 w^6
    cols[1] = Q2 * 2.0;                // 2 w^4
    cols[2] = Polynomial({cplx(1.0)}); // 1
    out.columns = cols;
    // monomials of pairwise distinct degrees with nonzero leads: any nonzero
    // combination is a nonzero polynomial
    bool inj = true;
    for (std::size_t i = 0; i < cols.size(); ++i) {
        if (std::abs(cols[i].lead()) == 0.0) inj = false;
        for (std::size_t j = i + 1; j < cols.size(); ++j)
            if (cols[i].degree() == cols[j].degree()) inj = false;
    }
    out.injective = inj;
    return out;
}

namespace {

// ---- unicritical asymptotics over p = z^2, a(z) = l1 + l2 z ----

cplx asym_z0(int n0) { return n0 == 2 ? cplx(-1.0) : cplx(0.0, 1.0); }

// residual of Q^{n0}_{z0}(0) = w_fix(a(1)) with d/dl1, at fixed l2
Jet1 asym_F(int n0, cplx l1, cplx l2) {
    Jet1 L1(l1, {cplx(1.0)});
    Jet1 L2 = Jet1::constant(l2, 1);
    cplx z = asym_z0(n0);
    Jet1 w = Jet1::constant(cplx(0.0), 1);
    for (int j = 0; j < n0; ++j) {
        w = w * w + (L1 + L2 * z);
        z = z * z;
    }
    Jet1 a1 = L1 + L2;
    Jet1 wf = (sqrt(cplx(1.0) - a1 * 4.0) + 1.0) * 0.5;
    return w - wf;
}

cplx asym_solve_l1(int n0, cplx l2, cplx init) {
    cplx l1 = init;
    double r0 = std::abs(asym_F(n0, l1, l2).v);
    for (int it = 0; it < 120; ++it) {
        Jet1 F = asym_F(n0, l1, l2);
        if (std::abs(F.v) <= 1e-10 * (1.0 + std::abs(l1))) return l1;
        cplx step = -F.v / F.d[0];
        // the forward orbit squares up to |lambda|^2 before the cancellation,
        // so the residual floor scales like |lambda|^2 eps; accept a stalled
        // Newton once the step is negligible
        if (std::abs(step) <= 1e-13 * (1.0 + std::abs(l1))) return l1;
        for (int h = 0; h < 12; ++h) {
            double rn = std::abs(asym_F(n0, l1 + step, l2).v);
            if (rn < r0 || h == 11) {
                l1 += step;
                r0 = rn;
                break;
            }
            step *= 0.5;
        }
    }
    throw NoConvergence("unicritical_asymptotics: ray relation solve failed");
}

} // namespace

AsymptoticFit unicritical_asymptotics(AsymptoticQuantity quantity, int n0,
                                      const std::vector<double>& magnitudes, cplx ray1,
                                      cplx ray2) {
    if (magnitudes.size() < 2)
        throw std::invalid_argument("unicritical_asymptotics: need at least two magnitudes");
    double rn = std::abs(ray1) + std::abs(ray2);
    if (quantity == AsymptoticQuantity::FiberModulus) {
        // Lemma hypothesis: the direction does not vanish at z0 = 1
        if (std::abs(ray1 + ray2) <= 1e-9 * rn)
            throw HypothesisViolated("unicritical_asymptotics: ray vanishes at z0");
    } else {
        if (n0 != 2 && n0 != 3)
            throw std::invalid_argument("unicritical_asymptotics: n0 must be 2 or 3");
        // hypothesis lambda'(p^i(z0)) != 0: the derivative direction is ray2
        if (std::abs(ray2) <= 1e-9 * rn)
            throw HypothesisViolated(
                "unicritical_asymptotics: derivative direction vanishes on the base orbit");
    }

    Polynomial pz({cplx(0.0), cplx(0.0), cplx(1.0)}); // z^2
    AsymptoticFit fit;
    for (double s : magnitudes) {
        double value = 0.0;
        if (quantity == AsymptoticQuantity::FiberModulus) {
            Polynomial a({s * ray1, s * ray2});
            SkewProduct f = make_unicritical(pz, 2, a);
            double vmax = 0.0;
            for (const auto& o : periodic_points_fiber(f, cplx(1.0), 2, false))
                vmax = std::max(vmax, std::abs(o.w1));
            value = vmax;
        } else {
            cplx l2 = s * ray2;
            cplx init;
            if (n0 == 2)
                init = l2 + cplx(0.0, 1.0) * std::sqrt(2.0 * l2);
            else
                init = std::sqrt(cplx(1.0, 1.0) * l2) - cplx(0.0, 1.0) * l2 - 0.5;
            cplx l1 = asym_solve_l1(n0, l2, init);
            Polynomial a({l1, l2});
            SkewProduct f = make_unicritical(pz, 2, a);
            cplx a1 = l1 + l2;
            cplx wf = (1.0 + std::sqrt(cplx(1.0) - 4.0 * a1)) / 2.0;
            wf = refine_fiber_periodic(f, cplx(1.0), wf, 1);
            switch (quantity) {
            case AsymptoticQuantity::U2:
                value = std::abs(postcritical_u2(f, asym_z0(n0), cplx(0.0), n0));
                break;
            case AsymptoticQuantity::V2:
                value = std::abs(nonvertical_v2(f, make_periodic_orbit(f, cplx(1.0), wf, 1)));
                break;
            default:
                value = std::abs(2.0 * wf);
                break;
            }
        }
        fit.log_mag.push_back(std::log10(s));
        fit.log_value.push_back(std::log10(value));
    }
    fit.slope = lsq_slope(fit.log_mag, fit.log_value, &fit.intercept);
    return fit;
}

// ---- second-relation machinery over p = z^2 - 1, a = l1 + l2 z ----

namespace {

const cplx kZstar((1.0 + std::sqrt(5.0)) / 2.0, 0.0);

bool poly_is(const std::vector<cplx>& c, std::initializer_list<double> want) {
    std::size_t i = 0;
    for (double w : want) {
        cplx v = i < c.size() ? c[i] : cplx(0.0);
        if (std::abs(v - w) > 1e-12) return false;
        ++i;
    }
    for (; i < c.size(); ++i)
        if (std::abs(c[i]) > 1e-12) return false;
    return true;
}

bool is_quadratic_search_slice(const ParameterSlice& s) {
    if (s.dirs.size() != 2) return false;
    const SkewProduct& b = s.base_point;
    if (b.d != 2 || !poly_is(b.base, {-1.0, 0.0, 1.0})) return false;
    if (b.fiber.size() != 3 || !poly_is(b.fiber[0], {0.0}) || !poly_is(b.fiber[1], {0.0}) ||
        !poly_is(b.fiber[2], {1.0}))
        return false;
    auto zero_shape = [](const SkewProduct& d, std::initializer_list<double> a0) {
        for (cplx c : d.base)
            if (std::abs(c) > 1e-12) return false;
        if (!poly_is(d.fiber[0], a0)) return false;
        for (std::size_t j = 1; j < d.fiber.size(); ++j)
            for (cplx c : d.fiber[j])
                if (std::abs(c) > 1e-12) return false;
        return true;
    };
    return zero_shape(s.dirs[0], {1.0}) && zero_shape(s.dirs[1], {0.0, 1.0});
}

// preimage deviation: the root of p(c + x) = p(c) + delta continuing x = 0,
// for p = z^2 - 1 (uses p(c) + 1 = c^2). The square root is resolved to the
// branch nearest c, so the formula stays cancellation-free even when c^2
// sits on the principal cut (c imaginary)
cplx presqrt(cplx c, cplx delta) {
    cplx s = std::sqrt(c * c + delta);
    if (std::abs(s - c) > std::abs(s + c)) s = -s;
    return delta / (s + c);
}

template <class T>
T a_of(const T& l1, const T& l2, cplx z) {
    return l1 + l2 * z;
}

// fixed point of w^2 + a(zstar): sgn=+1 is the branch with larger |2w|
template <class T>
T fixed_w(const T& l1, const T& l2, cplx zstar, double sgn) {
    T s = sqrt(cplx(1.0) - a_of(l1, l2, zstar) * 4.0);
    return (s * sgn + 1.0) * 0.5;
}

template <class T>
T seed_F1(const T& l1, const T& l2, cplx zstar, cplx z0, int n0, double w1_sign) {
    T w1 = fixed_w(l1, l2, zstar, w1_sign);
    T am = a_of(l1, l2, -zstar);
    if (n0 == 1) return am - w1;
    T a0 = a_of(l1, l2, z0);
    return a0 * a0 + am - w1;
}

// postcritical graph deviation beta(zstar + delta) - w1, exact off the
// hypersurface; cancellation-free for small delta. On the solved seed
// hypersurface F1 vanishes identically (in value and along-disk derivative),
// so with_F1=false substitutes the exact zero instead of the ~1e-15 solve
// residual, which the m-step recurrence would otherwise amplify by |B|^m.
template <class T>
T beta_dev(const T& l1, const T& l2, cplx zstar, cplx z0, int n0, double w1_sign, cplx delta,
           bool with_F1 = true) {
    T F1 = with_F1 ? seed_F1(l1, l2, zstar, z0, n0, w1_sign) : (l1 - l1);
    cplx p1 = presqrt(zstar, delta);
    if (n0 == 1) return F1 - l2 * p1;
    cplx d2 = presqrt(z0, -p1);
    return F1 + l2 * ((a_of(l1, l2, z0) * 2.0 + l2 * d2) * d2 - p1);
}

Jet1 sqrt_near(const Jet1& x, cplx ref) {
    Jet1 r = sqrt(x);
    if (std::abs(r.v - ref) > std::abs(r.v + ref)) return -r;
    return r;
}

// exact fiber deviation recurrence from (zstar + delta_hat, w1 + eps0),
// m forward steps; returns the full fiber value w1 + eps_m over z_k
template <class T>
T phi_value(const T& l2, cplx zstar, const T& w1, T eps, cplx delta_hat, int m) {
    cplx dd = delta_hat;
    for (int j = 0; j < m; ++j) {
        eps = eps * (w1 * 2.0 + eps) + l2 * dd;
        dd = dd * (2.0 * zstar + dd);
    }
    return w1 + eps;
}

struct SearchCtx {
    const ParameterSlice* slice = nullptr;
    cplx zstar, z0;
    int n0 = 2;
    double w1_sign = 1.0;
    std::vector<cplx> lam0;
    std::vector<cplx> e, ep; // kernel of dF1 and its orthogonal complement
    int gdepth = 3;
    std::vector<cplx> prefix_base;
    cplx delta_box{0.0};
    cplx w3_ref{0.0};
    std::vector<cplx> prefix_refs;
    std::vector<std::vector<cplx>> g_refs;
    double logBA = 0.0;
};

// backward fiber chain value w_{k,family}(lambda) over z_k, with square
// roots resolved against the stored references
Jet1 backward_fiber(const SearchCtx& c, const Jet1& l1, const Jet1& l2, int k, int fam) {
    Jet1 w2 = fixed_w(l1, l2, c.zstar, -c.w1_sign);
    Jet1 w = sqrt_near(w2 - a_of(l1, l2, -c.zstar), c.w3_ref);
    for (std::size_t j = 0; j < c.prefix_base.size(); ++j)
        w = sqrt_near(w - a_of(l1, l2, c.prefix_base[j]), c.prefix_refs[j]);
    cplx delta = c.delta_box;
    for (int rep = 0; rep < k; ++rep)
        for (int st = 0; st < c.gdepth; ++st) {
            delta = presqrt(c.zstar, delta);
            w = sqrt_near(w - a_of(l1, l2, c.zstar + delta), c.g_refs[fam][st]);
        }
    return w;
}

SearchCtx make_search_ctx(const ParameterSlice& slice, const MisiurewiczRelation& seed,
                          const InverseBranchSystem& sys) {
    SearchCtx c;
    c.slice = &slice;
    c.zstar = kZstar;
    c.z0 = seed.z0;
    c.n0 = seed.n0;
    c.lam0 = seed.lambda_star;
    c.gdepth = sys.n;
    if (c.n0 != 1 && c.n0 != 2)
        throw HypothesisViolated("second_relation: seed landing time must be 1 or 2");
    {
        cplx zz = seed.z0;
        for (int j = 0; j < c.n0; ++j) zz = zz * zz - 1.0;
        if (std::abs(zz - c.zstar) > 1e-6)
            throw HypothesisViolated("second_relation: seed critical fiber does not land on "
                                     "the base fixed point");
    }
    cplx l1 = c.lam0[0], l2 = c.lam0[1];
    // target branch sign
    {
        cplx wp = fixed_w(l1, l2, c.zstar, 1.0);
        cplx wm = fixed_w(l1, l2, c.zstar, -1.0);
        c.w1_sign = std::abs(wp - seed.target.w1) <= std::abs(wm - seed.target.w1) ? 1.0 : -1.0;
    }
    {
        cplx F1 = seed_F1(l1, l2, c.zstar, c.z0, c.n0, c.w1_sign);
        if (std::abs(F1) > 1e-6)
            throw HypothesisViolated("second_relation: seed is not on the documented relation");
    }
    // in-hypersurface frame from the closed-form gradient
    {
        Jet1 L1 = Jet1::variable(l1, 2, 0), L2 = Jet1::variable(l2, 2, 1);
        Jet1 F = seed_F1(L1, L2, c.zstar, c.z0, c.n0, c.w1_sign);
        cplx g1 = F.d[0], g2 = F.d[1];
        double gn = std::sqrt(std::norm(g1) + std::norm(g2));
        if (gn < 1e-12) throw HypothesisViolated("second_relation: seed gradient vanishes");
        c.e = {g2 / gn, -g1 / gn};
        c.ep = {std::conj(g1) / gn, std::conj(g2) / gn};
        // B must move along the disk direction
        Jet1 W1 = fixed_w(L1, L2, c.zstar, c.w1_sign);
        cplx dBe = 2.0 * (W1.d[0] * c.e[0] + W1.d[1] * c.e[1]);
        if (std::abs(dBe) < 1e-9)
            throw HypothesisViolated("second_relation: multiplier is stationary on the disk");
    }
    cplx w1v = fixed_w(l1, l2, c.zstar, c.w1_sign);
    c.logBA = std::log(std::abs(2.0 * w1v) / std::abs(2.0 * c.zstar));
    if (c.logBA <= 0.0)
        throw HypothesisViolated("second_relation: target cycle is not vertical-like");

    // base approach chain: iterated preimages of -zstar down into the box
    double box_r = sys.box.comps.at(0).base_radius;
    cplx v = -c.zstar;
    for (int j = 0; j < 24; ++j) {
        cplx r = std::sqrt(v + 1.0); // p(x) = v has roots +-sqrt(v+1)
        if (r.real() < 0.0 || (r.real() == 0.0 && r.imag() < 0.0)) r = -r;
        v = r;
        c.prefix_base.push_back(v);
        if (std::abs(v - c.zstar) <= 0.9 * box_r) break;
    }
    if (std::abs(c.prefix_base.back() - c.zstar) > 0.9 * box_r)
        throw HypothesisViolated("second_relation: approach chain does not enter the box");
    c.delta_box = c.prefix_base.back() - c.zstar;

    // fiber references along the chains, evaluated at the seed parameter
    auto pick_larger_re = [](cplx x) {
        cplx r = std::sqrt(x);
        if (r.real() < 0.0 || (r.real() == 0.0 && r.imag() < 0.0)) r = -r;
        return r;
    };
    cplx w2v = fixed_w(l1, l2, c.zstar, -c.w1_sign);
    cplx wv = pick_larger_re(w2v - a_of(l1, l2, -c.zstar));
    c.w3_ref = wv;
    for (cplx vb : c.prefix_base) {
        wv = pick_larger_re(wv - a_of(l1, l2, vb));
        c.prefix_refs.push_back(wv);
    }
    // one G application per family, anchored by the branch system's words
    std::vector<int> fams;
    for (std::size_t b = 0; b < sys.branches.size(); ++b) fams.push_back(int(b));
    if (fams.size() < 2)
        throw HypothesisViolated("second_relation: need two fiber families in the IFS");
    c.g_refs.assign(2, {});
    for (int fam = 0; fam < 2; ++fam) {
        cplx delta = c.delta_box;
        cplx wf = wv;
        for (int st = 0; st < c.gdepth; ++st) {
            delta = presqrt(c.zstar, delta);
            cplx r = std::sqrt(wf - a_of(l1, l2, c.zstar + delta));
            cplx anchor = sys.branches[fams[fam]].fiber_anchors.at(st);
            if (std::abs(r - anchor) > std::abs(r + anchor)) r = -r;
            c.g_refs[fam].push_back(r);
            wf = r;
        }
    }
    return c;
}

// lambda(t) on the seed hypersurface: lam0 + t e + s(t) ep with s solved so
// the closed-form residual stays zero; jets carry d/dt
std::array<Jet1, 2> lambda_on_disk(const SearchCtx& c, cplx t, cplx& s_io) {
    cplx s = s_io;
    for (int it = 0; it < 40; ++it) {
        Jet1 l1(c.lam0[0] + t * c.e[0] + s * c.ep[0], {c.ep[0]});
        Jet1 l2(c.lam0[1] + t * c.e[1] + s * c.ep[1], {c.ep[1]});
        Jet1 F = seed_F1(l1, l2, c.zstar, c.z0, c.n0, c.w1_sign);
        if (std::abs(F.v) <= 1e-15) break;
        s -= F.v / F.d[0];
    }
    s_io = s;
    cplx v1 = c.lam0[0] + t * c.e[0] + s * c.ep[0];
    cplx v2 = c.lam0[1] + t * c.e[1] + s * c.ep[1];
    Jet1 L1 = Jet1::variable(v1, 2, 0), L2 = Jet1::variable(v2, 2, 1);
    Jet1 F = seed_F1(L1, L2, c.zstar, c.z0, c.n0, c.w1_sign);
    cplx ge = F.d[0] * c.e[0] + F.d[1] * c.e[1];
    cplx gp = F.d[0] * c.ep[0] + F.d[1] * c.ep[1];
    cplx dsdt = -ge / gp;
    return {Jet1(v1, {c.e[0] + dsdt * c.ep[0]}), Jet1(v2, {c.e[1] + dsdt * c.ep[1]})};
}

// deviation of z_k from zstar (k G applications from the box entry) and of
// its m-fold further preimage
cplx delta_after(const SearchCtx& c, cplx delta, int steps) {
    for (int j = 0; j < steps; ++j) delta = presqrt(c.zstar, delta);
    return delta;
}

// backward chain value w_k(lambda) reconstructed from the stored provenance
Jet1 backward_fiber_pd(const SecondRelationData& pd, const Jet1& l1, const Jet1& l2) {
    Jet1 w2 = fixed_w(l1, l2, pd.zstar, -double(pd.w1_sign));
    Jet1 w = sqrt_near(w2 - a_of(l1, l2, -pd.zstar), pd.w3_ref);
    for (std::size_t j = 0; j < pd.prefix_base.size(); ++j)
        w = sqrt_near(w - a_of(l1, l2, pd.prefix_base[j]), pd.prefix_refs[j]);
    cplx delta = pd.delta_box;
    for (int rep = 0; rep < pd.k; ++rep)
        for (int st = 0; st < pd.gdepth; ++st) {
            delta = presqrt(pd.zstar, delta);
            w = sqrt_near(w - a_of(l1, l2, pd.zstar + delta), pd.g_refs[pd.family][st]);
        }
    return w;
}

// the landing equation the search actually solves: the postcritical graph
// pushed m_k fiber steps over the chain point z_k equals the backward-orbit
// fiber value there. Equivalent to the full forward relation onto the target
// cycle (the two sides share the entire forward chain), but conditioned like
// |B|^{m_k} instead of |B|^{m_k} times the chain derivative.
Jet1 stable_relation_F(const SecondRelationData& pd, const Jet1& l1, const Jet1& l2) {
    cplx dhat = pd.delta_box;
    for (int j = 0; j < pd.gdepth * pd.k + pd.m_k; ++j) dhat = presqrt(pd.zstar, dhat);
    Jet1 w1 = fixed_w(l1, l2, pd.zstar, double(pd.w1_sign));
    Jet1 eps = beta_dev(l1, l2, pd.zstar, pd.z0_seed, pd.n0_seed, double(pd.w1_sign), dhat);
    Jet1 phi = phi_value(l2, pd.zstar, w1, eps, dhat, pd.m_k);
    return phi - backward_fiber_pd(pd, l1, l2);
}

// rotation-symmetry fallback for monomial bases: candidates are the rotated
// copies of the seed's critical fiber; they solve at the same parameter and
// the pair is rank-tested
MisiurewiczRelation rotation_fallback(const ParameterSlice& slice,
                                      const MisiurewiczRelation& seed, double eps) {
    const Polynomial base(slice.base_point.base);
    int D = base.degree();
    bool monomial = D >= 2 && std::abs(base.lead() - 1.0) < 1e-9;
    for (int j = 0; j < D; ++j) monomial = monomial && std::abs(base.c[j]) < 1e-9;
    if (!monomial)
        throw SearchExhausted("second_relation_search: family outside the supported classes "
                              "(no quadratic slice, no monomial base symmetry)");
    SkewProduct f0 = slice.at(seed.lambda_star);
    cplx c_seed = critical_roots(f0, seed.z0).at(seed.critical_index);
    std::ostringstream diag;
    const double tau = 6.283185307179586;
    for (int j = 1; j < D; ++j) {
        cplx om = std::polar(1.0, tau * j / D);
        cplx z0j = seed.z0 * om;
        auto cr = critical_roots(f0, z0j);
        int idx = 0;
        for (std::size_t i = 1; i < cr.size(); ++i)
            if (std::abs(cr[i] - om * c_seed) < std::abs(cr[idx] - om * c_seed)) idx = int(i);
        try {
            MisiurewiczRelation cand = solve_misiurewicz(slice, z0j, idx, seed.n0, seed.target,
                                                         seed.lambda_star);
            double dist = 0.0;
            for (std::size_t i = 0; i < cand.lambda_star.size(); ++i)
                dist += std::norm(cand.lambda_star[i] - seed.lambda_star[i]);
            dist = std::sqrt(dist);
            RankCertificate rc =
                independence_rank(slice, {seed, cand}, cand.lambda_star);
            if (dist <= eps && rc.rank >= 2 && rc.sigma_min > 1e-6) return cand;
            diag << "rotation " << j << ": sigma_min=" << rc.sigma_min << " dist=" << dist
                 << "; ";
        } catch (const std::runtime_error& ex) {
            diag << "rotation " << j << ": " << ex.what() << "; ";
        }
    }
    throw SearchExhausted("second_relation_search: rotation candidates are rank-deficient "
                          "against the seed [" +
                          diag.str() + "]");
}

} // namespace

InverseBranchSystem make_quadratic_search_system(const SkewProduct& f, int letters,
                                                 double box_radius, double alpha) {
    if (f.d != 2 || !poly_is(f.base, {-1.0, 0.0, 1.0}) || f.fiber.size() != 3 ||
        !poly_is(f.fiber[1], {0.0}) || !poly_is(f.fiber[2], {1.0}))
        throw std::invalid_argument(
            "make_quadratic_search_system: need w^2 + a(z) over z^2 - 1");
    cplx az = Polynomial(f.fiber[0])(kZstar);
    InverseBranchSystem sys;
    sys.f = f;
    sys.n = letters;
    sys.alpha = alpha;
    sys.box.comps = {{kZstar, box_radius, cplx(0.0), std::sqrt(std::abs(az)) + 1.0}};
    std::vector<cplx> base_anch(letters, kZstar);
    for (int fam = 0; fam < 2; ++fam) {
        // sign words: -++...+ and --+...+
        std::vector<cplx> fiber_anch;
        std::string label;
        cplx w(0.0);
        for (int st = 0; st < letters; ++st) {
            double sgn = (st == 0 || (fam == 1 && st == 1)) ? -1.0 : 1.0;
            cplx r = sgn * std::sqrt(w - az);
            fiber_anch.push_back(r);
            label += sgn > 0 ? '+' : '-';
            w = r;
        }
        sys.branches.push_back({0, label, {base_anch}, fiber_anch});
    }
    return sys;
}

SearchDiagnostic second_relation_diagnostic(const ParameterSlice& slice,
                                            const MisiurewiczRelation& seed,
                                            const InverseBranchSystem& sys, int k_min,
                                            int k_max) {
    if (!is_quadratic_search_slice(slice))
        throw HypothesisViolated("second_relation_diagnostic: needs the quadratic slice");
    SearchCtx c = make_search_ctx(slice, seed, sys);
    SearchDiagnostic out;
    std::vector<double> lx, ly;
    for (int k = k_min; k <= k_max; ++k) {
        cplx delta_k = delta_after(c, c.delta_box, c.gdepth * k);
        int m = std::max(1, int(std::lround(-std::log(std::abs(delta_k)) / c.logBA)));
        cplx dhat = delta_after(c, delta_k, m);
        cplx s = 0.0;
        auto l = lambda_on_disk(c, cplx(0.0), s);
        Jet1 w1 = fixed_w(l[0], l[1], c.zstar, c.w1_sign);
        Jet1 eps = beta_dev(l[0], l[1], c.zstar, c.z0, c.n0, c.w1_sign, dhat, false);
        Jet1 phi = phi_value(l[1], c.zstar, w1, eps, dhat, m);
        out.m_k.push_back(m);
        out.dphi_abs.push_back(std::abs(phi.d[0]));
        lx.push_back(std::log(double(m)));
        ly.push_back(std::log(std::abs(phi.d[0])));
    }
    out.slope = lsq_slope(lx, ly);
    return out;
}

MisiurewiczRelation second_relation_search(const ParameterSlice& slice,
                                           const MisiurewiczRelation& seed,
                                           const InverseBranchSystem& sys, double eps,
                                           int k_max) {
    if (!is_quadratic_search_slice(slice)) return rotation_fallback(slice, seed, eps);
    SearchCtx c = make_search_ctx(slice, seed, sys);
    std::ostringstream diag;

    const cplx t_inits[] = {cplx(0.0), cplx(0.3), cplx(-0.3), cplx(0.0, 0.3), cplx(0.0, -0.3)};
    for (int k = 1; k <= k_max; ++k) {
        cplx delta_k = delta_after(c, c.delta_box, c.gdepth * k);
        int mhat = std::max(1, int(std::lround(-std::log(std::abs(delta_k)) / c.logBA)));
        for (int fam = 0; fam < 2; ++fam)
            for (int dm : {0, 1, -1}) {
                int m = mhat + dm;
                if (m < 1) continue;
                double ratio = std::abs(delta_k) * std::exp(c.logBA * m);
                if (ratio < 0.5 || ratio > 2.0) continue;
                cplx dhat = delta_after(c, delta_k, m);

                auto eval_h = [&](cplx t, cplx& s_io) {
                    auto l = lambda_on_disk(c, t, s_io);
                    Jet1 w1 = fixed_w(l[0], l[1], c.zstar, c.w1_sign);
                    Jet1 eps0 =
                        beta_dev(l[0], l[1], c.zstar, c.z0, c.n0, c.w1_sign, dhat, false);
                    Jet1 phi = phi_value(l[1], c.zstar, w1, eps0, dhat, m);
                    return phi - backward_fiber(c, l[0], l[1], k, fam);
                };
                {
                    // target on the sampled postcritical set: already a relation
                    cplx s0 = 0.0;
                    if (std::abs(eval_h(cplx(0.0), s0).v) < 1e-6) continue;
                }
                for (cplx t0 : t_inits) {
                    cplx t = t0, s = 0.0;
                    std::vector<double> trace;
                    double r0 = 1e300;
                    bool conv = false;
                    // the deviation recurrence amplifies roundoff by roughly
                    // |B|^m, so the residual floor sits near 1e-15 e^{m log B};
                    // a negligible Newton step is the reliable stop
                    double floor_tol = 1e-12 * std::exp(m * std::log(2.0 * std::abs(
                        fixed_w(c.lam0[0], c.lam0[1], c.zstar, c.w1_sign))));
                    for (int it = 0; it < 60; ++it) {
                        Jet1 h = eval_h(t, s);
                        r0 = std::abs(h.v);
                        if (r0 <= std::max(1e-13, floor_tol)) {
                            conv = true;
                            break;
                        }
                        cplx step = -h.v / h.d[0];
                        for (int hh = 0; hh < 8; ++hh) {
                            cplx st = s;
                            double rn = std::abs(eval_h(t + step, st).v);
                            if (rn < r0 || hh == 7) {
                                t += step;
                                break;
                            }
                            step *= 0.5;
                        }
                        trace.push_back(std::abs(step));
                        if (std::abs(step) <= 1e-11 * (1.0 + std::abs(t))) {
                            conv = true;
                            break;
                        }
                        if (std::abs(t) > 3.0 || std::abs(s) > 3.0) break;
                    }
                    if (!conv) {
                        diag << "k=" << k << " fam=" << fam << " m=" << m << " t0=" << t0
                             << ": stalled at |h|=" << r0 << "; ";
                        continue;
                    }

                    auto pd = std::make_shared<SecondRelationData>();
                    pd->zstar = c.zstar;
                    pd->z0_seed = c.z0;
                    pd->n0_seed = c.n0;
                    pd->w1_sign = int(c.w1_sign);
                    pd->k = k;
                    pd->family = fam;
                    pd->m_k = m;
                    pd->gdepth = c.gdepth;
                    pd->prefix_base = c.prefix_base;
                    pd->w3_ref = c.w3_ref;
                    pd->prefix_refs = c.prefix_refs;
                    pd->g_refs = c.g_refs;
                    pd->delta_box = c.delta_box;
                    pd->e = c.e;
                    pd->ep = c.ep;

                    // polish on the stored-form residual (the one re-checked later);
                    // it bottoms out at the seed solve noise amplified by |B|^m
                    cplx t_best = t;
                    double r_best = 1e300;
                    for (int it = 0; it < 6; ++it) {
                        auto l = lambda_on_disk(c, t, s);
                        Jet1 F = stable_relation_F(*pd, l[0], l[1]);
                        if (std::abs(F.v) < r_best) {
                            r_best = std::abs(F.v);
                            t_best = t;
                        }
                        if (std::abs(F.v) <= 1e-14) break;
                        t -= F.v / F.d[0];
                    }
                    t = t_best;
                    pd->t_star = t;
                    cplx sf = s;
                    auto lf = lambda_on_disk(c, t, sf);
                    std::vector<cplx> lam{lf[0].v, lf[1].v};

                    MisiurewiczRelation rel;
                    rel.critical_index = 0;
                    rel.n0 = c.n0 + m + c.gdepth * k + int(c.prefix_base.size()) + 1;
                    cplx eta = -presqrt(c.zstar, dhat);
                    rel.z0 = c.n0 == 1 ? -c.zstar - presqrt(c.zstar, dhat)
                                       : c.z0 + presqrt(c.z0, eta);
                    rel.lambda_star = lam;
                    rel.newton_trace = trace;
                    SkewProduct fl = slice.at(lam);
                    cplx w2v = fixed_w(lam[0], lam[1], c.zstar, -c.w1_sign);
                    rel.target = make_periodic_orbit(fl, c.zstar, w2v, 1);
                    {
                        Jet1 L1 = Jet1::variable(lam[0], 2, 0), L2 = Jet1::variable(lam[1], 2, 1);
                        Jet1 F = stable_relation_F(*pd, L1, L2);
                        rel.residual = std::abs(F.v);
                        rel.dF = F.d;
                    }
                    rel.provenance = pd;

                    double dist = std::sqrt(std::norm(lam[0] - c.lam0[0]) +
                                            std::norm(lam[1] - c.lam0[1]));
                    if (dist > eps) {
                        diag << "k=" << k << " fam=" << fam << " m=" << m
                             << ": |lambda-lambda*|=" << dist << " > eps; ";
                        continue;
                    }
                    GoodnessReport g = goodness_audit(slice, rel);
                    if (!(g.g2_vertical_like && g.g3_base_ok && g.g4_simple && g.g5)) {
                        diag << "k=" << k << " fam=" << fam << " m=" << m << ": goodness g2="
                             << g.g2_vertical_like << " g3=" << g.g3_base_ok
                             << " g4=" << g.g4_simple << " g5=" << g.g5
                             << " angle=" << g.g5_angle << " res=" << rel.residual << "; ";
                        continue;
                    }
                    RankCertificate rc = independence_rank(slice, {seed, rel}, lam);
                    if (rc.rank < 2 || rc.sigma_min <= 1e-6) {
                        diag << "k=" << k << " fam=" << fam << " m=" << m
                             << ": sigma_min=" << rc.sigma_min << "; ";
                        continue;
                    }
                    return rel;
                }
                diag << "k=" << k << " fam=" << fam << " m=" << m << ": no convergence; ";
            }
    }
    throw SearchExhausted("second_relation_search: exhausted k<=" + std::to_string(k_max) +
                          " [" + diag.str() + "]");
}

} // namespace skewlab
