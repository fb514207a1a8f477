#include "skewlab/ifs.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace skewlab {

namespace {

cplx nearest_root(const std::vector<cplx>& rs, cplx anchor) {
    cplx best = rs[0];
    double bd = 1e300;
    for (cplx r : rs) {
        double d = std::abs(r - anchor);
        if (d < bd) {
            bd = d;
            best = r;
        }
    }
    return best;
}

} // namespace

std::pair<cplx, cplx> apply_branch(const InverseBranchSystem& sys, int branch_id, cplx z, cplx w) {
    const Branch& br = sys.branches.at(branch_id);
    int c = sys.box.component_of(z);
    if (c < 0) throw std::invalid_argument("apply_branch: point outside the box base");
    Polynomial p(sys.f.base);
    for (int k = 0; k < sys.n; ++k) {
        Polynomial pk = p;
        pk.c[0] -= z;
        pk.normalize();
        cplx zp = nearest_root(roots(pk, 1e-12), br.base_anchors[c][k]);

        std::vector<cplx> qc = sys.f.fiber_coeffs_at(zp);
        qc[0] -= w;
        std::vector<cplx> wr = roots(Polynomial(std::move(qc)), 1e-12);
        // the two roots nearest the anchor must be well separated
        std::sort(wr.begin(), wr.end(), [&](cplx a, cplx b) {
            return std::abs(a - br.fiber_anchors[k]) < std::abs(b - br.fiber_anchors[k]);
        });
        if (wr.size() > 1 && std::abs(wr[0] - wr[1]) < 1e-8)
            throw RootAmbiguity("apply_branch: fiber roots closer than 1e-8");
        z = zp;
        w = wr[0];
    }
    return {z, w};
}

ConeCheck check_cone(const SkewProduct& f, const std::vector<std::pair<cplx, cplx>>& points,
                     double alpha) {
    double s = std::sqrt(1.0 - alpha * alpha);
    ConeCheck out;
    out.margin = 1e300;
    for (auto [z, w] : points) {
        double dp = std::abs(f.base_deriv(z));
        double qw = std::abs(f.fiber_dw(z, w));
        double qz = std::abs(f.fiber_dz(z, w));
        double v2 = qw * alpha - qz * s; // min |image vertical part| on the cone boundary
        double m;
        if (v2 <= 0.0) {
            m = -alpha;
        } else {
            m = v2 / std::hypot(dp * s, v2) - alpha;
        }
        out.margin = std::min(out.margin, m);
    }
    if (points.empty()) out.margin = 0.0;
    out.ok = out.margin > 1e-6;
    return out;
}

ConeCheck check_cone(const InverseBranchSystem& sys,
                     const std::vector<std::pair<cplx, cplx>>& points, double alpha) {
    return check_cone(sys.f, points, alpha);
}

namespace {

// deterministic box sample: rings in base and fiber per component
std::vector<std::pair<cplx, cplx>> box_sample(const FibredBox& box) {
    std::vector<std::pair<cplx, cplx>> pts;
    const double bt[] = {0.0, 0.6, 0.95};
    const double ft[] = {0.0, 0.95};
    const double tau = 6.283185307179586;
    for (const auto& c : box.comps)
        for (double rb : bt)
            for (int k = 0; k < 16; ++k) {
                cplx z = c.base_center +
                         rb * c.base_radius * std::polar(1.0, tau * k / 16 + 0.05);
                if (rb == 0.0 && k > 0) continue;
                for (double rf : ft)
                    for (int j = 0; j < 8; ++j) {
                        cplx w = c.fiber_center +
                                 rf * c.fiber_radius * std::polar(1.0, tau * j / 8 + 0.11);
                        if (rf == 0.0 && j > 0) continue;
                        pts.emplace_back(z, w);
                    }
            }
    return pts;
}

} // namespace

std::vector<std::pair<cplx, cplx>> limit_points(const InverseBranchSystem& sys, int word_length,
                                                int count, std::uint64_t seed) {
    std::vector<std::pair<cplx, cplx>> out;
    out.reserve(count);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick(0, int(sys.branches.size()) - 1);
    for (int s = 0; s < count; ++s) {
        cplx z = sys.box.comps[0].base_center;
        cplx w = sys.box.comps[0].fiber_center;
        for (int k = 0; k < word_length; ++k) std::tie(z, w) = apply_branch(sys, pick(rng), z, w);
        out.emplace_back(z, w);
    }
    return out;
}

IfsAudit audit_V123(const InverseBranchSystem& sys) {
    IfsAudit rep;
    auto pts = box_sample(sys.box);

    // nesting + round trip, and per-branch base projections for V3
    rep.nesting_margin = 1e300;
    rep.roundtrip_max = 0.0;
    std::vector<std::vector<cplx>> proj(sys.branches.size());
    bool nested = true;
    for (std::size_t b = 0; b < sys.branches.size(); ++b) {
        for (auto [z, w] : pts) {
            auto [zp, wp] = apply_branch(sys, int(b), z, w);
            proj[b].push_back(zp);
            auto [zf, wf] = iterate(sys.f, zp, wp, sys.n);
            rep.roundtrip_max =
                std::max(rep.roundtrip_max, std::max(std::abs(zf - z), std::abs(wf - w)));
            int c = sys.box.component_of(zp);
            if (c < 0) {
                nested = false;
                rep.nesting_margin = std::min(rep.nesting_margin, -1.0);
                continue;
            }
            const BoxComponent& bc = sys.box.comps[c];
            double m = std::min(bc.base_radius - std::abs(zp - bc.base_center),
                                bc.fiber_radius - std::abs(wp - bc.fiber_center));
            rep.nesting_margin = std::min(rep.nesting_margin, m);
        }
    }
    rep.branches_nested = nested && rep.nesting_margin > 0.0;

    // V2: partner with identical base choice sequence
    rep.v2 = true;
    for (std::size_t i = 0; i < sys.branches.size(); ++i) {
        bool has = false;
        for (std::size_t j = 0; j < sys.branches.size(); ++j)
            if (i != j && sys.branches[i].base_id == sys.branches[j].base_id) has = true;
        rep.v2 = rep.v2 && has;
    }

    // V3: some pair with different base ids; measure the projection gap
    rep.v3 = false;
    rep.base_gap = 0.0;
    for (std::size_t i = 0; i < sys.branches.size() && !rep.v3; ++i)
        for (std::size_t j = i + 1; j < sys.branches.size() && !rep.v3; ++j) {
            if (sys.branches[i].base_id == sys.branches[j].base_id) continue;
            double gap = 1e300;
            for (cplx a : proj[i])
                for (cplx b : proj[j]) gap = std::min(gap, std::abs(a - b));
            if (gap > 0.0) {
                rep.v3 = true;
                rep.base_gap = gap;
            }
        }

    // V1: cone + vertical expansion at sampled limit points
    auto lim = limit_points(sys, 8, 64, 20240801u);
    ConeCheck cone = check_cone(sys, lim, sys.alpha);
    rep.cone_margin = cone.margin;
    rep.expansion_margin = 1e300;
    for (auto [z, w] : lim) {
        OrbitJacobian J = orbit_jacobian(sys.f, z, w, 3 * sys.n);
        rep.expansion_margin = std::min(rep.expansion_margin, std::abs(J.dQdw) - 1.0);
    }
    rep.v1 = cone.ok && rep.expansion_margin > 0.0 && rep.branches_nested;
    return rep;
}

PeriodicOrbit periodic_in_limit(const InverseBranchSystem& sys, const std::vector<int>& word) {
    cplx z = sys.box.comps[0].base_center;
    cplx w = sys.box.comps[0].fiber_center;
    // contraction phase: iterate the word composition to near its fixed point
    for (int it = 0; it < 60; ++it)
        for (int b : word) std::tie(z, w) = apply_branch(sys, b, z, w);
    int N = sys.n * int(word.size());
    // Newton on f^N(x) - x with the lower-triangular orbit jacobian
    for (int it = 0; it < 50; ++it) {
        auto [zf, wf] = iterate(sys.f, z, w, N);
        cplx rz = zf - z, rw = wf - w;
        if (std::abs(rz) + std::abs(rw) <= 1e-13 * (1.0 + std::abs(w))) break;
        OrbitJacobian J = orbit_jacobian(sys.f, z, w, N);
        cplx dz = -rz / (J.dp - 1.0);
        cplx dw = -(rw + J.dQdz * dz) / (J.dQdw - 1.0);
        z += dz;
        w += dw;
    }
    PeriodicOrbit o = make_periodic_orbit(sys.f, z, w, N);
    if (!o.vertical_like)
        throw NonVerticalLike("periodic_in_limit: |B| <= |A| at a word fixed point");
    return o;
}

InverseBranchSystem make_fixed_point_horseshoe(double alpha) {
    const double r5 = std::sqrt(5.0);
    const cplx zs((1.0 + r5) / 2.0, 0.0);  // repelling fixed point, p'(zs) = 1+r5
    const cplx psi((1.0 - r5) / 2.0, 0.0); // the other fixed point
    InverseBranchSystem sys;
    sys.f.d = 2;
    sys.f.base = {cplx(-1.0), cplx(0.0), cplx(1.0)};               // z^2 - 1
    sys.f.fiber = {{cplx(-12.0), cplx(0.1)}, {cplx(0.0)}, {cplx(1.0)}}; // w^2 - 12 + 0.1 z
    sys.n = 2;
    sys.alpha = alpha;
    double fr = std::sqrt(12.0); // fiber anchor modulus
    sys.box.comps = {{zs, 0.85, cplx(0.0), 4.2}, {psi, 1.25, cplx(0.0), 4.2}};

    // base branch u: contracts toward zs. On the psi component the chain
    // runs psi <- -psi <- sqrt(1-psi), landing near 1.272 inside the zs disk.
    std::vector<std::vector<cplx>> u_anch = {{zs, zs}, {-psi, std::sqrt(1.0 - psi)}};
    // base branch v: contracts toward psi. From the zs component the chain
    // runs zs <- -zs <- -i sqrt(zs-1), landing inside the psi disk.
    std::vector<std::vector<cplx>> v_anch = {{-zs, cplx(0.0, -std::sqrt(zs.real() - 1.0))},
                                             {psi, psi}};
    for (int s = 0; s < 2; ++s) {
        double sign = s == 0 ? 1.0 : -1.0;
        std::vector<cplx> fa = {cplx(sign * fr), cplx(sign * fr)};
        sys.branches.push_back({0, s == 0 ? "u+" : "u-", u_anch, fa});
        sys.branches.push_back({1, s == 0 ? "v+" : "v-", v_anch, fa});
    }
    return sys;
}

} // namespace skewlab
