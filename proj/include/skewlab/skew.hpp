#pragma once

#include <optional>
#include <stdexcept>

#include "skewlab/poly.hpp"

namespace skewlab {

// Degree-d regular polynomial skew product f(z,w) = (p(z), q(z,w)), with the
// fiber stored as w-coefficients, each a polynomial in z. T is the coefficient
// scalar (cplx for concrete maps, Jet1 when coefficients carry d/dlambda).
template <class T>
struct SkewT {
    std::vector<T> base;              // p coefficients, ascending in z
    std::vector<std::vector<T>> fiber; // fiber[j] = z-coeffs of the w^j term
    int d = 0;

    template <class Z>
    Z base_eval(const Z& z) const {
        Z acc = z * cplx(0.0) + base.back();
        for (int k = int(base.size()) - 2; k >= 0; --k) acc = acc * z + base[k];
        return acc;
    }
    template <class Z>
    Z base_deriv(const Z& z) const {
        if (base.size() < 2) return z * cplx(0.0);
        Z acc = z * cplx(0.0) + base.back() * double(base.size() - 1);
        for (int k = int(base.size()) - 2; k >= 1; --k) acc = acc * z + base[k] * double(k);
        return acc;
    }
    template <class Z>
    std::vector<Z> fiber_coeffs_at(const Z& z) const {
        std::vector<Z> c(fiber.size(), z * cplx(0.0));
        for (std::size_t j = 0; j < fiber.size(); ++j) {
            if (fiber[j].empty()) continue;
            Z acc = z * cplx(0.0) + fiber[j].back();
            for (int k = int(fiber[j].size()) - 2; k >= 0; --k) acc = acc * z + fiber[j][k];
            c[j] = acc;
        }
        return c;
    }
    // q(z, w)
    template <class Z>
    Z fiber_eval(const Z& z, const Z& w) const {
        auto c = fiber_coeffs_at(z);
        Z acc = c.back();
        for (int j = int(c.size()) - 2; j >= 0; --j) acc = acc * w + c[j];
        return acc;
    }
    // dq/dw (z, w)
    template <class Z>
    Z fiber_dw(const Z& z, const Z& w) const {
        auto c = fiber_coeffs_at(z);
        Z acc = c.back() * double(c.size() - 1);
        for (int j = int(c.size()) - 2; j >= 1; --j) acc = acc * w + c[j] * double(j);
        return acc;
    }
    // dq/dz (z, w)
    template <class Z>
    Z fiber_dz(const Z& z, const Z& w) const {
        Z acc = z * cplx(0.0);
        Z wp = z * cplx(0.0) + cplx(1.0);
        for (std::size_t j = 0; j < fiber.size(); ++j) {
            if (fiber[j].size() >= 2) {
                Z dc = z * cplx(0.0) + fiber[j].back() * double(fiber[j].size() - 1);
                for (int k = int(fiber[j].size()) - 2; k >= 1; --k)
                    dc = dc * z + fiber[j][k] * double(k);
                acc = acc + dc * wp;
            }
            wp = wp * w;
        }
        return acc;
    }
};

using SkewProduct = SkewT<cplx>;

// Normal form: q = w^d + sum_{j<=d-2} A_j(z) w^j (w^d coeff 1, w^{d-1} absent).
bool is_normal_form(const SkewProduct& f, double tol = 1e-12);

// Affine fiber conjugacy (w -> s*w + t(z)) taking a regular skew product to
// normal form. Throws if the w^d coefficient is non-constant or zero.
SkewProduct to_normal_form(const SkewProduct& f);

// Unicritical family member: f = (p, w^d + a(z)).
SkewProduct make_unicritical(const Polynomial& p, int d, const Polynomial& a);

// Affine slice lambda -> skew product: base_point + sum lambda_i * dirs_i,
// applied to the flattened (base, fiber) coefficient arrays. Directions must
// be shape-compatible (same base degree and fiber coefficient shapes, zeros
// where untouched). In practice directions only move the A_j coefficients.
struct ParameterSlice {
    SkewProduct base_point;
    std::vector<SkewProduct> dirs; // same shape; entries are deltas
    int dim() const { return static_cast<int>(dirs.size()); }

    SkewProduct at(const std::vector<cplx>& lambda) const;
    // Coefficients as width-dim jets seeded with d/dlambda_i.
    SkewT<Jet1> at_jet(const std::vector<cplx>& lambda) const;
};

// Unicritical slice over p: a(z) = a0(z) + sum lambda_i * a_dir_i(z).
ParameterSlice unicritical_slice(const Polynomial& p, int d, const Polynomial& a0,
                                 const std::vector<Polynomial>& a_dirs);

struct EscapedToInfinity : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// f^n(z,w) = (p^n(z), Q^n_z(w)). Throws EscapedToInfinity past 1e150.
template <class T, class Z>
std::pair<Z, Z> iterate(const SkewT<T>& f, Z z, Z w, int n) {
    for (int k = 0; k < n; ++k) {
        Z zn = f.base_eval(z);
        w = f.fiber_eval(z, w);
        z = zn;
        if (abs_of(z) > 1e150 || abs_of(w) > 1e150)
            throw EscapedToInfinity("iterate: orbit escaped past overflow guard");
    }
    return {z, w};
}

// Ordered product of the per-step lower-triangular differentials
//   [ p'(z)      0     ]
//   [ dq/dz   dq/dw    ]
struct OrbitJacobian {
    cplx dp{1.0};
    cplx dQdw{1.0};
    cplx dQdz{0.0};
};

template <class T, class Z>
struct OrbitJacobianT {
    Z dp, dQdw, dQdz;
};

OrbitJacobian orbit_jacobian(const SkewProduct& f, cplx z, cplx w, int n);

// Jet-valued variant (coefficients carrying d/dlambda partials).
OrbitJacobianT<Jet1, Jet1> orbit_jacobian_jet(const SkewT<Jet1>& f, Jet1 z, Jet1 w, int n);

struct GreenConfig {
    double escape_radius = 10.0;
    int max_iter = 256;
};

struct GreenValue {
    double value = 0.0;
    bool undecided = false; // max_iter hit, no escape, no bounded certificate
    int escape_n = -1;
};

// Non-autonomous vertical escape rate lim d^{-n} log|Q^n_z(w)|.
GreenValue green_vertical(const SkewProduct& f, cplx z, cplx w, const GreenConfig& cfg);

// One-dimensional escape rate for the base polynomial.
GreenValue green_base(const Polynomial& p, cplx z, const GreenConfig& cfg);

// Certified escape radius C1 + C2*|lambda|^{1/d} for the unicritical family
// w^d + a(z) over a Julia-set sample of p: every |w| above it strictly grows
// under every fiber map over the sample. a_from_lambda gives a(z) at the
// queried parameter; monomial_gains[i] = max over the sample of the i-th
// a-direction's modulus (precomputed from the slice).
struct EscapeRadius {
    double C1, C2, radius;
};
EscapeRadius escape_radius_unicritical(const ParameterSlice& slice,
                                       const std::vector<cplx>& lambda,
                                       const std::vector<cplx>& julia_sample);

} // namespace skewlab
