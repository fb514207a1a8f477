#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "skewlab/jet.hpp"

namespace skewlab {

// Dense complex polynomial, coeffs[k] = coefficient of x^k.
// Normalized: trailing (leading-power) zeros trimmed, degree = size-1 >= 0.
struct Polynomial {
    std::vector<cplx> c;

    Polynomial() : c{cplx(0.0)} {}
    explicit Polynomial(std::vector<cplx> coeffs) : c(std::move(coeffs)) { normalize(); }

    void normalize(double tol = 0.0) {
        while (c.size() > 1 && std::abs(c.back()) <= tol) c.pop_back();
        if (c.empty()) c.push_back(cplx(0.0));
    }
    int degree() const { return static_cast<int>(c.size()) - 1; }
    cplx lead() const { return c.back(); }
    bool is_zero() const { return c.size() == 1 && c[0] == cplx(0.0); }

    template <class X>
    X operator()(const X& x) const {
        X acc = x * cplx(0.0) + c.back();
        for (int k = degree() - 1; k >= 0; --k) acc = acc * x + c[k];
        return acc;
    }

    Polynomial derivative() const {
        if (degree() == 0) return Polynomial();
        std::vector<cplx> d(c.size() - 1);
        for (std::size_t k = 1; k < c.size(); ++k) d[k - 1] = double(k) * c[k];
        return Polynomial(std::move(d));
    }
};

inline Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    std::vector<cplx> r(std::max(a.c.size(), b.c.size()), cplx(0.0));
    for (std::size_t i = 0; i < a.c.size(); ++i) r[i] += a.c[i];
    for (std::size_t i = 0; i < b.c.size(); ++i) r[i] += b.c[i];
    return Polynomial(std::move(r));
}
inline Polynomial operator-(const Polynomial& a, const Polynomial& b) {
    std::vector<cplx> r(std::max(a.c.size(), b.c.size()), cplx(0.0));
    for (std::size_t i = 0; i < a.c.size(); ++i) r[i] += a.c[i];
    for (std::size_t i = 0; i < b.c.size(); ++i) r[i] -= b.c[i];
    return Polynomial(std::move(r));
}
inline Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    std::vector<cplx> r(a.c.size() + b.c.size() - 1, cplx(0.0));
    for (std::size_t i = 0; i < a.c.size(); ++i)
        for (std::size_t j = 0; j < b.c.size(); ++j) r[i + j] += a.c[i] * b.c[j];
    return Polynomial(std::move(r));
}
inline Polynomial operator*(const Polynomial& a, cplx s) {
    Polynomial r = a;
    for (auto& x : r.c) x *= s;
    r.normalize();
    return r;
}

// q(p(x)) by Horner over polynomial arithmetic.
inline Polynomial compose(const Polynomial& outer, const Polynomial& inner) {
    Polynomial acc({outer.c.back()});
    for (int k = outer.degree() - 1; k >= 0; --k) {
        acc = acc * inner;
        acc.c[0] += outer.c[k];
        acc.normalize();
    }
    return acc;
}

inline Polynomial from_roots(const std::vector<cplx>& roots) {
    Polynomial p({cplx(1.0)});
    for (cplx r : roots) p = p * Polynomial({-r, cplx(1.0)});
    return p;
}

struct RootsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// All complex roots (with multiplicity, reported by clustering) via
// Aberth-Ehrlich simultaneous iteration. Residual guarantee:
// |p(root)| / (lc * (1+|root|)^deg) <= tol.
std::vector<cplx> roots(const Polynomial& p, double tol = 1e-12);

// Roots grouped into clusters of radius 1e-6*(1+|root|); returns (center, multiplicity).
std::vector<std::pair<cplx, int>> clustered_roots(const Polynomial& p, double tol = 1e-12);

// Bivariate polynomial in (lambda, w): w_coeffs[j] is the lambda-polynomial
// coefficient of w^j.
using BivarPoly = std::vector<Polynomial>;

struct DegreeOverflow : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Resultant in w of two bivariate polynomials, as a polynomial in lambda.
// Sylvester-determinant based (P rows first), with the overall sign fixed so
// that the product formula holds exactly:
//     Res_w(P,Q) = lc_w(Q)^{deg_w P} * prod_{Q(beta)=0} P(beta).
// (The standard P-rows-first determinant differs from this by (-1)^{mn};
// neither normalization is canonical, this one is the documented choice.)
Polynomial resultant_w(const BivarPoly& P, const BivarPoly& Q, int size_cap = 256);

} // namespace skewlab
