#pragma once

#include <complex>
#include <vector>

namespace skewlab {

using cplx = std::complex<double>;

// First-order forward-mode jet: value plus partial derivatives along a fixed
// set of tracked parameter directions. The partials vector length is constant
// through any computation; mixing jets of different widths is a logic error.
struct Jet1 {
    cplx v{};
    std::vector<cplx> d;

    Jet1() = default;
    Jet1(cplx value) : v(value) {}
    Jet1(cplx value, std::vector<cplx> partials) : v(value), d(std::move(partials)) {}

    static Jet1 constant(cplx value, std::size_t nvars) {
        return Jet1(value, std::vector<cplx>(nvars, cplx(0.0)));
    }
    static Jet1 variable(cplx value, std::size_t nvars, std::size_t idx) {
        Jet1 j = constant(value, nvars);
        j.d[idx] = 1.0;
        return j;
    }
    std::size_t nvars() const { return d.size(); }
};

inline Jet1 operator+(const Jet1& a, const Jet1& b) {
    Jet1 r(a.v + b.v, a.d.empty() ? b.d : a.d);
    if (!a.d.empty() && !b.d.empty())
        for (std::size_t i = 0; i < r.d.size(); ++i) r.d[i] = a.d[i] + b.d[i];
    return r;
}
inline Jet1 operator-(const Jet1& a, const Jet1& b) {
    Jet1 r(a.v - b.v, a.d);
    if (a.d.empty()) { r.d.assign(b.d.size(), cplx(0.0)); }
    for (std::size_t i = 0; i < b.d.size(); ++i) r.d[i] -= b.d[i];
    return r;
}
inline Jet1 operator-(const Jet1& a) {
    Jet1 r(-a.v, a.d);
    for (auto& x : r.d) x = -x;
    return r;
}
inline Jet1 operator*(const Jet1& a, const Jet1& b) {
    std::size_t n = std::max(a.d.size(), b.d.size());
    Jet1 r(a.v * b.v, std::vector<cplx>(n, cplx(0.0)));
    for (std::size_t i = 0; i < a.d.size(); ++i) r.d[i] += a.d[i] * b.v;
    for (std::size_t i = 0; i < b.d.size(); ++i) r.d[i] += a.v * b.d[i];
    return r;
}
inline Jet1 operator/(const Jet1& a, const Jet1& b) {
    std::size_t n = std::max(a.d.size(), b.d.size());
    Jet1 r(a.v / b.v, std::vector<cplx>(n, cplx(0.0)));
    // (a/b)' = (a' b - a b') / b^2
    for (std::size_t i = 0; i < a.d.size(); ++i) r.d[i] += a.d[i] / b.v;
    for (std::size_t i = 0; i < b.d.size(); ++i) r.d[i] -= a.v * b.d[i] / (b.v * b.v);
    return r;
}

// scalar mixes
inline Jet1 operator+(const Jet1& a, cplx c) { Jet1 r = a; r.v += c; return r; }
inline Jet1 operator+(cplx c, const Jet1& a) { return a + c; }
inline Jet1 operator-(const Jet1& a, cplx c) { Jet1 r = a; r.v -= c; return r; }
inline Jet1 operator-(cplx c, const Jet1& a) { return -a + c; }
inline Jet1 operator*(const Jet1& a, cplx c) {
    Jet1 r(a.v * c, a.d);
    for (auto& x : r.d) x *= c;
    return r;
}
inline Jet1 operator*(cplx c, const Jet1& a) { return a * c; }
inline Jet1 operator/(const Jet1& a, cplx c) { return a * (cplx(1.0) / c); }
inline Jet1 operator/(cplx c, const Jet1& a) {
    Jet1 r(c / a.v, a.d);
    for (auto& x : r.d) x = -c * x / (a.v * a.v);
    return r;
}
inline Jet1 operator*(const Jet1& a, double c) { return a * cplx(c); }
inline Jet1 operator*(double c, const Jet1& a) { return a * cplx(c); }
inline Jet1 operator+(const Jet1& a, double c) { return a + cplx(c); }
inline Jet1 operator-(const Jet1& a, double c) { return a - cplx(c); }

inline Jet1 sqrt(const Jet1& a) {
    cplx s = std::sqrt(a.v);
    Jet1 r(s, a.d);
    for (auto& x : r.d) x = x / (2.0 * s);
    return r;
}

inline cplx value_of(const Jet1& j) { return j.v; }
inline cplx value_of(cplx z) { return z; }
inline double abs_of(const Jet1& j) { return std::abs(j.v); }
inline double abs_of(cplx z) { return std::abs(z); }

} // namespace skewlab
