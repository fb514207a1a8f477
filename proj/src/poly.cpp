#include "skewlab/poly.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace skewlab {

namespace {

// Evaluate p and p' together.
std::pair<cplx, cplx> eval_with_deriv(const Polynomial& p, cplx x) {
    cplx v = p.c.back(), d = 0.0;
    for (int k = p.degree() - 1; k >= 0; --k) {
        d = d * x + v;
        v = v * x + p.c[k];
    }
    return {v, d};
}

double root_radius_bound(const Polynomial& p) {
    // Cauchy bound: 1 + max |a_k / a_n|
    double m = 0.0;
    for (int k = 0; k < p.degree(); ++k) m = std::max(m, std::abs(p.c[k]));
    return 1.0 + m / std::abs(p.lead());
}

} // namespace

std::vector<cplx> roots(const Polynomial& p, double tol) {
    Polynomial q = p;
    q.normalize(0.0);
    if (q.degree() < 1) throw RootsError("roots: degree must be >= 1");

    // Strip exact zero roots at the origin first (clustered roots there are
    // exact and common in this codebase: critical points of w^d + a(z)).
    std::vector<cplx> out;
    std::size_t nz = 0;
    while (nz + 1 < q.c.size() && q.c[nz] == cplx(0.0)) ++nz;
    if (nz > 0) {
        out.assign(nz, cplx(0.0));
        q.c.erase(q.c.begin(), q.c.begin() + nz);
    }
    int n = q.degree();
    if (n == 0) return out;
    if (n == 1) {
        out.push_back(-q.c[0] / q.c[1]);
        return out;
    }

    // Initial guesses: Newton circle with a deterministic random perturbation
    // (fixed internal seed; perturbation breaks symmetric stalls).
    double R = 0.5 * root_radius_bound(q);
    std::mt19937_64 rng(0x5eed0001ULL);
    std::uniform_real_distribution<double> U(-0.5, 0.5);
    std::vector<cplx> z(n);
    const double pi = std::numbers::pi;
    for (int k = 0; k < n; ++k) {
        double th = 2.0 * pi * (k + 0.25) / n + 0.42 + 0.15 * U(rng);
        double r = R * (1.0 + 0.1 * U(rng));
        z[k] = std::polar(r, th);
    }

    const int max_iter = 600;
    bool converged = false;
    for (int it = 0; it < max_iter && !converged; ++it) {
        converged = true;
        for (int k = 0; k < n; ++k) {
            auto [v, dv] = eval_with_deriv(q, z[k]);
            if (v == cplx(0.0)) continue;
            cplx ratio = (dv == cplx(0.0)) ? cplx(1e-16) : v / dv;
            cplx s = 0.0;
            for (int j = 0; j < n; ++j)
                if (j != k) s += cplx(1.0) / (z[k] - z[j]);
            cplx denom = cplx(1.0) - ratio * s;
            cplx step = (std::abs(denom) < 1e-300) ? ratio : ratio / denom;
            z[k] -= step;
            if (std::abs(step) > 1e-14 * (1.0 + std::abs(z[k]))) converged = false;
        }
    }

    // Residual check: |q(z)| / (|lc| (1+|z|)^n) <= tol, after a short Newton polish.
    double lc = std::abs(q.lead());
    for (int k = 0; k < n; ++k) {
        for (int it = 0; it < 4; ++it) {
            auto [v, dv] = eval_with_deriv(q, z[k]);
            if (std::abs(dv) < 1e-300) break;
            cplx step = v / dv;
            if (std::abs(step) > 0.5 * (1.0 + std::abs(z[k]))) break;
            z[k] -= step;
        }
        double scale = lc * std::pow(1.0 + std::abs(z[k]), n);
        if (!(std::abs(q(z[k])) <= tol * scale))
            throw RootsError("roots: no convergence (ill-conditioned polynomial)");
    }
    out.insert(out.end(), z.begin(), z.end());
    return out;
}

std::vector<std::pair<cplx, int>> clustered_roots(const Polynomial& p, double tol) {
    std::vector<cplx> r = roots(p, tol);
    std::vector<std::pair<cplx, int>> clusters;
    for (cplx z : r) clusters.emplace_back(z, 1);
    // Merge radius is multiplicity-aware: an m-fold root is only locatable to
    // ~eps^(1/m) in double precision, so two clusters whose union has total
    // multiplicity m may merge within 4*(1e-13)^(1/m)*(1+|z|); the floor is
    // the documented 1e-6*(1+|z|) simple-vs-multiple discrimination radius.
    for (int m = p.degree(); m >= 2; --m) {
        bool changed = true;
        while (changed) {
            changed = false;
            for (std::size_t i = 0; i < clusters.size() && !changed; ++i) {
                double scale = 1.0 + std::abs(clusters[i].first);
                double rad = std::max(1e-6, 4.0 * std::pow(1e-13, 1.0 / m)) * scale;
                std::vector<std::size_t> group;
                int total = 0;
                for (std::size_t j = 0; j < clusters.size(); ++j) {
                    if (std::abs(clusters[j].first - clusters[i].first) <= rad) {
                        group.push_back(j);
                        total += clusters[j].second;
                    }
                }
                if (group.size() < 2 || total != m) continue;
                cplx zc = 0.0;
                for (std::size_t j : group) zc += clusters[j].first * double(clusters[j].second);
                zc /= double(m);
                for (std::size_t g = group.size(); g-- > 1;)
                    clusters.erase(clusters.begin() + group[g]);
                clusters[group[0]] = {zc, m};
                changed = true;
            }
        }
    }
    return clusters;
}

namespace {

int degw(const BivarPoly& P) {
    int d = -1;
    for (std::size_t j = 0; j < P.size(); ++j)
        if (!P[j].is_zero()) d = static_cast<int>(j);
    return d;
}

int max_lambda_deg(const BivarPoly& P) {
    int d = 0;
    for (const auto& pj : P)
        if (!pj.is_zero()) d = std::max(d, pj.degree());
    return d;
}

// det of a complex matrix by partial-pivot LU; deterministic.
cplx det(std::vector<std::vector<cplx>> a) {
    int n = static_cast<int>(a.size());
    cplx d = 1.0;
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (std::abs(a[piv][col]) == 0.0) return 0.0;
        if (piv != col) {
            std::swap(a[piv], a[col]);
            d = -d;
        }
        d *= a[col][col];
        for (int r = col + 1; r < n; ++r) {
            cplx f = a[r][col] / a[col][col];
            for (int c2 = col; c2 < n; ++c2) a[r][c2] -= f * a[col][c2];
        }
    }
    return d;
}

// Sylvester determinant at a fixed lambda, P rows first, sign adjusted so that
// the product-formula normalization in the header holds.
cplx resultant_at(const BivarPoly& P, const BivarPoly& Q, int m, int n, cplx lam) {
    int N = m + n;
    std::vector<std::vector<cplx>> S(N, std::vector<cplx>(N, cplx(0.0)));
    // coefficient of w^j at this lambda
    auto pc = [&](int j) { return (j <= m && j < (int)P.size()) ? P[j](lam) : cplx(0.0); };
    auto qc = [&](int j) { return (j <= n && j < (int)Q.size()) ? Q[j](lam) : cplx(0.0); };
    for (int r = 0; r < n; ++r)
        for (int j = 0; j <= m; ++j) S[r][r + (m - j)] = pc(j);
    for (int r = 0; r < m; ++r)
        for (int j = 0; j <= n; ++j) S[n + r][r + (n - j)] = qc(j);
    cplx val = det(std::move(S));
    if ((m % 2) && (n % 2)) val = -val; // (-1)^{mn}: fix product-formula sign
    return val;
}

} // namespace

Polynomial resultant_w(const BivarPoly& P, const BivarPoly& Q, int size_cap) {
    int m = degw(P), n = degw(Q);
    if (m < 0 || n < 0) throw std::invalid_argument("resultant_w: zero polynomial");
    if (m + n > size_cap)
        throw DegreeOverflow("resultant_w: Sylvester matrix exceeds size cap");
    if (m == 0) { // Res(const-in-w, Q) = P0^n
        Polynomial r({cplx(1.0)});
        for (int i = 0; i < n; ++i) r = r * P[0];
        return r;
    }
    if (n == 0) {
        Polynomial r({cplx(1.0)});
        for (int i = 0; i < m; ++i) r = r * Q[0];
        return r;
    }

    // Evaluation/interpolation: the resultant is a lambda-polynomial of degree
    // at most D; sample on a circle of roots of unity and invert the DFT.
    int D = n * max_lambda_deg(P) + m * max_lambda_deg(Q);
    int N = D + 1;
    const double pi = std::numbers::pi;
    std::vector<cplx> vals(N);
    double maxval = 0.0;
    for (int j = 0; j < N; ++j) {
        cplx lam = std::polar(1.0, 2.0 * pi * j / N);
        vals[j] = resultant_at(P, Q, m, n, lam);
        maxval = std::max(maxval, std::abs(vals[j]));
    }
    std::vector<cplx> coef(N, cplx(0.0));
    for (int k = 0; k < N; ++k) {
        cplx s = 0.0;
        for (int j = 0; j < N; ++j) s += vals[j] * std::polar(1.0, -2.0 * pi * j * k / N);
        coef[k] = s / double(N);
    }
    // Drop pure interpolation noise.
    double eps = 1e-10 * std::max(1.0, maxval);
    for (auto& x : coef)
        if (std::abs(x) < eps) x = 0.0;
    Polynomial r(std::move(coef));
    return r;
}

} // namespace skewlab
