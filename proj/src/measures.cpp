#include "skewlab/measures.hpp"

#include <cmath>
#include <random>

namespace skewlab {

namespace {

// Preimages of y under p: roots of p(z) - y.
std::vector<cplx> preimages(const Polynomial& p, cplx y) {
    Polynomial q = p;
    q.c[0] -= y;
    q.normalize();
    return roots(q, 1e-11);
}

const cplx kGenericStart(0.43612178, 0.77240392);

} // namespace

std::vector<cplx> sample_mu_p(const Polynomial& p, const SamplerConfig& cfg) {
    if (p.degree() < 2) throw std::invalid_argument("sample_mu_p: degree must be >= 2");
    std::mt19937_64 rng(cfg.seed);
    std::vector<cplx> out;
    out.reserve(cfg.n_samples);
    cplx z = kGenericStart;
    int stuck = 0, restarts = 0;
    for (int k = 0; k < cfg.burn_in + cfg.n_samples; ++k) {
        std::vector<cplx> pre = preimages(p, z);
        std::uniform_int_distribution<std::size_t> pick(0, pre.size() - 1);
        cplx zn = pre[pick(rng)];
        // exceptional-start guard: a finite backward orbit pins the chain
        if (std::abs(zn - z) < 1e-13 * (1.0 + std::abs(z))) {
            if (++stuck > 8) {
                if (++restarts > 4)
                    throw std::runtime_error("sample_mu_p: persistent exceptional start");
                z = kGenericStart + cplx(0.31 * restarts, -0.17 * restarts);
                stuck = 0;
                k = -1; // restart the walk
                out.clear();
                continue;
            }
        } else {
            stuck = 0;
        }
        z = zn;
        if (k >= cfg.burn_in) out.push_back(z);
    }
    return out;
}

std::vector<cplx> sample_fiber_julia(const SkewProduct& f, cplx z, const SamplerConfig& cfg) {
    Polynomial p(f.base);
    std::vector<cplx> base_orbit(cfg.depth + 1);
    base_orbit[0] = z;
    for (int k = 1; k <= cfg.depth; ++k) base_orbit[k] = p(base_orbit[k - 1]);

    std::vector<cplx> out;
    out.reserve(cfg.n_samples);
    for (int s = 0; s < cfg.n_samples; ++s) {
        std::mt19937_64 rng(cfg.seed ^ (0x9e3779b97f4a7c15ULL * (s + 1)));
        cplx w = kGenericStart * 0.73; // generic fiber start over p^depth(z)
        for (int k = cfg.depth; k >= 1; --k) {
            // pull back through q_{z'} where z' = p^{k-1}(z)
            std::vector<cplx> qc = f.fiber_coeffs_at(base_orbit[k - 1]);
            qc[0] -= w;
            Polynomial qw(std::move(qc));
            std::vector<cplx> pre = roots(qw, 1e-11);
            std::uniform_int_distribution<std::size_t> pick(0, pre.size() - 1);
            w = pre[pick(rng)];
        }
        out.push_back(w);
    }
    return out;
}

double fiber_critical_green_sum(const SkewProduct& f, cplx z, const GreenConfig& gcfg,
                                int* undecided) {
    std::vector<cplx> qc = f.fiber_coeffs_at(z);
    Polynomial qw(std::move(qc));
    Polynomial dq = qw.derivative();
    double s = 0.0;
    for (auto& [c, mult] : clustered_roots(dq, 1e-11)) {
        GreenValue g = green_vertical(f, z, c, gcfg);
        s += mult * g.value;
        if (g.undecided && undecided) ++*undecided;
    }
    return s;
}

LyapunovValue lyapunov_p(const Polynomial& p, const GreenConfig& gcfg) {
    LyapunovValue L;
    L.value = std::log(double(p.degree()));
    for (auto& [c, mult] : clustered_roots(p.derivative(), 1e-11)) {
        GreenValue g = green_base(p, c, gcfg);
        L.value += mult * g.value;
        if (g.undecided) ++L.undecided;
    }
    return L;
}

LyapunovValue lyapunov_vertical_on_sample(const SkewProduct& f, const std::vector<cplx>& mu_sample,
                                          const GreenConfig& gcfg) {
    int n = static_cast<int>(mu_sample.size());
    std::vector<double> vals(n);
    std::vector<int> und(n, 0);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        try {
            vals[i] = fiber_critical_green_sum(f, mu_sample[i], gcfg, &und[i]);
        } catch (const std::exception&) {
            vals[i] = 0.0;
            und[i] = 1; // root-finder failure surfaces as an undecided fiber
        }
    }

    LyapunovValue L;
    double mean = 0.0;
    for (int i = 0; i < n; ++i) {
        mean += vals[i];
        L.undecided += und[i];
    }
    mean /= n;
    L.value = std::log(double(f.d)) + mean;

    // batch means over 16 contiguous batches
    const int nb = 16;
    if (n >= nb) {
        int bs = n / nb;
        double bm[nb], bvar = 0.0, bmean = 0.0;
        for (int b = 0; b < nb; ++b) {
            double s = 0.0;
            for (int i = b * bs; i < (b + 1) * bs; ++i) s += vals[i];
            bm[b] = s / bs;
            bmean += bm[b];
        }
        bmean /= nb;
        for (int b = 0; b < nb; ++b) bvar += (bm[b] - bmean) * (bm[b] - bmean);
        bvar /= (nb - 1);
        L.std_error = std::sqrt(bvar / nb);
    }
    return L;
}

LyapunovValue lyapunov_vertical(const SkewProduct& f, const SamplerConfig& cfg,
                                const GreenConfig& gcfg) {
    std::vector<cplx> zs = sample_mu_p(Polynomial(f.base), cfg);
    return lyapunov_vertical_on_sample(f, zs, gcfg);
}

} // namespace skewlab
