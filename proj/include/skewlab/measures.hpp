#pragma once

#include <cstdint>

#include "skewlab/skew.hpp"

namespace skewlab {

struct SamplerConfig {
    int n_samples = 512;
    int depth = 32; // pullback length per sample (fiber sampler)
    std::uint64_t seed = 1;
    int burn_in = 64;
};

// Backward-orbit sampler for the max-entropy measure of p: iterate uniformly
// random inverse branches from a non-exceptional start, discard burn_in.
// Deterministic given the seed.
std::vector<cplx> sample_mu_p(const Polynomial& p, const SamplerConfig& cfg);

// Fiber Julia-set sampler over z: pick the forward base orbit z ... p^depth(z),
// start from a fiber point over the far end and pull w back through uniformly
// random roots of q_{z'}(.) = w along the chain. One independent chain per
// sample (sub-seeded), deterministic given the seed.
std::vector<cplx> sample_fiber_julia(const SkewProduct& f, cplx z, const SamplerConfig& cfg);

struct LyapunovValue {
    double value = 0.0;
    double std_error = 0.0; // batch-means (16 batches); 0 for closed sums
    int undecided = 0;      // green-function Undecided count
};

// L_p = log d + sum over critical points (with multiplicity) of G_p.
LyapunovValue lyapunov_p(const Polynomial& p, const GreenConfig& gcfg);

// L_v = log d + int ( sum_{q'_z(w)=0} G(z,w) ) dmu_p(z), Monte-Carlo over a
// mu_p sample; critical points counted with multiplicity.
LyapunovValue lyapunov_vertical(const SkewProduct& f, const SamplerConfig& cfg,
                                const GreenConfig& gcfg);

// Same integrand evaluated on a caller-provided mu_p sample (used by the
// decomposition consistency check, which must reuse one sample set).
LyapunovValue lyapunov_vertical_on_sample(const SkewProduct& f, const std::vector<cplx>& mu_sample,
                                          const GreenConfig& gcfg);

// Sum over the fiber-critical points of the vertical green function at one z.
double fiber_critical_green_sum(const SkewProduct& f, cplx z, const GreenConfig& gcfg,
                                int* undecided = nullptr);

} // namespace skewlab
