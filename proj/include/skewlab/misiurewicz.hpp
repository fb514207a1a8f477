#pragma once

#include <memory>

#include "skewlab/ifs.hpp"
#include "skewlab/orbits.hpp"

namespace skewlab {

struct BranchJumpRisk : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct LostRepelling : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NoConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct PersistentRelation : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SearchExhausted : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct HypothesisViolated : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// All fiber points of period dividing m over a base point of p-period m:
// roots of Q^m_{z1}(w) - w (degree d^m, capped). With exact_only, points
// whose exact (z,w)-period is a proper divisor of m are dropped.
std::vector<PeriodicOrbit> periodic_points_fiber(const SkewProduct& f, cplx z1, int m,
                                                 bool exact_only = true, int cap = 4096);

// Predictor-corrector continuation of a repelling orbit along the straight
// parameter path from -> to. Each sub-step is accepted only when the first
// Newton correction stays below a quarter of the distance to the nearest
// other period-m point (basin guard); a violating sub-step is bisected, at
// most 6 levels deep, then BranchJumpRisk is thrown. LostRepelling fires
// when |B| drops below 1.05.
PeriodicOrbit track_periodic(const ParameterSlice& slice, const PeriodicOrbit& orbit,
                             const std::vector<cplx>& lambda_from,
                             const std::vector<cplx>& lambda_to, int steps);

struct SecondRelationData; // preperiodic provenance, defined below

// Critical-orbit relation Q^{n0}_{lambda,z0}(c(lambda)) = w1(lambda) at
// lambda_star, where c follows a simple root of dq/dw(z0, .) and w1 is the
// tracked repelling fiber point of the target cycle.
struct MisiurewiczRelation {
    cplx z0{0.0};
    int critical_index = 0; // index into the sorted critical roots at z0
    int n0 = 1;
    PeriodicOrbit target;            // evaluated at lambda_star
    std::vector<cplx> lambda_star;
    double residual = 0.0;
    std::vector<double> newton_trace; // |step| per Newton iteration
    std::vector<cplx> dF;             // gradient at the solution (non-persistence witness)
    // set only for relations produced by second_relation_search; carries the
    // backward-chain combinatorics needed to re-evaluate F stably
    std::shared_ptr<const SecondRelationData> provenance;
};

// Newton (1-D) or Gauss-Newton (k-D, minimum-norm step) on
// F(lambda) = Q^{n0}(c(lambda)) - w1(lambda), all derivatives by jets.
MisiurewiczRelation solve_misiurewicz(const ParameterSlice& slice, cplx z0, int critical_index,
                                      int n0, const PeriodicOrbit& target,
                                      const std::vector<cplx>& lambda_init, double tol = 1e-11);

// Landing residuals F_i(lambda) of several relations with their full
// complex Jacobian J[i][j] = dF_i / dlambda_j.
struct TupleMap {
    std::vector<cplx> F;
    std::vector<std::vector<cplx>> J;
};
TupleMap relation_tuple_map(const ParameterSlice& slice,
                            const std::vector<MisiurewiczRelation>& relations,
                            const std::vector<cplx>& lambda);

// Rank certificate: SVD of the tuple-map Jacobian. sigma_min is the k-th
// largest singular value (the certificate that the k relations cut out a
// codimension-k set when it clears rank_tol).
struct RankCertificate {
    int rank = 0;
    double sigma_min = 0.0;
    std::vector<double> singular_values;
    std::vector<std::vector<cplx>> jacobian;
};
RankCertificate independence_rank(const ParameterSlice& slice,
                                  const std::vector<MisiurewiczRelation>& relations,
                                  const std::vector<cplx>& lambda, double rank_tol = 1e-6);

// Singular values of a small complex matrix (rows x cols), descending.
// One-sided Jacobi; exposed for testing.
std::vector<double> singular_values(const std::vector<std::vector<cplx>>& A);

struct GoodnessReport {
    std::vector<cplx> g1_dB; // gradient of the target multiplier B along the slice
    bool g1 = false;         // dB != 0
    bool g2_vertical_like = false;
    bool g3_base_ok = false; // (p^{n0})'(z0) != 0 and z0 not on the target cycle
    bool g4_simple = false;  // followed critical root is simple
    double g5_angle = 0.0;   // postcritical tangent vs nearest eigendirection of df^m
    bool g5 = false;
    bool s1 = false;         // same witness as g1
    bool s2 = false;         // log B not on the real line through log A
    double s2_gap = 0.0;     // min over real t of |log B - t log A|
    bool all_good() const { return g1 && g2_vertical_like && g3_base_ok && g4_simple && g5; }
};
GoodnessReport goodness_audit(const ParameterSlice& slice, const MisiurewiczRelation& relation);

// Non-vertical eigenvector (1, v2) of the cycle differential df^m, from the
// closed-form quotient v2 = dQdz / (A - B); exact eigenvector of the
// lower-triangular orbit Jacobian.
cplx nonvertical_v2(const SkewProduct& f, const PeriodicOrbit& orbit);

// Second coordinate u2 of the image direction of df^{n0} at (z0, c), i.e.
// dQ^{n0}dz(z0, c) / (p^{n0})'(z0).
cplx postcritical_u2(const SkewProduct& f, cplx z0, cplx c, int n0);

// Searches for a second, independent relation near a good seed relation:
// enumerates backward-chain points (z_k, w_{k,i}) through the branch system,
// pushes the postcritical graph over the m_k-fold base preimage of z_k
// forward by m_k fiber steps (m_k set by the annulus 0.5 <= |.| <= 2), and
// solves phi_k = w_{k,i} by 1-D Newton on a parameter disk inside the seed
// hypersurface, transverse to a level set of B. First candidate passing
// G2-G5 plus a rank-2 certificate against the seed wins (deterministic
// enumeration order). Throws SearchExhausted with the derivative-growth
// diagnostic when no candidate verifies.
MisiurewiczRelation second_relation_search(const ParameterSlice& slice,
                                           const MisiurewiczRelation& seed,
                                           const InverseBranchSystem& branch_system, double eps,
                                           int k_max = 6);

// Diagnostic mode of the same machinery: |dphi_k/dlambda| at the seed
// parameter (along the in-hypersurface unit direction) against m_k, with the
// log-log regression slope.
struct SearchDiagnostic {
    std::vector<int> m_k;
    std::vector<double> dphi_abs;
    double slope = 0.0;
};
SearchDiagnostic second_relation_diagnostic(const ParameterSlice& slice,
                                            const MisiurewiczRelation& seed,
                                            const InverseBranchSystem& branch_system, int k_min,
                                            int k_max);

// Jacobian of the vertical multiplier map lambda -> (B_1(lambda), ...,
// B_k(lambda)) for repelling orbits of pairwise distinct periods, with its
// smallest singular value.
struct MultiplierJacobian {
    std::vector<std::vector<cplx>> J; // J[i][j] = dB_i / dlambda_j
    double sigma_min = 0.0;
};
MultiplierJacobian multiplier_map_jacobian(const ParameterSlice& slice,
                                           const std::vector<PeriodicOrbit>& orbits,
                                           const std::vector<cplx>& lambda);

// Symbolic check (d = 2, m = 3): the directional derivative of the composed
// return map under constant per-step perturbations r_1, r_2, r_3, taken at
// the pure-power point, is r_3 + 2 w^4 r_2 + 4 w^6 r_1 - monomials of
// distinct degrees, so the differential is injective.
struct InjectivityClaim {
    bool injective = false;
    std::vector<Polynomial> columns; // dQ_3/d(eps r_j) as polynomials in w
};
InjectivityClaim multiplier_claim_d2_m3();

// Asymptotic exponents along rays to infinity in the unicritical family
// w^d + a(z) over p = z^2, slice a(z) = lambda_1 + lambda_2 z:
//   FiberModulus - |w| ~ |lambda|^{1/d} for bounded-orbit fiber points
//   V2           - non-vertical eigenvector slope, O(|lambda|^{1/d})
//   U2           - postcritical image slope, ~ |lambda|^{(n(d-1)+1)/d}
//   Multiplier   - cycle multiplier |B| ~ |lambda|^{m(d-1)/d}
// V2/U2/Multiplier are evaluated on relation solutions re-solved at each
// magnitude (the relation hypersurface is unbounded; the solved points drift
// toward a(z0) relatively small). Nondegeneracy of the ray direction is
// checked and HypothesisViolated thrown otherwise.
enum class AsymptoticQuantity { FiberModulus, V2, U2, Multiplier };

struct AsymptoticFit {
    double slope = 0.0;
    double intercept = 0.0;
    std::vector<double> log_mag;   // log10 |lambda|
    std::vector<double> log_value; // log10 of the measured quantity
};
// The ray is lambda(s) = s * (ray1, ray2); for the relation-based quantities
// lambda_2 = s * ray2 is fixed per magnitude and lambda_1 re-solved onto the
// relation hypersurface.
AsymptoticFit unicritical_asymptotics(AsymptoticQuantity quantity, int n0,
                                      const std::vector<double>& magnitudes,
                                      cplx ray1 = cplx(1.0), cplx ray2 = cplx(1.0));

// Two-family inverse branch system over the base fixed point (1+sqrt5)/2 of
// p = z^2 - 1 for a quadratic fiber w^2 + a(z): one base branch (iterated
// principal preimage), two fiber words of the given letter count sharing it.
// Anchors are derived from a(zstar) at the given map.
InverseBranchSystem make_quadratic_search_system(const SkewProduct& f, int letters = 3,
                                                 double box_radius = 0.25, double alpha = 0.95);

// Backward-chain provenance of a relation found by second_relation_search
// over the quadratic family p = z^2 - 1, a(z) = lambda_1 + lambda_2 z.
// Fiber square roots along the chains are resolved against stored reference
// values (root nearest the reference), which keeps every evaluation a
// holomorphic function of lambda near the solution.
struct SecondRelationData {
    cplx zstar;                    // repelling base fixed point (target base)
    cplx z0_seed;                  // seed relation's critical fiber
    int n0_seed = 2;               // seed landing time
    int w1_sign = 1;               // branch of the target fixed point sqrt
    int k = 0;                     // G-word applications
    int family = 0;                // which of the two fiber families (0/1)
    int m_k = 0;                   // linearization escape time
    int gdepth = 3;                // letters per G word
    std::vector<cplx> prefix_base; // approach chain base points (into the box)
    cplx w3_ref{0.0};              // fiber reference over -zstar
    std::vector<cplx> prefix_refs; // fiber references along the approach chain
    std::vector<std::vector<cplx>> g_refs; // per family, per letter fiber references
    cplx delta_box;                // base deviation from zstar at box entry
    std::vector<cplx> e, ep;       // in-hypersurface frame used by the Newton disk
    cplx t_star{0.0};              // accepted disk coordinate
};

} // namespace skewlab
