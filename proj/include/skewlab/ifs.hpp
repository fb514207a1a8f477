#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

#include "skewlab/orbits.hpp"

namespace skewlab {

// Box over a finite union of base disks, with one fiber disk per component.
// Each fiber disk is required (and tested) to meet the sampled fiber Julia
// set over its component.
struct BoxComponent {
    cplx base_center;
    double base_radius;
    cplx fiber_center;
    double fiber_radius;
};

struct FibredBox {
    std::vector<BoxComponent> comps;

    // index of the component whose base disk contains z, nearest-center
    // tie-break; -1 when z is outside every base disk
    int component_of(cplx z) const {
        int best = -1;
        double bd = 1e300;
        for (std::size_t c = 0; c < comps.size(); ++c) {
            double d = std::abs(z - comps[c].base_center);
            if (d <= comps[c].base_radius && d < bd) {
                bd = d;
                best = int(c);
            }
        }
        return best;
    }
    bool contains(cplx z, cplx w) const {
        int c = component_of(z);
        return c >= 0 && std::abs(w - comps[c].fiber_center) <= comps[c].fiber_radius;
    }
};

// One symbolic inverse branch of f^n. Root choices are made by continuation
// from per-component anchor chains: at step k, the base preimage (then the
// fiber root) nearest the stored anchor is selected.
struct Branch {
    int base_id = 0; // branches with equal base_id share their base projection
    std::string label;
    std::vector<std::vector<cplx>> base_anchors; // [component][step]
    std::vector<cplx> fiber_anchors;             // [step], component independent
};

struct InverseBranchSystem {
    SkewProduct f;
    int n = 1; // branch depth: branches invert f^n
    FibredBox box;
    double alpha = 0.5;
    std::vector<Branch> branches;
};

struct RootAmbiguity : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NonVerticalLike : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The unique preimage of (z,w) under f^n selected by the branch. Residual
// |f^n(z',w') - (z,w)| <= 1e-10 (tested). Throws RootAmbiguity when the two
// fiber roots nearest the anchor are within 1e-8 of each other.
std::pair<cplx, cplx> apply_branch(const InverseBranchSystem& sys, int branch_id, cplx z, cplx w);

struct ConeCheck {
    bool ok = false;
    double margin = 0.0; // min over points of (image vertical ratio - alpha)
};

// Forward-invariance of the vertical cone |u_w| > alpha |u| under df at the
// given points. df is lower triangular, so the worst boundary vector is
// found in closed form: |v_w|_min = |dQdw| a - |dQdz| s with s = sqrt(1-a^2),
// and the margin is |v_w|_min / |v| - alpha.
ConeCheck check_cone(const SkewProduct& f, const std::vector<std::pair<cplx, cplx>>& points,
                     double alpha);
ConeCheck check_cone(const InverseBranchSystem& sys,
                     const std::vector<std::pair<cplx, cplx>>& points, double alpha);

struct IfsAudit {
    bool v1 = false; // cone preserved + vertical expansion on the limit set
    bool v2 = false; // every branch has a partner with the same base projection
    bool v3 = false; // some pair of branches has disjoint base projections
    double cone_margin = 0.0;
    double expansion_margin = 0.0; // min |dQdw product| - 1 on sampled words
    double nesting_margin = 0.0;   // min distance of branch images to the box boundary
    double base_gap = 0.0;         // min distance between the V3 pair's base projections
    double roundtrip_max = 0.0;    // max |f^n(g(x)) - x| over samples
    bool branches_nested = false;
};
IfsAudit audit_V123(const InverseBranchSystem& sys);

// Images of the box center under `count` random words of the given length.
// Deterministic for fixed seed.
std::vector<std::pair<cplx, cplx>> limit_points(const InverseBranchSystem& sys, int word_length,
                                                int count, std::uint64_t seed);

// Newton-refined fixed point of the word's branch composition, returned as a
// repelling periodic orbit of f with period n * |word|. Throws
// NonVerticalLike when |B| <= |A| (signals a bad box).
PeriodicOrbit periodic_in_limit(const InverseBranchSystem& sys, const std::vector<int>& word);

// Depth-2, 4-branch example system over p = z^2 - 1 with fiber
// q_z(w) = w^2 - 12 + 0.1 z: a two-disk base horseshoe around the fixed
// points (1±sqrt 5)/2, two base branches x two fiber root signs.
InverseBranchSystem make_fixed_point_horseshoe(double alpha = 0.5);

} // namespace skewlab
