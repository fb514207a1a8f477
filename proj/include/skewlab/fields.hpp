#pragma once

#include <array>
#include <functional>
#include <map>
#include <string>

#include "skewlab/measures.hpp"

namespace skewlab {

// Sampled real scalar field over a 1- or 2-complex-dimensional parameter
// window. dim 1 uses 2 real axes (Re lambda, Im lambda); dim 2 uses 4
// (Re l1, Im l1, Re l2, Im l2). Row-major, axis 0 slowest. Cell centers.
struct GridField {
    int dim = 1;
    std::array<double, 4> lo{}, hi{};
    std::array<int, 4> res{1, 1, 1, 1};
    std::vector<double> values;
    std::vector<std::uint8_t> flags; // 0 ok, 1 undecided, 2 invalid (edge/nan)
    std::string kind;
    std::string cfg_hash;

    int naxes() const { return 2 * dim; }
    std::size_t ncells() const {
        std::size_t n = 1;
        for (int a = 0; a < naxes(); ++a) n *= res[a];
        return n;
    }
    double step(int a) const { return (hi[a] - lo[a]) / res[a]; }
    double coord(int a, int i) const { return lo[a] + (i + 0.5) * step(a); }
    double cell_volume() const {
        double v = 1.0;
        for (int a = 0; a < naxes(); ++a) v *= step(a);
        return v;
    }
    std::size_t index(const std::array<int, 4>& i) const {
        std::size_t idx = 0;
        for (int a = 0; a < naxes(); ++a) idx = idx * res[a] + i[a];
        return idx;
    }
    std::vector<cplx> lambda_at(const std::array<int, 4>& i) const {
        std::vector<cplx> lam(dim);
        for (int c = 0; c < dim; ++c) lam[c] = cplx(coord(2 * c, i[2 * c]), coord(2 * c + 1, i[2 * c + 1]));
        return lam;
    }
};

enum class PotentialKind { Lv, FiberZ, Lp, Ltotal };

struct FieldConfig {
    SamplerConfig sampler;
    GreenConfig green;
    cplx fiber_z{0.0}; // base point for FiberZ
    bool parallel = true; // serial reference path kept for testing/benchmarks
};

// Potential inside the per-fiber dd^c: sum over fiber-critical points of the
// vertical green function, multiplicity counted.
double fiber_potential(const ParameterSlice& slice, cplx z, const std::vector<cplx>& lambda,
                       const GreenConfig& gcfg);

// Grid of the requested potential over the window. Deterministic for fixed
// cfg: identical per-cell work, fixed-order reduction.
GridField potential_field(const ParameterSlice& slice, const std::array<double, 4>& lo,
                          const std::array<double, 4>& hi, const std::array<int, 4>& res,
                          PotentialKind kind, const FieldConfig& cfg);

// Arbitrary analytic/test potential gridding (shares the evaluation driver).
GridField injected_field(int dim, const std::array<double, 4>& lo, const std::array<double, 4>& hi,
                         const std::array<int, 4>& res,
                         const std::function<double(const std::vector<cplx>&)>& h,
                         bool parallel = true, const std::string& kind = "injected");

// Discrete dd^c mass on a dim-1 field: 5-point Laplacian / (2 pi) x cell
// area; edge cells invalid; values in [-eps,0) clipped to 0.
GridField ddc_mass(const GridField& field);

// Mixed complex-Hessian wedge density on a dim-2 field pair:
//   h1_{11} h2_{22} + h1_{22} h2_{11} - 2 Re( h1_{12} conj(h2_{12}) )
// (bars on the second indices), centered differences, x cell 4-volume.
// Exact for quadratic potentials. Edge cells invalid, NaN cells flagged.
GridField wedge_mass_2(const GridField& f1, const GridField& f2);

// Support mask at the scale-free threshold tau = 1e-3 * (window mass / valid
// cell count); returns mask and tau through the out-param.
std::vector<std::uint8_t> support_mask(const GridField& mass, double* tau_out = nullptr);

// Total mass over valid cells.
double total_mass(const GridField& mass);

// |L_v - log d - mean_z fiber_potential| computed on one shared mu_p sample:
// the same estimator two ways, guarding implementation drift.
struct DecompositionCheck {
    double residual;
    double std_error;
};
DecompositionCheck decomposition_residual(const ParameterSlice& slice,
                                          const std::vector<cplx>& lambda, const FieldConfig& cfg);

// Serialization: '#'-prefixed meta lines (axes, extents, resolution, kind,
// cfg hash), then an RFC-4180 header row and rows of index/coordinate/value.
void write_csv(const GridField& f, const std::string& path);
// Lossless 16-bit PGM of a dim-1 field (dim-2 fields are written as the
// central plane in axes 0 and 2); min/max stored in the comment line.
void write_pgm16(const GridField& f, const std::string& path);
// 8-bit color ramp companion.
void write_ppm(const GridField& f, const std::string& path);

} // namespace skewlab
