#include "skewlab/fields.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

namespace skewlab {

double fiber_potential(const ParameterSlice& slice, cplx z, const std::vector<cplx>& lambda,
                       const GreenConfig& gcfg) {
    SkewProduct f = slice.at(lambda);
    return fiber_critical_green_sum(f, z, gcfg, nullptr);
}

namespace {

GridField make_grid(int dim, const std::array<double, 4>& lo, const std::array<double, 4>& hi,
                    const std::array<int, 4>& res) {
    GridField g;
    g.dim = dim;
    g.lo = lo;
    g.hi = hi;
    g.res = res;
    for (int a = dim * 2; a < 4; ++a) g.res[a] = 1;
    g.values.assign(g.ncells(), 0.0);
    g.flags.assign(g.ncells(), 0);
    return g;
}

template <class Cell>
void evaluate_cells(GridField& g, bool parallel, Cell cell) {
    long n = long(g.ncells());
    if (parallel) {
#pragma omp parallel for schedule(dynamic, 16)
        for (long i = 0; i < n; ++i) cell(i);
    } else {
        for (long i = 0; i < n; ++i) cell(i);
    }
}

std::array<int, 4> unravel(const GridField& g, long idx) {
    std::array<int, 4> i{0, 0, 0, 0};
    for (int a = g.naxes() - 1; a >= 0; --a) {
        i[a] = idx % g.res[a];
        idx /= g.res[a];
    }
    return i;
}

} // namespace

GridField injected_field(int dim, const std::array<double, 4>& lo, const std::array<double, 4>& hi,
                         const std::array<int, 4>& res,
                         const std::function<double(const std::vector<cplx>&)>& h, bool parallel,
                         const std::string& kind) {
    GridField g = make_grid(dim, lo, hi, res);
    g.kind = kind;
    evaluate_cells(g, parallel, [&](long idx) {
        double v = h(g.lambda_at(unravel(g, idx)));
        g.values[idx] = std::isfinite(v) ? v : 0.0;
        if (!std::isfinite(v)) g.flags[idx] = 2;
    });
    return g;
}

GridField potential_field(const ParameterSlice& slice, const std::array<double, 4>& lo,
                          const std::array<double, 4>& hi, const std::array<int, 4>& res,
                          PotentialKind kind, const FieldConfig& cfg) {
    GridField g = make_grid(slice.dim(), lo, hi, res);
    switch (kind) {
        case PotentialKind::Lv: g.kind = "Lv"; break;
        case PotentialKind::FiberZ: g.kind = "fiber"; break;
        case PotentialKind::Lp: g.kind = "Lp"; break;
        case PotentialKind::Ltotal: g.kind = "Ltotal"; break;
    }
    // one mu_p sample reused across cells keeps cells comparable and the
    // evaluation deterministic regardless of scheduling
    std::vector<cplx> mu;
    if (kind == PotentialKind::Lv || kind == PotentialKind::Ltotal)
        mu = sample_mu_p(Polynomial(slice.base_point.base), cfg.sampler);

    evaluate_cells(g, cfg.parallel, [&](long idx) {
        std::vector<cplx> lam = g.lambda_at(unravel(g, idx));
        double v = 0.0;
        std::uint8_t fl = 0;
        try {
            SkewProduct f = slice.at(lam);
            switch (kind) {
                case PotentialKind::FiberZ:
                    v = fiber_critical_green_sum(f, cfg.fiber_z, cfg.green, nullptr);
                    break;
                case PotentialKind::Lp:
                    v = lyapunov_p(Polynomial(f.base), cfg.green).value;
                    break;
                case PotentialKind::Lv:
                case PotentialKind::Ltotal: {
                    LyapunovValue L = lyapunov_vertical_on_sample(f, mu, cfg.green);
                    if (L.undecided > 0) fl = 1;
                    v = L.value;
                    if (kind == PotentialKind::Ltotal)
                        v += lyapunov_p(Polynomial(f.base), cfg.green).value;
                    break;
                }
            }
        } catch (const std::exception&) {
            fl = 2;
        }
        g.values[idx] = std::isfinite(v) ? v : 0.0;
        if (!std::isfinite(v)) fl = 2;
        g.flags[idx] = fl;
    });
    return g;
}

GridField ddc_mass(const GridField& field) {
    if (field.dim != 1) throw std::invalid_argument("ddc_mass: dim-1 fields only");
    if (field.res[0] < 8 || field.res[1] < 8)
        throw std::invalid_argument("ddc_mass: resolution >= 8 required");
    GridField g = field;
    g.kind = field.kind + "_ddc";
    int nx = field.res[0], ny = field.res[1];
    double hx = field.step(0), hy = field.step(1);
    double area = hx * hy;
    auto at = [&](int i, int j) { return field.values[std::size_t(i) * ny + j]; };
    double scale = 0.0;
    for (double v : field.values) scale = std::max(scale, std::abs(v));
    double eps = 1e-9 * std::max(1.0, scale);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            std::size_t idx = std::size_t(i) * ny + j;
            if (i == 0 || j == 0 || i == nx - 1 || j == ny - 1) {
                g.values[idx] = 0.0;
                g.flags[idx] = 2;
                continue;
            }
            double lap = (at(i + 1, j) - 2 * at(i, j) + at(i - 1, j)) / (hx * hx) +
                         (at(i, j + 1) - 2 * at(i, j) + at(i, j - 1)) / (hy * hy);
            double m = lap * area / (2.0 * std::numbers::pi);
            if (m < 0.0 && m > -eps) m = 0.0;
            g.values[idx] = m;
        }
    return g;
}

GridField wedge_mass_2(const GridField& f1, const GridField& f2) {
    if (f1.dim != 2 || f2.dim != 2) throw std::invalid_argument("wedge_mass_2: dim-2 fields only");
    for (int a = 0; a < 4; ++a)
        if (f1.res[a] != f2.res[a] || f1.lo[a] != f2.lo[a] || f1.hi[a] != f2.hi[a])
            throw std::invalid_argument("wedge_mass_2: grids differ");
    GridField g = f1;
    g.kind = f1.kind + "_wedge_" + f2.kind;
    std::array<double, 4> h;
    for (int a = 0; a < 4; ++a) h[a] = f1.step(a);
    double vol = f1.cell_volume();
    const auto& r = f1.res;
    auto lin = [&](int i0, int i1, int i2, int i3) {
        return ((std::size_t(i0) * r[1] + i1) * r[2] + i2) * r[3] + i3;
    };
    // complex Hessian entries of one field at an interior cell:
    // hess[0] = h_{1 1bar}, hess[1] = h_{2 2bar}, hess[2] = h_{1 2bar}
    auto hessian = [&](const GridField& f, int i0, int i1, int i2, int i3, cplx out[3]) {
        const auto& v = f.values;
        auto V = [&](int a0, int a1, int a2, int a3) { return v[lin(a0, a1, a2, a3)]; };
        double c = V(i0, i1, i2, i3);
        double dxx = (V(i0 + 1, i1, i2, i3) - 2 * c + V(i0 - 1, i1, i2, i3)) / (h[0] * h[0]);
        double dyy = (V(i0, i1 + 1, i2, i3) - 2 * c + V(i0, i1 - 1, i2, i3)) / (h[1] * h[1]);
        double duu = (V(i0, i1, i2 + 1, i3) - 2 * c + V(i0, i1, i2 - 1, i3)) / (h[2] * h[2]);
        double dvv = (V(i0, i1, i2, i3 + 1) - 2 * c + V(i0, i1, i2, i3 - 1)) / (h[3] * h[3]);
        auto cross = [&](int a, int b) {
            std::array<int, 4> ip{i0, i1, i2, i3}, im = ip, ipm = ip, imp = ip;
            ip[a]++; ip[b]++; im[a]--; im[b]--; ipm[a]++; ipm[b]--; imp[a]--; imp[b]++;
            return (v[lin(ip[0], ip[1], ip[2], ip[3])] + v[lin(im[0], im[1], im[2], im[3])] -
                    v[lin(ipm[0], ipm[1], ipm[2], ipm[3])] - v[lin(imp[0], imp[1], imp[2], imp[3])]) /
                   (4.0 * h[a] * h[b]);
        };
        // d/dl1 = (dx - i dy)/2, d/dl1bar = (dx + i dy)/2 etc.
        out[0] = cplx(0.25 * (dxx + dyy), 0.0);
        out[1] = cplx(0.25 * (duu + dvv), 0.0);
        out[2] = 0.25 * cplx(cross(0, 2) + cross(1, 3), cross(0, 3) - cross(1, 2));
    };
    for (int i0 = 0; i0 < r[0]; ++i0)
        for (int i1 = 0; i1 < r[1]; ++i1)
            for (int i2 = 0; i2 < r[2]; ++i2)
                for (int i3 = 0; i3 < r[3]; ++i3) {
                    std::size_t idx = lin(i0, i1, i2, i3);
                    bool edge = i0 == 0 || i1 == 0 || i2 == 0 || i3 == 0 || i0 == r[0] - 1 ||
                                i1 == r[1] - 1 || i2 == r[2] - 1 || i3 == r[3] - 1;
                    if (edge) {
                        g.values[idx] = 0.0;
                        g.flags[idx] = 2;
                        continue;
                    }
                    cplx H1[3], H2[3];
                    hessian(f1, i0, i1, i2, i3, H1);
                    hessian(f2, i0, i1, i2, i3, H2);
                    double density = (H1[0] * H2[1] + H1[1] * H2[0]).real() -
                                     2.0 * (H1[2] * std::conj(H2[2])).real();
                    double m = density * vol;
                    if (!std::isfinite(m)) {
                        g.values[idx] = 0.0;
                        g.flags[idx] = 2;
                    } else {
                        g.values[idx] = m;
                        g.flags[idx] = std::max(f1.flags[idx], f2.flags[idx]);
                    }
                }
    return g;
}

double total_mass(const GridField& mass) {
    double s = 0.0;
    for (std::size_t i = 0; i < mass.values.size(); ++i)
        if (mass.flags[i] != 2) s += mass.values[i];
    return s;
}

std::vector<std::uint8_t> support_mask(const GridField& mass, double* tau_out) {
    std::size_t valid = 0;
    for (auto f : mass.flags)
        if (f != 2) ++valid;
    double tau = 1e-3 * (total_mass(mass) / std::max<std::size_t>(valid, 1));
    if (tau_out) *tau_out = tau;
    std::vector<std::uint8_t> mask(mass.values.size(), 0);
    for (std::size_t i = 0; i < mass.values.size(); ++i)
        mask[i] = (mass.flags[i] != 2 && mass.values[i] > tau) ? 1 : 0;
    return mask;
}

DecompositionCheck decomposition_residual(const ParameterSlice& slice,
                                          const std::vector<cplx>& lambda,
                                          const FieldConfig& cfg) {
    SkewProduct f = slice.at(lambda);
    std::vector<cplx> mu = sample_mu_p(Polynomial(f.base), cfg.sampler);
    LyapunovValue L = lyapunov_vertical_on_sample(f, mu, cfg.green);
    double mean = 0.0;
    for (cplx z : mu) mean += fiber_critical_green_sum(f, z, cfg.green, nullptr);
    mean /= double(mu.size());
    return {std::abs(L.value - std::log(double(f.d)) - mean), L.std_error};
}

namespace {

void write_meta(std::FILE* out, const GridField& f) {
    std::fprintf(out, "# kind=%s\n# dim=%d\n# cfg_hash=%s\n", f.kind.c_str(), f.dim,
                 f.cfg_hash.c_str());
    for (int a = 0; a < f.naxes(); ++a)
        std::fprintf(out, "# axis%d lo=%.17g hi=%.17g res=%d\n", a, f.lo[a], f.hi[a], f.res[a]);
}

} // namespace

void write_csv(const GridField& f, const std::string& path) {
    std::FILE* out = std::fopen(path.c_str(), "wb");
    if (!out) throw std::runtime_error("write_csv: cannot open " + path);
    write_meta(out, f);
    std::fprintf(out, "i0,i1,i2,i3,value,flag\r\n");
    std::array<int, 4> i{0, 0, 0, 0};
    for (std::size_t idx = 0; idx < f.values.size(); ++idx) {
        std::fprintf(out, "%d,%d,%d,%d,%.17g,%d\r\n", i[0], i[1], i[2], i[3], f.values[idx],
                     int(f.flags[idx]));
        for (int a = f.naxes() - 1; a >= 0; --a) {
            if (++i[a] < f.res[a]) break;
            i[a] = 0;
        }
    }
    std::fclose(out);
}

namespace {

// dim-2 fields are rendered as the central (axis0, axis2) plane
void plane_of(const GridField& f, int& W, int& H, std::function<double(int, int)>& get) {
    if (f.dim == 1) {
        W = f.res[0];
        H = f.res[1];
        get = [&f](int x, int y) { return f.values[std::size_t(x) * f.res[1] + y]; };
    } else {
        W = f.res[0];
        H = f.res[2];
        int j1 = f.res[1] / 2, j3 = f.res[3] / 2;
        get = [&f, j1, j3](int x, int y) {
            return f.values[((std::size_t(x) * f.res[1] + j1) * f.res[2] + y) * f.res[3] + j3];
        };
    }
}

} // namespace

void write_pgm16(const GridField& f, const std::string& path) {
    int W, H;
    std::function<double(int, int)> get;
    plane_of(f, W, H, get);
    double mn = 1e300, mx = -1e300;
    for (int x = 0; x < W; ++x)
        for (int y = 0; y < H; ++y) {
            mn = std::min(mn, get(x, y));
            mx = std::max(mx, get(x, y));
        }
    if (mx <= mn) mx = mn + 1.0;
    std::FILE* out = std::fopen(path.c_str(), "wb");
    if (!out) throw std::runtime_error("write_pgm16: cannot open " + path);
    std::fprintf(out, "P5\n# kind=%s min=%.17g max=%.17g cfg=%s\n%d %d\n65535\n", f.kind.c_str(),
                 mn, mx, f.cfg_hash.c_str(), W, H);
    for (int y = H - 1; y >= 0; --y)
        for (int x = 0; x < W; ++x) {
            double t = (get(x, y) - mn) / (mx - mn);
            unsigned v = unsigned(t * 65535.0 + 0.5);
            std::fputc((v >> 8) & 0xff, out);
            std::fputc(v & 0xff, out);
        }
    std::fclose(out);
}

void write_ppm(const GridField& f, const std::string& path) {
    int W, H;
    std::function<double(int, int)> get;
    plane_of(f, W, H, get);
    double mn = 1e300, mx = -1e300;
    for (int x = 0; x < W; ++x)
        for (int y = 0; y < H; ++y) {
            mn = std::min(mn, get(x, y));
            mx = std::max(mx, get(x, y));
        }
    if (mx <= mn) mx = mn + 1.0;
    std::FILE* out = std::fopen(path.c_str(), "wb");
    if (!out) throw std::runtime_error("write_ppm: cannot open " + path);
    std::fprintf(out, "P6\n# kind=%s min=%.17g max=%.17g\n%d %d\n255\n", f.kind.c_str(), mn, mx, W,
                 H);
    for (int y = H - 1; y >= 0; --y)
        for (int x = 0; x < W; ++x) {
            double t = (get(x, y) - mn) / (mx - mn);
            // simple blue->yellow ramp
            int r = int(255.0 * t + 0.5);
            int g = int(255.0 * t * t + 0.5);
            int b = int(255.0 * (1.0 - t) + 0.5);
            std::fputc(r, out);
            std::fputc(g, out);
            std::fputc(b, out);
        }
    std::fclose(out);
}

} // namespace skewlab
