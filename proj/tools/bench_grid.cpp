// Benchmark of the grid-field kernel: OpenMP-parallel vs the serial
// reference path on the same window, with a bit-identical output check.
#include <chrono>
#include <cstdio>
#include <cstring>

#include "skewlab/fields.hpp"

using namespace skewlab;

namespace {

double run_once(const ParameterSlice& slice, const std::array<double, 4>& lo,
                const std::array<double, 4>& hi, const std::array<int, 4>& res, FieldConfig cfg,
                bool parallel, GridField* out) {
    cfg.parallel = parallel;
    auto t0 = std::chrono::steady_clock::now();
    *out = potential_field(slice, lo, hi, res, PotentialKind::Lv, cfg);
    auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count();
}

} // namespace

int main(int argc, char** argv) {
    int n = argc > 1 ? std::atoi(argv[1]) : 48;
    // quadratic family over p = z^2 - 1, the standard one-parameter slice
    ParameterSlice slice = unicritical_slice(Polynomial({cplx(-1.0), cplx(0.0), cplx(1.0)}), 2,
                                             Polynomial(), {Polynomial({cplx(1.0)})});
    std::array<double, 4> lo{-2.0, -1.6, 0, 0}, hi{1.2, 1.6, 0, 0};
    std::array<int, 4> res{n, n, 1, 1};
    FieldConfig cfg;
    cfg.sampler = SamplerConfig{200, 24, 11, 48};
    cfg.green = GreenConfig{10.0, 160};

    GridField serial, parallel;
    // warm-up pass so thread-pool spin-up is not billed to the first run
    run_once(slice, lo, hi, res, cfg, true, &parallel);

    double ts = run_once(slice, lo, hi, res, cfg, false, &serial);
    double tp = run_once(slice, lo, hi, res, cfg, true, &parallel);

    bool identical = serial.values.size() == parallel.values.size() &&
                     std::memcmp(serial.values.data(), parallel.values.data(),
                                 serial.values.size() * sizeof(double)) == 0 &&
                     serial.flags == parallel.flags;

    std::printf("grid %dx%d, %d samples x depth %d per cell\n", n, n, cfg.sampler.n_samples,
                cfg.sampler.depth);
    std::printf("%-10s %10s\n", "variant", "seconds");
    std::printf("%-10s %10.3f\n", "serial", ts);
    std::printf("%-10s %10.3f\n", "parallel", tp);
    std::printf("speedup    %10.2fx\n", tp > 0 ? ts / tp : 0.0);
    std::printf("outputs bit-identical: %s\n", identical ? "yes" : "NO");
    return identical ? 0 : 1;
}
