#pragma once

#include <map>
#include <string>

#include <json.hpp>

#include "skewlab/fields.hpp"
#include "skewlab/ifs.hpp"
#include "skewlab/misiurewicz.hpp"

namespace skewlab {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr const char* kToolVersion = "skewlab 0.1.0";

// Flat key-value experiment configuration. Keys are dotted paths, values are
// whitespace-separated tokens; complex tokens are "re" or "re,im". Canonical
// form (sorted keys, single spacing) is what gets hashed, so any two configs
// with the same content share a hash regardless of formatting.
struct ExperimentConfig {
    std::map<std::string, std::string> kv;

    bool has(const std::string& key) const { return kv.count(key) != 0; }
    // accessors throw ConfigError on missing keys or malformed values
    std::string get_str(const std::string& key) const;
    std::string get_str(const std::string& key, const std::string& dflt) const;
    long get_int(const std::string& key) const;
    long get_int(const std::string& key, long dflt) const;
    double get_real(const std::string& key) const;
    double get_real(const std::string& key, double dflt) const;
    // tolerances: like get_real but must be strictly positive
    double get_tol(const std::string& key, double dflt) const;
    cplx get_cplx(const std::string& key) const;
    cplx get_cplx(const std::string& key, cplx dflt) const;
    std::vector<cplx> get_cplx_list(const std::string& key) const;
    std::vector<double> get_real_list(const std::string& key) const;
    std::vector<long> get_int_list(const std::string& key) const;

    std::string canonical() const; // sorted "key = value" lines
    std::string hash() const;      // FNV-1a 64 of the canonical form, hex
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// family.* keys -> parameter slice (base polynomial, degree, fiber a0 and
// direction polynomials of the unicritical family)
ParameterSlice slice_from_config(const ExperimentConfig& cfg);

// window.lo / window.hi / window.res for a dim-complex-dimensional grid
void window_from_config(const ExperimentConfig& cfg, int dim, std::array<double, 4>& lo,
                        std::array<double, 4>& hi, std::array<int, 4>& res);

SamplerConfig sampler_from_config(const ExperimentConfig& cfg);
GreenConfig green_from_config(const ExperimentConfig& cfg);

// JSON fragments shared by every command output
nlohmann::ordered_json meta_json(const ExperimentConfig& cfg);
nlohmann::ordered_json relation_json(const MisiurewiczRelation& rel, const GoodnessReport& g);
nlohmann::ordered_json audit_json(const IfsAudit& rep);

// Command drivers. Pure library functions (the CLI wraps them) so that
// determinism can be tested in-process. File-producing commands take an
// output prefix and record the produced paths in the returned JSON.
nlohmann::ordered_json run_lyap(const ExperimentConfig& cfg);
nlohmann::ordered_json run_render(const ExperimentConfig& cfg, const std::string& out_prefix);
nlohmann::ordered_json run_mis_search(const ExperimentConfig& cfg);
nlohmann::ordered_json run_second_relation(const ExperimentConfig& cfg);
nlohmann::ordered_json run_asymptotics(const ExperimentConfig& cfg, const std::string& out_prefix);
nlohmann::ordered_json run_ifs_audit(const ExperimentConfig& cfg);
nlohmann::ordered_json run_equality_experiment(const ExperimentConfig& cfg,
                                               const std::string& out_prefix);

// dd^c mass against the standard Kaehler form on a dim-2 field: trace of the
// complex Hessian (sum of the per-variable Laplacian densities) / (2 pi) x
// cell 4-volume; the dim-2 analogue of ddc_mass used by the equality overlay.
GridField ddc_trace_2(const GridField& field);

} // namespace skewlab
