#include "skewlab/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace skewlab {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

double parse_real(const std::string& tok, const std::string& key) {
    try {
        std::size_t pos = 0;
        double v = std::stod(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: bad number '" + tok + "' in " + key);
    }
}

// "re" or "re,im"
cplx parse_cplx(const std::string& tok, const std::string& key) {
    std::size_t c = tok.find(',');
    if (c == std::string::npos) return cplx(parse_real(tok, key));
    return cplx(parse_real(tok.substr(0, c), key), parse_real(tok.substr(c + 1), key));
}

std::vector<cplx> parse_cplx_tokens(const std::string& v, const std::string& key) {
    std::vector<cplx> out;
    for (const auto& t : split_ws(v)) out.push_back(parse_cplx(t, key));
    if (out.empty()) throw ConfigError("config: empty value for " + key);
    return out;
}

nlohmann::ordered_json cplx_json(cplx z) { return {z.real(), z.imag()}; }

nlohmann::ordered_json cplx_list_json(const std::vector<cplx>& v) {
    nlohmann::ordered_json a = nlohmann::ordered_json::array();
    for (cplx z : v) a.push_back(cplx_json(z));
    return a;
}

void write_mask_field(const GridField& mass, const std::vector<std::uint8_t>& mask,
                      const std::string& path) {
    GridField m = mass;
    m.kind = mass.kind + "_mask";
    for (std::size_t i = 0; i < m.values.size(); ++i) m.values[i] = mask[i] ? 1.0 : 0.0;
    write_csv(m, path);
}

} // namespace

std::string ExperimentConfig::get_str(const std::string& key) const {
    auto it = kv.find(key);
    if (it == kv.end()) throw ConfigError("config: missing key " + key);
    return it->second;
}

std::string ExperimentConfig::get_str(const std::string& key, const std::string& dflt) const {
    auto it = kv.find(key);
    return it == kv.end() ? dflt : it->second;
}

long ExperimentConfig::get_int(const std::string& key) const {
    double v = parse_real(get_str(key), key);
    long n = long(std::llround(v));
    if (double(n) != v) throw ConfigError("config: " + key + " must be an integer");
    return n;
}

long ExperimentConfig::get_int(const std::string& key, long dflt) const {
    return has(key) ? get_int(key) : dflt;
}

double ExperimentConfig::get_real(const std::string& key) const {
    return parse_real(get_str(key), key);
}

double ExperimentConfig::get_real(const std::string& key, double dflt) const {
    return has(key) ? get_real(key) : dflt;
}

double ExperimentConfig::get_tol(const std::string& key, double dflt) const {
    double v = get_real(key, dflt);
    if (!(v > 0.0)) throw ConfigError("config: tolerance " + key + " must be positive");
    return v;
}

cplx ExperimentConfig::get_cplx(const std::string& key) const {
    return parse_cplx(get_str(key), key);
}

cplx ExperimentConfig::get_cplx(const std::string& key, cplx dflt) const {
    return has(key) ? get_cplx(key) : dflt;
}

std::vector<cplx> ExperimentConfig::get_cplx_list(const std::string& key) const {
    return parse_cplx_tokens(get_str(key), key);
}

std::vector<double> ExperimentConfig::get_real_list(const std::string& key) const {
    std::vector<double> out;
    for (const auto& t : split_ws(get_str(key))) out.push_back(parse_real(t, key));
    if (out.empty()) throw ConfigError("config: empty value for " + key);
    return out;
}

std::vector<long> ExperimentConfig::get_int_list(const std::string& key) const {
    std::vector<long> out;
    for (double v : get_real_list(key)) {
        long n = long(std::llround(v));
        if (double(n) != v) throw ConfigError("config: " + key + " must be integers");
        out.push_back(n);
    }
    return out;
}

std::string ExperimentConfig::canonical() const {
    std::ostringstream out;
    for (const auto& [k, v] : kv) {
        std::string cv;
        for (const auto& t : split_ws(v)) {
            if (!cv.empty()) cv += ' ';
            cv += t;
        }
        out << k << " = " << cv << "\n";
    }
    return out.str();
}

std::string ExperimentConfig::hash() const {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : canonical()) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t hash_pos = line.find('#');
        if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
        line = trim(line);
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: line " + std::to_string(lineno) + " has no '='");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty() || key.find(' ') != std::string::npos)
            throw ConfigError("config: bad key at line " + std::to_string(lineno));
        if (cfg.kv.count(key))
            throw ConfigError("config: duplicate key " + key);
        cfg.kv[key] = val;
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

ParameterSlice slice_from_config(const ExperimentConfig& cfg) {
    Polynomial base(cfg.get_cplx_list("family.base"));
    int d = int(cfg.get_int("family.d"));
    if (d < 2) throw ConfigError("config: family.d must be >= 2");
    Polynomial a0(cfg.get_cplx_list("family.a0"));
    std::string dirs_raw = cfg.get_str("family.dirs");
    std::vector<Polynomial> dirs;
    std::size_t start = 0;
    while (start <= dirs_raw.size()) {
        std::size_t bar = dirs_raw.find('|', start);
        std::string part =
            bar == std::string::npos ? dirs_raw.substr(start) : dirs_raw.substr(start, bar - start);
        dirs.emplace_back(parse_cplx_tokens(part, "family.dirs"));
        if (bar == std::string::npos) break;
        start = bar + 1;
    }
    return unicritical_slice(base, d, a0, dirs);
}

void window_from_config(const ExperimentConfig& cfg, int dim, std::array<double, 4>& lo,
                        std::array<double, 4>& hi, std::array<int, 4>& res) {
    auto lov = cfg.get_real_list("window.lo");
    auto hiv = cfg.get_real_list("window.hi");
    auto rev = cfg.get_int_list("window.res");
    std::size_t n = std::size_t(2 * dim);
    if (lov.size() != n || hiv.size() != n || rev.size() != n)
        throw ConfigError("config: window lists need " + std::to_string(n) + " entries");
    lo = {0, 0, 0, 0};
    hi = {0, 0, 0, 0};
    res = {1, 1, 1, 1};
    for (std::size_t a = 0; a < n; ++a) {
        lo[a] = lov[a];
        hi[a] = hiv[a];
        res[a] = int(rev[a]);
        if (!(hi[a] > lo[a]) || res[a] < 1)
            throw ConfigError("config: degenerate window on axis " + std::to_string(a));
    }
}

SamplerConfig sampler_from_config(const ExperimentConfig& cfg) {
    SamplerConfig s;
    s.n_samples = int(cfg.get_int("sampler.samples", 512));
    s.depth = int(cfg.get_int("sampler.depth", 28));
    s.seed = std::uint64_t(cfg.get_int("sampler.seed", 1));
    s.burn_in = int(cfg.get_int("sampler.burnin", 64));
    if (s.n_samples < 1 || s.depth < 1) throw ConfigError("config: sampler sizes must be >= 1");
    return s;
}

GreenConfig green_from_config(const ExperimentConfig& cfg) {
    GreenConfig g;
    g.escape_radius = cfg.get_tol("green.radius", 10.0);
    g.max_iter = int(cfg.get_int("green.maxiter", 256));
    if (g.max_iter < 1) throw ConfigError("config: green.maxiter must be >= 1");
    return g;
}

nlohmann::ordered_json meta_json(const ExperimentConfig& cfg) {
    nlohmann::ordered_json m;
    m["version"] = kToolVersion;
    m["cfg_hash"] = cfg.hash();
    nlohmann::ordered_json tol;
    tol["solver"] = cfg.get_tol("tol.solver", 1e-11);
    tol["rank"] = cfg.get_tol("tol.rank", 1e-6);
    tol["green_radius"] = cfg.get_tol("green.radius", 10.0);
    m["tolerances"] = tol;
    return m;
}

nlohmann::ordered_json relation_json(const MisiurewiczRelation& rel, const GoodnessReport& g) {
    nlohmann::ordered_json j;
    j["z0"] = cplx_json(rel.z0);
    j["critical_index"] = rel.critical_index;
    j["n0"] = rel.n0;
    j["lambda_star"] = cplx_list_json(rel.lambda_star);
    j["residual"] = rel.residual;
    j["newton_steps"] = rel.newton_trace.size();
    j["dF"] = cplx_list_json(rel.dF);
    nlohmann::ordered_json t;
    t["z1"] = cplx_json(rel.target.z1);
    t["w1"] = cplx_json(rel.target.w1);
    t["m"] = rel.target.m;
    t["A"] = cplx_json(rel.target.A);
    t["B"] = cplx_json(rel.target.B);
    t["vertical_like"] = rel.target.vertical_like;
    j["target"] = t;
    nlohmann::ordered_json gg;
    gg["g1"] = g.g1;
    gg["g2_vertical_like"] = g.g2_vertical_like;
    gg["g3_base_ok"] = g.g3_base_ok;
    gg["g4_simple"] = g.g4_simple;
    gg["g5"] = g.g5;
    gg["g5_angle"] = g.g5_angle;
    gg["s1"] = g.s1;
    gg["s2"] = g.s2;
    gg["s2_gap"] = g.s2_gap;
    j["goodness"] = gg;
    if (rel.provenance) {
        nlohmann::ordered_json p;
        p["k"] = rel.provenance->k;
        p["family"] = rel.provenance->family;
        p["m_k"] = rel.provenance->m_k;
        p["gdepth"] = rel.provenance->gdepth;
        p["t_star"] = cplx_json(rel.provenance->t_star);
        j["provenance"] = p;
    }
    return j;
}

nlohmann::ordered_json audit_json(const IfsAudit& rep) {
    nlohmann::ordered_json j;
    j["v1"] = rep.v1;
    j["v2"] = rep.v2;
    j["v3"] = rep.v3;
    j["cone_margin"] = rep.cone_margin;
    j["expansion_margin"] = rep.expansion_margin;
    j["nesting_margin"] = rep.nesting_margin;
    j["base_gap"] = rep.base_gap;
    j["roundtrip_max"] = rep.roundtrip_max;
    j["branches_nested"] = rep.branches_nested;
    return j;
}

nlohmann::ordered_json run_lyap(const ExperimentConfig& cfg) {
    ParameterSlice slice = slice_from_config(cfg);
    std::vector<cplx> lam = cfg.get_cplx_list("lambda");
    if (int(lam.size()) != slice.dim())
        throw ConfigError("config: lambda length does not match the slice dimension");
    SkewProduct f = slice.at(lam);
    SamplerConfig sc = sampler_from_config(cfg);
    GreenConfig gc = green_from_config(cfg);

    LyapunovValue lp = lyapunov_p(Polynomial(f.base), gc);
    LyapunovValue lv = lyapunov_vertical(f, sc, gc);

    nlohmann::ordered_json j = meta_json(cfg);
    j["command"] = "lyap";
    j["lambda"] = cplx_list_json(lam);
    j["L_p"] = {{"value", lp.value}, {"std_error", lp.std_error}, {"undecided", lp.undecided}};
    j["L_v"] = {{"value", lv.value}, {"std_error", lv.std_error}, {"undecided", lv.undecided}};
    return j;
}

nlohmann::ordered_json run_render(const ExperimentConfig& cfg, const std::string& out_prefix) {
    std::string kind = cfg.get_str("render.kind", "lv");
    GridField field;
    int dim;
    if (kind == "injected-harmonic") {
        dim = int(cfg.get_int("render.dim", 1));
        std::array<double, 4> lo, hi;
        std::array<int, 4> res;
        window_from_config(cfg, dim, lo, hi, res);
        field = injected_field(dim, lo, hi, res,
                               [](const std::vector<cplx>& l) { return (l[0] * l[0]).real(); },
                               true, "injected_harmonic");
    } else {
        ParameterSlice slice = slice_from_config(cfg);
        dim = slice.dim();
        if (dim != 1 && dim != 2) throw ConfigError("config: render needs a dim 1 or 2 slice");
        std::array<double, 4> lo, hi;
        std::array<int, 4> res;
        window_from_config(cfg, dim, lo, hi, res);
        FieldConfig fc;
        fc.sampler = sampler_from_config(cfg);
        fc.green = green_from_config(cfg);
        fc.fiber_z = cfg.get_cplx("render.fiber_z", cplx(0.0));
        fc.parallel = cfg.get_int("parallel", 1) != 0;
        PotentialKind pk;
        if (kind == "lv")
            pk = PotentialKind::Lv;
        else if (kind == "fiberz")
            pk = PotentialKind::FiberZ;
        else if (kind == "lp")
            pk = PotentialKind::Lp;
        else
            throw ConfigError("config: unknown render.kind " + kind);
        field = potential_field(slice, lo, hi, res, pk, fc);
    }
    field.cfg_hash = cfg.hash();
    GridField mass = field.dim == 1 ? ddc_mass(field) : wedge_mass_2(field, field);
    mass.cfg_hash = cfg.hash();
    write_csv(field, out_prefix + "_field.csv");
    write_pgm16(field, out_prefix + "_field.pgm");
    write_csv(mass, out_prefix + "_mass.csv");
    write_pgm16(mass, out_prefix + "_mass.pgm");

    double tau = 0.0;
    auto mask = support_mask(mass, &tau);
    std::size_t on = 0;
    for (auto b : mask) on += b ? 1 : 0;

    nlohmann::ordered_json j = meta_json(cfg);
    j["command"] = "render";
    j["kind"] = field.kind;
    j["dim"] = field.dim;
    j["total_mass"] = total_mass(mass);
    j["support_tau"] = tau;
    j["support_cells"] = on;
    j["files"] = {out_prefix + "_field.csv", out_prefix + "_field.pgm",
                  out_prefix + "_mass.csv", out_prefix + "_mass.pgm"};
    return j;
}

namespace {

// shared by mis-search and second-relation: solve the configured relation
MisiurewiczRelation seed_from_config(const ExperimentConfig& cfg, const ParameterSlice& slice) {
    std::vector<cplx> lam = cfg.get_cplx_list("lambda");
    if (int(lam.size()) != slice.dim())
        throw ConfigError("config: lambda length does not match the slice dimension");
    cplx z0 = cfg.get_cplx("mis.z0");
    int ci = int(cfg.get_int("mis.critical_index", 0));
    int n0 = int(cfg.get_int("mis.n0"));
    cplx z1 = cfg.get_cplx("mis.target_z1");
    cplx w1 = cfg.get_cplx("mis.target_w1");
    int m = int(cfg.get_int("mis.target_m", 1));
    double tol = cfg.get_tol("tol.solver", 1e-11);

    SkewProduct f0 = slice.at(lam);
    // snap the configured fiber guess onto the actual periodic point
    auto orbs = periodic_points_fiber(f0, z1, m, false);
    if (orbs.empty()) throw NoConvergence("mis-search: no fiber periodic points over target_z1");
    const PeriodicOrbit* best = &orbs[0];
    for (const auto& o : orbs)
        if (std::abs(o.w1 - w1) < std::abs(best->w1 - w1)) best = &o;
    return solve_misiurewicz(slice, z0, ci, n0, *best, lam, tol);
}

} // namespace

nlohmann::ordered_json run_mis_search(const ExperimentConfig& cfg) {
    ParameterSlice slice = slice_from_config(cfg);
    MisiurewiczRelation rel = seed_from_config(cfg, slice);
    GoodnessReport g = goodness_audit(slice, rel);
    nlohmann::ordered_json j = meta_json(cfg);
    j["command"] = "mis-search";
    j["relation"] = relation_json(rel, g);
    return j;
}

nlohmann::ordered_json run_second_relation(const ExperimentConfig& cfg) {
    ParameterSlice slice = slice_from_config(cfg);
    MisiurewiczRelation seed = seed_from_config(cfg, slice);
    GoodnessReport gs = goodness_audit(slice, seed);

    int letters = int(cfg.get_int("search.letters", 3));
    double box_r = cfg.get_tol("search.boxradius", 0.25);
    double eps = cfg.get_tol("search.eps", 3.0);
    int kmax = int(cfg.get_int("search.kmax", 4));
    InverseBranchSystem sys =
        make_quadratic_search_system(slice.at(seed.lambda_star), letters, box_r);
    MisiurewiczRelation second = second_relation_search(slice, seed, sys, eps, kmax);
    GoodnessReport g2 = goodness_audit(slice, second);
    RankCertificate rc = independence_rank(slice, {seed, second}, second.lambda_star,
                                           cfg.get_tol("tol.rank", 1e-6));

    nlohmann::ordered_json j = meta_json(cfg);
    j["command"] = "second-relation";
    j["seed"] = relation_json(seed, gs);
    j["second"] = relation_json(second, g2);
    j["rank"] = rc.rank;
    j["sigma_min"] = rc.sigma_min;
    j["singular_values"] = rc.singular_values;
    return j;
}

nlohmann::ordered_json run_asymptotics(const ExperimentConfig& cfg,
                                       const std::string& out_prefix) {
    std::string q = cfg.get_str("asym.quantity");
    AsymptoticQuantity quantity;
    if (q == "fiber-modulus")
        quantity = AsymptoticQuantity::FiberModulus;
    else if (q == "v2")
        quantity = AsymptoticQuantity::V2;
    else if (q == "u2")
        quantity = AsymptoticQuantity::U2;
    else if (q == "multiplier")
        quantity = AsymptoticQuantity::Multiplier;
    else
        throw ConfigError("config: unknown asym.quantity " + q);
    int n0 = int(cfg.get_int("asym.n0", 2));
    std::vector<double> mags = cfg.get_real_list("asym.mags");
    cplx ray1 = cfg.get_cplx("asym.ray1", cplx(1.0));
    cplx ray2 = cfg.get_cplx("asym.ray2", cplx(1.0));

    AsymptoticFit fit = unicritical_asymptotics(quantity, n0, mags, ray1, ray2);

    std::ofstream csv(out_prefix + ".csv", std::ios::binary);
    csv << "# kind=asymptotics quantity=" << q << " n0=" << n0 << " cfg=" << cfg.hash() << "\n";
    csv << "log10_mag,log10_value\r\n";
    char buf[80];
    for (std::size_t i = 0; i < fit.log_mag.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\r\n", fit.log_mag[i], fit.log_value[i]);
        csv << buf;
    }
    csv.close();

    nlohmann::ordered_json j = meta_json(cfg);
    j["command"] = "asymptotics";
    j["quantity"] = q;
    j["n0"] = n0;
    j["slope"] = fit.slope;
    j["intercept"] = fit.intercept;
    j["points"] = fit.log_mag.size();
    j["files"] = {out_prefix + ".csv"};
    return j;
}

nlohmann::ordered_json run_ifs_audit(const ExperimentConfig& cfg) {
    double alpha = cfg.get_tol("ifs.alpha", 0.5);
    InverseBranchSystem sys = make_fixed_point_horseshoe(alpha);
    IfsAudit rep = audit_V123(sys);

    // limit-set Green values and word fixed points, as in the V1 evidence
    GreenConfig gc = green_from_config(cfg);
    double gmax = 0.0;
    int undecided = 0;
    for (auto [z, w] : limit_points(sys, int(cfg.get_int("ifs.wordlen", 14)),
                                    int(cfg.get_int("ifs.samples", 40)),
                                    std::uint64_t(cfg.get_int("sampler.seed", 7)))) {
        GreenValue g = green_vertical(sys.f, z, w, gc);
        gmax = std::max(gmax, g.value);
        if (g.undecided) ++undecided;
    }
    nlohmann::ordered_json words = nlohmann::ordered_json::array();
    bool all_vertical = true;
    for (int b = 0; b < int(sys.branches.size()); ++b) {
        PeriodicOrbit o = periodic_in_limit(sys, {b});
        all_vertical = all_vertical && std::abs(o.B) > std::abs(o.A);
        words.push_back({{"word", {b}},
                         {"z1", cplx_json(o.z1)},
                         {"w1", cplx_json(o.w1)},
                         {"abs_A", std::abs(o.A)},
                         {"abs_B", std::abs(o.B)}});
    }

    nlohmann::ordered_json j = meta_json(cfg);
    j["command"] = "ifs-audit";
    j["alpha"] = alpha;
    j["audit"] = audit_json(rep);
    j["limit_green_max"] = gmax;
    j["limit_green_undecided"] = undecided;
    j["word_fixed_points"] = words;
    j["all_word_points_vertical_like"] = all_vertical;
    return j;
}

GridField ddc_trace_2(const GridField& field) {
    if (field.dim != 2) throw std::invalid_argument("ddc_trace_2: needs a dim-2 field");
    GridField out = field;
    out.kind = field.kind + "_ddc_trace";
    const double tau = 2.0 * std::acos(-1.0);
    double vol = field.cell_volume();
    std::array<int, 4> i{};
    for (i[0] = 0; i[0] < field.res[0]; ++i[0])
        for (i[1] = 0; i[1] < field.res[1]; ++i[1])
            for (i[2] = 0; i[2] < field.res[2]; ++i[2])
                for (i[3] = 0; i[3] < field.res[3]; ++i[3]) {
                    std::size_t idx = field.index(i);
                    bool edge = false;
                    for (int a = 0; a < 4; ++a)
                        if (i[a] == 0 || i[a] == field.res[a] - 1) edge = true;
                    if (edge) {
                        out.values[idx] = 0.0;
                        out.flags[idx] = 2;
                        continue;
                    }
                    auto at = [&](int a, int off) {
                        auto ii = i;
                        ii[a] += off;
                        return field.values[field.index(ii)];
                    };
                    double c = field.values[idx];
                    double lap01 = (at(0, 1) + at(0, -1) - 2 * c) / (field.step(0) * field.step(0)) +
                                   (at(1, 1) + at(1, -1) - 2 * c) / (field.step(1) * field.step(1));
                    double lap23 = (at(2, 1) + at(2, -1) - 2 * c) / (field.step(2) * field.step(2)) +
                                   (at(3, 1) + at(3, -1) - 2 * c) / (field.step(3) * field.step(3));
                    double v = (lap01 + lap23) / tau * vol;
                    if (!std::isfinite(v)) {
                        out.values[idx] = 0.0;
                        out.flags[idx] = 2;
                    } else {
                        out.values[idx] = v;
                        out.flags[idx] = 0;
                    }
                }
    return out;
}

nlohmann::ordered_json run_equality_experiment(const ExperimentConfig& cfg,
                                               const std::string& out_prefix) {
    ParameterSlice slice = slice_from_config(cfg);
    if (slice.dim() != 2)
        throw ConfigError("config: equality-experiment needs a 2-complex-dim slice");
    std::array<double, 4> lo, hi;
    std::array<int, 4> res;
    window_from_config(cfg, 2, lo, hi, res);
    FieldConfig fc;
    fc.sampler = sampler_from_config(cfg);
    fc.green = green_from_config(cfg);
    fc.parallel = cfg.get_int("parallel", 1) != 0;

    GridField G = potential_field(slice, lo, hi, res, PotentialKind::Lv, fc);
    G.cfg_hash = cfg.hash();
    GridField ddc = ddc_trace_2(G);
    GridField wedge = wedge_mass_2(G, G);
    ddc.cfg_hash = wedge.cfg_hash = cfg.hash();

    double tau_d = 0.0, tau_w = 0.0;
    auto mask_d = support_mask(ddc, &tau_d);
    auto mask_w = support_mask(wedge, &tau_w);

    // discrete containment: every wedge-support cell within `halo` cells
    // (Chebyshev in index space) of a ddc-support cell
    int halo = int(cfg.get_int("equality.halo", 2));
    int worst = -1;
    std::size_t wcells = 0;
    std::array<int, 4> i{};
    for (i[0] = 0; i[0] < res[0]; ++i[0])
        for (i[1] = 0; i[1] < res[1]; ++i[1])
            for (i[2] = 0; i[2] < res[2]; ++i[2])
                for (i[3] = 0; i[3] < res[3]; ++i[3]) {
                    if (!mask_w[wedge.index(i)]) continue;
                    ++wcells;
                    int best = halo + 1;
                    std::array<int, 4> n{};
                    for (n[0] = std::max(0, i[0] - halo); n[0] <= std::min(res[0] - 1, i[0] + halo); ++n[0])
                        for (n[1] = std::max(0, i[1] - halo); n[1] <= std::min(res[1] - 1, i[1] + halo); ++n[1])
                            for (n[2] = std::max(0, i[2] - halo); n[2] <= std::min(res[2] - 1, i[2] + halo); ++n[2])
                                for (n[3] = std::max(0, i[3] - halo); n[3] <= std::min(res[3] - 1, i[3] + halo); ++n[3]) {
                                    if (!mask_d[ddc.index(n)]) continue;
                                    int d = 0;
                                    for (int a = 0; a < 4; ++a)
                                        d = std::max(d, std::abs(n[a] - i[a]));
                                    best = std::min(best, d);
                                }
                    worst = std::max(worst, best);
                }
    bool contained = worst <= halo;

    // rank-2 certificate inside the window, located on the ddc support mask
    nlohmann::ordered_json cert = run_second_relation(cfg);
    std::vector<cplx> lam;
    for (const auto& c : cert["second"]["lambda_star"])
        lam.push_back(cplx(c[0].get<double>(), c[1].get<double>()));
    std::array<int, 4> ci{};
    bool in_window = true;
    double coords[4] = {lam[0].real(), lam[0].imag(), lam[1].real(), lam[1].imag()};
    for (int a = 0; a < 4; ++a) {
        int idx = int(std::floor((coords[a] - lo[a]) / G.step(a)));
        if (idx < 0 || idx >= res[a]) in_window = false;
        ci[a] = std::clamp(idx, 0, res[a] - 1);
    }
    bool cert_on_support = in_window && mask_d[ddc.index(ci)];

    write_csv(G, out_prefix + "_potential.csv");
    write_pgm16(G, out_prefix + "_potential.pgm");
    write_csv(ddc, out_prefix + "_ddc.csv");
    write_pgm16(ddc, out_prefix + "_ddc.pgm");
    write_csv(wedge, out_prefix + "_wedge.csv");
    write_pgm16(wedge, out_prefix + "_wedge.pgm");
    write_mask_field(ddc, mask_d, out_prefix + "_ddc_mask.csv");
    write_mask_field(wedge, mask_w, out_prefix + "_wedge_mask.csv");

    nlohmann::ordered_json j = meta_json(cfg);
    j["command"] = "equality-experiment";
    j["note"] = "discrete consistency check of the support inclusion; not a proof";
    j["ddc_total_mass"] = total_mass(ddc);
    j["wedge_total_mass"] = total_mass(wedge);
    j["ddc_tau"] = tau_d;
    j["wedge_tau"] = tau_w;
    std::size_t dcells = 0;
    for (auto b : mask_d) dcells += b ? 1 : 0;
    j["ddc_support_cells"] = dcells;
    j["wedge_support_cells"] = wcells;
    j["halo"] = halo;
    j["wedge_in_ddc_halo"] = contained;
    j["worst_wedge_distance"] = worst;
    j["certificate"] = cert;
    j["certificate_cell"] = {ci[0], ci[1], ci[2], ci[3]};
    j["certificate_in_window"] = in_window;
    j["certificate_on_ddc_support"] = cert_on_support;
    j["files"] = {out_prefix + "_potential.csv", out_prefix + "_potential.pgm",
                  out_prefix + "_ddc.csv",       out_prefix + "_ddc.pgm",
                  out_prefix + "_wedge.csv",     out_prefix + "_wedge.pgm",
                  out_prefix + "_ddc_mask.csv",  out_prefix + "_wedge_mask.csv"};
    return j;
}

} // namespace skewlab
