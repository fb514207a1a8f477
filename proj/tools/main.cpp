// skewlab command line: thin wrapper over the run_* drivers. Every command
// reads one key=value config file, writes <out>.json, and prints the same
// JSON to stdout. Exit codes: 0 ok, 2 bad config/usage, 3 numerical failure,
// 4 search exhausted.
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "skewlab/runner.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_prefix;
    long seed = -1;
    std::vector<long> res;
    std::vector<double> window;
};

void add_common(CLI::App* cmd, CommonOpts& o, const std::string& default_out) {
    o.out_prefix = default_out;
    cmd->add_option("-c,--config", o.config_path, "experiment config file")->required();
    cmd->add_option("-o,--out", o.out_prefix, "output prefix");
    cmd->add_option("--seed", o.seed, "override sampler.seed");
    cmd->add_option("--res", o.res, "override window.res");
    cmd->add_option("--window", o.window, "override window as lo... hi... (split halves)");
}

skewlab::ExperimentConfig load_with_overrides(const CommonOpts& o) {
    skewlab::ExperimentConfig cfg = skewlab::load_config(o.config_path);
    if (o.seed >= 0) cfg.kv["sampler.seed"] = std::to_string(o.seed);
    if (!o.res.empty()) {
        std::string v;
        for (long r : o.res) v += (v.empty() ? "" : " ") + std::to_string(r);
        cfg.kv["window.res"] = v;
    }
    if (!o.window.empty()) {
        if (o.window.size() % 2 != 0)
            throw skewlab::ConfigError("--window needs an even number of values");
        std::string lo, hi;
        std::size_t h = o.window.size() / 2;
        char buf[40];
        for (std::size_t i = 0; i < o.window.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", o.window[i]);
            std::string& dst = i < h ? lo : hi;
            dst += (dst.empty() ? "" : " ") + std::string(buf);
        }
        cfg.kv["window.lo"] = lo;
        cfg.kv["window.hi"] = hi;
    }
    return cfg;
}

void emit(const nlohmann::ordered_json& j, const std::string& out_prefix) {
    std::string text = j.dump(2);
    std::ofstream f(out_prefix + ".json", std::ios::binary);
    f << text << "\n";
    std::cout << text << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"skewlab: numerical experiments on polynomial skew products"};
    app.require_subcommand(1);

    CommonOpts o;
    std::function<nlohmann::ordered_json(const skewlab::ExperimentConfig&)> driver;

    auto* lyap = app.add_subcommand("lyap", "base and vertical Lyapunov exponents");
    auto* render = app.add_subcommand("render", "potential field and its mass over a window");
    auto* mis = app.add_subcommand("mis-search", "solve one critical-orbit relation");
    auto* second =
        app.add_subcommand("second-relation", "find an independent second relation + rank");
    auto* asym = app.add_subcommand("asymptotics", "log-log exponents along a parameter ray");
    auto* ifs = app.add_subcommand("ifs-audit", "vertical-like IFS structure audit");
    auto* eq = app.add_subcommand("equality-experiment",
                                  "dd^c trace vs wedge mass support comparison");
    add_common(lyap, o, "out_lyap");
    add_common(render, o, "out_render");
    add_common(mis, o, "out_mis");
    add_common(second, o, "out_second");
    add_common(asym, o, "out_asym");
    add_common(ifs, o, "out_ifs");
    add_common(eq, o, "out_equality");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        skewlab::ExperimentConfig cfg = load_with_overrides(o);
        nlohmann::ordered_json j;
        if (lyap->parsed())
            j = skewlab::run_lyap(cfg);
        else if (render->parsed())
            j = skewlab::run_render(cfg, o.out_prefix);
        else if (mis->parsed())
            j = skewlab::run_mis_search(cfg);
        else if (second->parsed())
            j = skewlab::run_second_relation(cfg);
        else if (asym->parsed())
            j = skewlab::run_asymptotics(cfg, o.out_prefix);
        else if (ifs->parsed())
            j = skewlab::run_ifs_audit(cfg);
        else
            j = skewlab::run_equality_experiment(cfg, o.out_prefix);
        emit(j, o.out_prefix);
        return 0;
    } catch (const skewlab::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const skewlab::SearchExhausted& e) {
        nlohmann::ordered_json j{{"error", "search exhausted"}, {"detail", e.what()}};
        emit(j, o.out_prefix);
        return 4;
    } catch (const std::exception& e) {
        nlohmann::ordered_json j{{"error", "numerical failure"}, {"detail", e.what()}};
        emit(j, o.out_prefix);
        return 3;
    }
}
