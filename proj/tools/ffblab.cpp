// Experiment runner: parses a key = value config, dispatches to the named
// experiment, and writes artifacts plus manifest.json into the output
// directory. Exit codes: 0 all checks pass, 1 a check failed, 2 config
// error, 3 runtime error.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ffb/experiments.hpp"

namespace {

std::string iso_now() {
    auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&t));
    return buf;
}

int run_config(const std::string& config_path, std::string outdir_flag) {
    ffb::Config cfg;
    try {
        cfg = ffb::Config::parse_file(config_path);
    } catch (const ffb::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
    std::string name = cfg.get_string("experiment");
    const ffb::ExperimentEntry* entry = ffb::find_experiment(name);
    if (!entry) {
        std::cerr << "config error: unknown experiment `" << name << "`";
        if (!name.empty()) std::cerr << " (nearest: " << ffb::nearest_experiment(name) << ")";
        std::cerr << "\n";
        return 2;
    }
    std::string outdir = cfg.get_string("output_dir", "out/" + name);
    if (const char* env = std::getenv("FFB_OUTPUT_DIR")) outdir = env;
    if (!outdir_flag.empty()) outdir = outdir_flag;

    try {
        ffb::ExperimentContext ctx(cfg, outdir);
        ctx.manifest().experiment = name;
        ctx.manifest().config_hash = cfg.hash();
        ctx.manifest().started = iso_now();
        bool runtime_failed = false;
        std::string runtime_msg;
        try {
            entry->run(ctx);
        } catch (const ffb::config_error& e) {
            std::cerr << "config error: " << e.what() << "\n";
            return 2;
        } catch (const std::exception& e) {
            runtime_failed = true;
            runtime_msg = e.what();
            ctx.check("runtime", false);
        }
        ctx.manifest().finished = iso_now();
        ctx.write_manifest();
        for (auto& [check, ok] : ctx.manifest().checks)
            std::cout << (ok ? "[PASS] " : "[FAIL] ") << check << "\n";
        if (runtime_failed) {
            std::cerr << "runtime error: " << runtime_msg << "\n";
            return 3;
        }
        return ctx.manifest().all_pass() ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return 3;
    }
}

int validate_config(const std::string& config_path) {
    try {
        ffb::Config cfg = ffb::Config::parse_file(config_path);
        std::string name = cfg.get_string("experiment");
        const ffb::ExperimentEntry* entry = ffb::find_experiment(name);
        if (!entry) {
            std::cerr << "config error: unknown experiment `" << name << "`";
            if (!name.empty()) std::cerr << " (nearest: " << ffb::nearest_experiment(name) << ")";
            std::cerr << "\n";
            return 2;
        }
        // touch the common numeric keys so range errors surface with lines
        ffb::experiments::params_from(cfg);
        if (cfg.has("grid.nx")) ffb::experiments::grid_from(cfg, ffb::experiments::params_from(cfg));
        std::cout << "ok: " << name << "\n";
        return 0;
    } catch (const ffb::error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"fractional free-boundary laboratory"};
    app.require_subcommand(1);

    std::string config_path, outdir_flag;
    auto* run = app.add_subcommand("run", "run an experiment from a config file");
    run->add_option("config", config_path, "path to key = value config")->required();
    run->add_option("-o,--output-dir", outdir_flag, "override the output directory");

    auto* list = app.add_subcommand("list", "list available experiments");

    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "parse and validate a config file");
    validate->add_option("config", validate_path, "path to config")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? 2 : 0;
    }

    if (list->parsed()) {
        for (const auto& e : ffb::experiment_registry())
            std::cout << e.name << "  -  " << e.doc << "\n";
        return 0;
    }
    if (run->parsed()) return run_config(config_path, outdir_flag);
    if (validate->parsed()) return validate_config(validate_path);
    return 2;
}
