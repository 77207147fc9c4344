#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "snlab/sweep.hpp"

namespace {

constexpr int exit_config = 2;
constexpr int exit_runtime = 1;

struct Subcommand {
    snlab::SweepKind kind;
    const char* help;
};

constexpr Subcommand subcommands[] = {
    {snlab::SweepKind::bifurcation, "orbit diagram over a native-parameter window"},
    {snlab::SweepKind::gammas, "ladder parameters gamma_l over lmin..lmax"},
    {snlab::SweepKind::mather, "Mather invariant on a tau grid"},
    {snlab::SweepKind::misiurewicz, "Misiurewicz parameters per rung"},
    {snlab::SweepKind::br_scan, "recurrence condition on a theta grid around the Misiurewicz parameter"},
    {snlab::SweepKind::chi, "fraction of time in the laminar region"},
    {snlab::SweepKind::measure, "empirical invariant measure histogram"},
    {snlab::SweepKind::windows, "periodic-window detection by Lyapunov slope"},
    {snlab::SweepKind::scaling, "ln(1 - chi) and laminar-length scaling fit"},
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw snlab::ConfigError(snlab::ErrorCode::io, {"cannot read config file '" + path + "'"});
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int report(const snlab::ConfigError& e) {
    for (const auto& p : e.problems())
        std::fprintf(stderr, "snlab: %s error: %s\n", std::string(snlab::to_string(e.code())).c_str(), p.c_str());
    return exit_config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Saddle-node intermittency experiments"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(snlab::build_version));

    std::string config_path;
    bool print_config = false;
    std::map<std::string, std::string> overrides;
    std::map<CLI::App*, snlab::SweepKind> kinds;

    for (const auto& sc : subcommands) {
        CLI::App* sub = app.add_subcommand(snlab::to_string(sc.kind), sc.help);
        sub->add_option("--config", config_path, "flat key = value file");
        sub->add_flag("--print-config", print_config, "print the resolved configuration and exit");
        for (const auto& key : snlab::config_keys()) {
            if (key == "kind") continue;
            sub->add_option_function<std::string>(
                "--" + key, [&overrides, key](const std::string& v) { overrides[key] = v; }, "override '" + key + "'");
        }
        kinds[sub] = sc.kind;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_config;
    }

    snlab::SweepKind kind = snlab::SweepKind::chi;
    for (auto [sub, k] : kinds)
        if (sub->parsed()) kind = k;

    snlab::SweepConfig cfg;
    try {
        cfg = config_path.empty() ? snlab::default_config(kind) : snlab::parse_config(read_file(config_path), kind);
        std::vector<std::string> problems;
        for (const auto& [key, value] : overrides)
            if (auto p = snlab::set_config_value(cfg, key, value)) problems.push_back(*p);
        for (auto& p : snlab::validate(cfg)) problems.push_back(std::move(p));
        if (!problems.empty()) throw snlab::ConfigError(snlab::ErrorCode::validation, problems);
    } catch (const snlab::ConfigError& e) {
        return report(e);
    }

    if (print_config) {
        std::fputs(snlab::emit_config(cfg).c_str(), stdout);
        return 0;
    }

    std::string text;
    try {
        auto result = snlab::run_sweep(cfg);
        text = cfg.format == "json" ? snlab::emit_json(result) : snlab::emit_csv(result);
        for (const auto& [name, value] : result.summary)
            if (name == "status")
                std::fprintf(stderr, "snlab: sweep setup failed: %s\n", std::get<std::string>(value).c_str());
    } catch (const snlab::ConfigError& e) {
        return report(e);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "snlab: %s\n", e.what());
        return exit_runtime;
    }

    if (cfg.output == "-") {
        std::fwrite(text.data(), 1, text.size(), stdout);
        return 0;
    }
    std::ofstream out(cfg.output, std::ios::binary);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) {
        std::fprintf(stderr, "snlab: cannot write '%s'\n", cfg.output.c_str());
        return exit_runtime;
    }
    return 0;
}
